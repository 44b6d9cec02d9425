#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "demod/error.hpp"
#include "demod/providers.hpp"

namespace demod {

// Replays canned responses. An entry matches when its tag equals the request
// tag (or is empty) and its needle occurs in the request subject or user text
// (or is empty). Responses of an entry are served in order; the last repeats.
class ScriptedChat final : public ChatProvider {
 public:
  struct Entry {
    std::string tag;
    std::string needle;
    std::vector<std::string> responses;
    std::optional<ErrorCode> error;  // thrown instead of responding
  };

  ScriptedChat() = default;
  explicit ScriptedChat(std::vector<Entry> entries);

  // JSON array of {"tag", "contains", "responses" | "response", "error"}.
  static std::shared_ptr<ScriptedChat> from_file(const std::filesystem::path& path);

  void add(Entry entry);
  void add(std::string tag, std::string needle, std::string response);

  std::string complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t call_count() const;

 private:
  struct Slot {
    Entry entry;
    std::size_t served = 0;
  };
  mutable std::mutex mu_;
  std::vector<Slot> slots_;
  std::vector<ChatRequest> log_;
};

// Deterministic stand-in for a chat model driven by the lexicon classifier.
//   detect   -> JSON verdict; keywords are the positive-weight tokens
//   modify   -> JSON revision with every mapped toxic token replaced
//   simulate -> JSON reply, disapproving when the post scores toxic
// With detoxify=false the modify route echoes the text unchanged.
class RuleBasedChat final : public ChatProvider {
 public:
  RuleBasedChat(std::shared_ptr<const LexiconClassifier> classifier,
                std::unordered_map<std::string, std::string> synonyms,
                bool detoxify = true,
                std::shared_ptr<const Tokenizer> tokenizer = nullptr);

  // Lines "toxic<TAB>replacement".
  static std::unordered_map<std::string, std::string> load_synonyms(
      const std::filesystem::path& path);

  std::string complete(const ChatRequest& request) override;

  std::string detoxify(std::string_view text) const;

 private:
  std::shared_ptr<const LexiconClassifier> classifier_;
  std::unordered_map<std::string, std::string> synonyms_;
  bool detoxify_;
  std::shared_ptr<const Tokenizer> tokenizer_;
};

}  // namespace demod

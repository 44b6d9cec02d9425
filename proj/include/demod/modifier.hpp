#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "demod/detector.hpp"
#include "demod/domain.hpp"
#include "demod/providers.hpp"

namespace demod {

inline constexpr std::string_view kSamplesStart = "The start of nontoxic-toxic samples";
inline constexpr std::string_view kSamplesEnd = "The end of nontoxic-toxic samples";
inline constexpr std::string_view kBasicExamplesHeader = "Basic examples:";

struct ModifierConfig {
  std::size_t max_pairs = 5;
  int max_iters = 3;
  double temperature = 0.0;
  // Template with {post}, {pairs} and {basic_examples}; built-in default when unset.
  std::optional<std::filesystem::path> template_path;
};

const std::string& default_modification_template();
const std::string& basic_examples();

// The revision text from model output: the "revision" field of a JSON object,
// or the trimmed raw text. Errors: MalformedModelOutput when empty.
std::string parse_revision(std::string_view raw);

class Modifier {
 public:
  Modifier(std::shared_ptr<ChatProvider> chat, std::shared_ptr<const Detector> detector,
           ModifierConfig config = {});

  // Embeds the newest `max_pairs` pairs, each flipped to toxic-first. With no
  // pairs the sample block is omitted and basic examples go in the system text.
  ChatRequest build_modification_prompt(const Post& post,
                                        const std::vector<PairExample>& pairs,
                                        std::size_t max_pairs) const;

  // Detect, then revise and re-detect until nontoxic or max_iters rounds.
  ModificationResult modify(const Post& post, const std::vector<PairExample>& pairs) const;
  ModificationResult modify(const Post& post, const DetectionResult& initial,
                            const std::vector<PairExample>& pairs) const;

  const ModifierConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<ChatProvider> chat_;
  std::shared_ptr<const Detector> detector_;
  ModifierConfig config_;
  std::string template_;
};

}  // namespace demod

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "demod/domain.hpp"
#include "demod/providers.hpp"

namespace demod {

struct DetectionPrompt {
  std::string task_label;
  std::string template_text;  // rendered user prompt
  std::string system_text;
  std::string schema;

  ChatRequest to_request(double temperature) const;
};

struct DetectorConfig {
  // Template with {text} and {topic}; the built-in default is used when unset.
  std::optional<std::filesystem::path> template_path;
  int repair_retries = 2;
  double temperature = 0.0;
};

// Model output after schema checks, before keyword validation.
struct ParsedDetection {
  Verdict verdict = Verdict::Nontoxic;
  std::vector<std::string> keywords;
  std::string explanation;
};

// nullopt when the output is not a JSON object with a Y/N verdict, a string
// array of keywords and a string explanation.
std::optional<ParsedDetection> parse_detection_output(std::string_view raw);

inline constexpr std::string_view kDetectionTask = "Toxicity detection";
inline constexpr std::string_view kAbsentTopic = "(no topic)";
inline constexpr std::string_view kJsonRepairInstruction =
    "Your previous reply could not be parsed. Respond with JSON only, using "
    "exactly the keys \"verdict\", \"keywords\" and \"explanation\".";

const std::string& default_detection_template();

class Detector {
 public:
  Detector(std::shared_ptr<ChatProvider> chat,
           std::shared_ptr<const Tokenizer> tokenizer, DetectorConfig config = {});

  DetectionPrompt build_detection_prompt(const Post& post) const;

  // Errors: MalformedModelOutput after repair_retries re-prompts; provider
  // errors propagate unchanged.
  DetectionResult detect(const Post& post) const;

  // Parses model-revised text with the five-word floor waived. Errors:
  // MalformedModelOutput on empty text.
  Post prepare_recheck(std::string_view text) const;
  DetectionResult recheck(std::string_view text) const;

  const Tokenizer& tokenizer() const noexcept { return *tokenizer_; }

 private:
  std::shared_ptr<ChatProvider> chat_;
  std::shared_ptr<const Tokenizer> tokenizer_;
  DetectorConfig config_;
  std::string template_;
};

}  // namespace demod

#include "demod/detector.hpp"

#include <spdlog/spdlog.h>

#include "demod/error.hpp"
#include "demod/prompt.hpp"

namespace demod {

using nlohmann::json;

namespace {

const std::string kSystemText =
    "Task: Toxicity detection\n"
    "You help a social media user censor their own post before it is "
    "published. Decide whether the sentence contains toxic content: rude, "
    "disrespectful or unreasonable language such as insults, discrimination, "
    "threats, bullying or derogatory remarks about a person or group. The "
    "topic is context only; judge the sentence itself.\n"
    "If the sentence is toxic, list the words that trigger the toxicity, "
    "copied exactly as they appear in the sentence, and explain why the "
    "sentence and those words are toxic. If it is not toxic, return an empty "
    "keyword list and a one-sentence explanation.";

const std::string kSchema =
    "A single JSON object with exactly these keys: \"verdict\" (\"Y\" if the "
    "sentence contains toxic content, otherwise \"N\"), \"keywords\" (array of "
    "strings copied from the sentence), \"explanation\" (string). No other text.";

}  // namespace

const std::string& default_detection_template() {
  static const std::string tpl =
      "Topic: {topic}\n"
      "Sentence to detect: {text}";
  return tpl;
}

ChatRequest DetectionPrompt::to_request(double temperature) const {
  ChatRequest r;
  r.system_text = system_text;
  r.user_text = template_text;
  r.output_schema_hint = schema;
  r.temperature = temperature;
  r.tag = "detect";
  return r;
}

std::optional<ParsedDetection> parse_detection_output(std::string_view raw) {
  const auto doc = extract_json_object(raw);
  if (!doc) return std::nullopt;
  const auto verdict = doc->find("verdict");
  const auto keywords = doc->find("keywords");
  const auto explanation = doc->find("explanation");
  if (verdict == doc->end() || !verdict->is_string() || keywords == doc->end() ||
      !keywords->is_array() || explanation == doc->end() ||
      !explanation->is_string()) {
    return std::nullopt;
  }
  ParsedDetection out;
  const auto v = ascii_lower(trim(verdict->get<std::string>()));
  if (v == "y") {
    out.verdict = Verdict::Toxic;
  } else if (v == "n") {
    out.verdict = Verdict::Nontoxic;
  } else {
    return std::nullopt;
  }
  for (const auto& k : *keywords) {
    if (!k.is_string()) return std::nullopt;
    out.keywords.push_back(k.get<std::string>());
  }
  out.explanation = explanation->get<std::string>();
  return out;
}

Detector::Detector(std::shared_ptr<ChatProvider> chat,
                   std::shared_ptr<const Tokenizer> tokenizer,
                   DetectorConfig config)
    : chat_(std::move(chat)),
      tokenizer_(tokenizer ? std::move(tokenizer)
                           : std::make_shared<DefaultTokenizer>()),
      config_(std::move(config)) {
  if (!chat_) throw Error(ErrorCode::InvalidArgument, "detector needs a chat provider");
  template_ = config_.template_path ? read_text_file(*config_.template_path)
                                    : default_detection_template();
  if (config_.repair_retries < 0) config_.repair_retries = 0;
}

DetectionPrompt Detector::build_detection_prompt(const Post& post) const {
  DetectionPrompt p;
  p.task_label = std::string(kDetectionTask);
  p.template_text = render_template(
      template_, {{"text", post.text},
                  {"topic", post.topic ? *post.topic : std::string(kAbsentTopic)}});
  p.system_text = kSystemText;
  p.schema = kSchema;
  return p;
}

DetectionResult Detector::detect(const Post& post) const {
  auto request = build_detection_prompt(post).to_request(config_.temperature);
  request.subject = post.text;
  const std::string base_user_text = request.user_text;

  std::string last_raw;
  for (int attempt = 0; attempt <= config_.repair_retries; ++attempt) {
    if (attempt > 0) {
      request.user_text = base_user_text + "\n\n" + std::string(kJsonRepairInstruction);
    }
    last_raw = chat_->complete(request);
    const auto parsed = parse_detection_output(last_raw);
    if (!parsed) {
      spdlog::debug("unparseable detection output (attempt {}): {}", attempt + 1,
                    last_raw);
      continue;
    }
    auto spans = parsed->verdict == Verdict::Toxic
                     ? validate_keywords(post, parsed->keywords)
                     : std::vector<KeywordSpan>{};
    return DetectionResult(parsed->verdict, std::move(spans), parsed->explanation,
                           last_raw, post.text);
  }
  throw Error(ErrorCode::MalformedModelOutput,
              "detection output was not valid JSON after " +
                  std::to_string(config_.repair_retries) + " repair retries");
}

Post Detector::prepare_recheck(std::string_view text) const {
  if (trim(text).empty()) {
    throw Error(ErrorCode::MalformedModelOutput, "modified text is empty");
  }
  try {
    return parse_post(text, *tokenizer_, {}, 0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MalformedTopic) throw;
    return Post{std::string(trim(text)), std::nullopt, {}};
  }
}

DetectionResult Detector::recheck(std::string_view text) const {
  return detect(prepare_recheck(text));
}

}  // namespace demod

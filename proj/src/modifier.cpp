#include "demod/modifier.hpp"

#include <algorithm>

#include "demod/error.hpp"
#include "demod/prompt.hpp"

namespace demod {

namespace {

const std::string kSchema =
    "A single JSON object with exactly one key: \"revision\" (string, the "
    "modified post without the topic). No other text.";

std::string one_line(std::string text) {
  text = strip_marker(std::move(text), kSamplesStart);
  text = strip_marker(std::move(text), kSamplesEnd);
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

}  // namespace

const std::string& default_modification_template() {
  static const std::string tpl =
      "{pairs}\n"
      "Post to modify: {post}";
  return tpl;
}

const std::string& basic_examples() {
  static const std::string examples =
      "Toxic: These people are idiots, they ruin everything they touch.\n"
      "Nontoxic: I disagree with these people; I think their choices cause problems.\n"
      "Toxic: Shut up, nobody cares about your stupid opinion.\n"
      "Nontoxic: I don't agree with your opinion, but let's talk about it calmly.\n"
      "Toxic: The referee is a disgusting clown who should be fired.\n"
      "Nontoxic: The referee made several poor calls today and I hope they improve.";
  return examples;
}

std::string parse_revision(std::string_view raw) {
  std::string revision;
  if (const auto doc = extract_json_object(raw);
      doc && doc->contains("revision") && (*doc)["revision"].is_string()) {
    revision = (*doc)["revision"].get<std::string>();
  } else {
    revision = std::string(raw);
  }
  revision = std::string(trim(revision));
  if (revision.empty()) {
    throw Error(ErrorCode::MalformedModelOutput, "modification output is empty");
  }
  return revision;
}

Modifier::Modifier(std::shared_ptr<ChatProvider> chat,
                   std::shared_ptr<const Detector> detector, ModifierConfig config)
    : chat_(std::move(chat)), detector_(std::move(detector)), config_(std::move(config)) {
  if (!chat_ || !detector_) {
    throw Error(ErrorCode::InvalidArgument, "modifier needs a chat provider and a detector");
  }
  if (config_.max_iters < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_iters must be at least 1");
  }
  template_ = config_.template_path ? read_text_file(*config_.template_path)
                                    : default_modification_template();
}

ChatRequest Modifier::build_modification_prompt(const Post& post,
                                                const std::vector<PairExample>& pairs,
                                                std::size_t max_pairs) const {
  const std::size_t n = std::min(max_pairs, pairs.size());
  std::string pairs_block;
  if (n > 0) {
    pairs_block = std::string(kSamplesStart) + "\n";
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = pairs[pairs.size() - 1 - i];  // newest first
      pairs_block += "Sample " + std::to_string(i + 1) + "\n";
      pairs_block += "Toxic: " + one_line(p.toxic_text) + "\n";
      pairs_block += "Nontoxic: " + one_line(p.nontoxic_text) + "\n";
    }
    pairs_block += kSamplesEnd;
  } else {
    pairs_block =
        "No nontoxic-toxic samples are available for this user. Follow the "
        "basic examples in the system setting.";
  }

  ChatRequest r;
  r.tag = "modify";
  r.subject = post.text;
  r.temperature = config_.temperature;
  r.output_schema_hint = kSchema;
  r.system_text =
      "Task: Expression modification\n"
      "Task requirements: Rewrite the user's post so that it no longer "
      "contains toxic content. Keep the original meaning and the user's "
      "personal language style; change as few words as possible. Each sample "
      "shows a toxic sentence followed by the user's own nontoxic wording; "
      "learn from the samples how this user expresses things.\n"
      "Rules without posting history: when no samples are given, follow the "
      "basic examples below.\n"
      "Expression style: match the wording, tone and length of the user's "
      "nontoxic sentences; do not add new content.";
  if (n == 0) r.system_text += "\n" + std::string(kBasicExamplesHeader) + "\n" + basic_examples();
  r.user_text = render_template(
      template_, {{"pairs", pairs_block},
                  {"post", one_line(post.text)},
                  {"basic_examples", n == 0 ? basic_examples() : std::string()}});
  return r;
}

ModificationResult Modifier::modify(const Post& post,
                                    const std::vector<PairExample>& pairs) const {
  return modify(post, detector_->detect(post), pairs);
}

ModificationResult Modifier::modify(const Post& post, const DetectionResult& initial,
                                    const std::vector<PairExample>& pairs) const {
  ModificationResult result;
  if (!initial.toxic()) {
    result.revised_text = post.text;
    result.iterations = 0;
    result.final_detection = initial;
    result.converged = true;
    return result;
  }

  Post current = post;
  for (int i = 1; i <= config_.max_iters; ++i) {
    const auto request = build_modification_prompt(current, pairs, config_.max_pairs);
    const auto revision = parse_revision(chat_->complete(request));
    auto revised = detector_->prepare_recheck(revision);
    if (!revised.topic) revised.topic = post.topic;
    const auto detection = detector_->detect(revised);

    result.revised_text = revised.text;
    result.iterations = i;
    result.final_detection = detection;
    if (!detection.toxic()) {
      result.converged = true;
      return result;
    }
    current = std::move(revised);
  }
  result.converged = false;
  return result;
}

}  // namespace demod

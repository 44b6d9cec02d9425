#include "demod/simulator.hpp"

#include <algorithm>

#include "demod/error.hpp"
#include "demod/prompt.hpp"

namespace demod {

namespace {

const std::string kSchema =
    "A single JSON object with exactly one key: \"reply\" (string). No other text.";

std::string sanitize(std::string text) {
  text = strip_marker(std::move(text), kContextStart);
  text = strip_marker(std::move(text), kContextEnd);
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

}  // namespace

const std::string& default_simulation_template() {
  static const std::string tpl =
      "Selected role: {role}\n"
      "{context}\n"
      "Post: {post}";
  return tpl;
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::vector<Comment> select_context(const std::vector<Comment>& comments,
                                    std::size_t max_comments,
                                    std::size_t char_budget) {
  std::size_t taken = 0;
  std::size_t used = 0;
  while (taken < comments.size() && taken < max_comments) {
    const auto& c = comments[comments.size() - 1 - taken];
    const auto len = utf8_length(c.text);
    if (used + len > char_budget) break;
    used += len;
    ++taken;
  }
  return {comments.end() - static_cast<std::ptrdiff_t>(taken), comments.end()};
}

Simulator::Simulator(std::shared_ptr<ChatProvider> chat, SimulatorConfig config)
    : chat_(std::move(chat)), config_(std::move(config)) {
  if (!chat_) throw Error(ErrorCode::InvalidArgument, "simulator needs a chat provider");
  template_ = config_.template_path ? read_text_file(*config_.template_path)
                                    : default_simulation_template();
}

std::vector<std::string> Simulator::list_roles(const UserProfile& profile,
                                               const AuthGrant& grant) const {
  if (!grant.active(Scope::InteractionContexts)) {
    throw Error(ErrorCode::Unauthorized,
                "interaction_contexts scope has not been granted");
  }
  std::vector<std::string> roles = config_.generic_roles;
  for (const auto& [peer, comments] : profile.interaction_contexts) {
    if (std::find(roles.begin(), roles.end(), peer) == roles.end()) {
      roles.push_back(peer);
    }
  }
  return roles;
}

ChatRequest Simulator::build_simulation_prompt(
    const Post& post, const std::string& role,
    const std::vector<Comment>& context) const {
  const auto kept = select_context(context, config_.max_comments,
                                   config_.context_char_budget);
  std::string context_block;
  if (kept.empty()) {
    context_block = std::string(kNoContextNotice);
  } else {
    context_block = std::string(kContextStart) + "\n";
    for (const auto& c : kept) context_block += "- " + sanitize(c.text) + "\n";
    context_block += kContextEnd;
  }

  ChatRequest r;
  r.tag = "simulate";
  r.subject = post.text;
  r.temperature = config_.temperature;
  r.output_schema_hint = kSchema;
  r.system_text =
      "Task: Viewpoint simulation\n"
      "Task requirements: You play the selected audience role. Read the user's "
      "draft post and reply the way this person would, showing their attitude "
      "and opinion of the post. When an interaction context is given, it "
      "contains comments this audience has left on the user's earlier posts; "
      "use it to imitate their preferences, opinions and way of speaking.\n"
      "Dialogue round limit: reply exactly once and do not continue the "
      "conversation.\n"
      "Expression style: " + config_.expression_style + "\n"
      "Rules without the context: if there is no interaction context between "
      "the user and the selected role, reply as a typical person in that role "
      "would, based only on the post and common social norms.";
  const std::string role_text = sanitize(role);
  const std::string post_text = sanitize(render_post(post));
  r.user_text = render_template(
      template_, {{"role", role_text}, {"context", context_block}, {"post", post_text}});
  return r;
}

SimulationResult Simulator::simulate(const Post& post, const std::string& role,
                                     const UserProfile& profile,
                                     const AuthGrant& grant) const {
  const auto roles = list_roles(profile, grant);
  if (std::find(roles.begin(), roles.end(), role) == roles.end()) {
    throw Error(ErrorCode::UnknownRole, "unknown audience role '" + role + "'");
  }
  static const std::vector<Comment> kNone;
  const auto it = profile.interaction_contexts.find(role);
  const auto& context = it == profile.interaction_contexts.end() ? kNone : it->second;

  const auto request = build_simulation_prompt(post, role, context);
  const bool used_context =
      request.user_text.find(kContextStart) != std::string::npos;

  std::string raw;
  try {
    raw = chat_->complete(request);
  } catch (const Error& e) {
    throw Error(e.code(), "simulation for role '" + role + "' failed: " + e.what());
  }

  std::string reply;
  if (const auto doc = extract_json_object(raw);
      doc && doc->contains("reply") && (*doc)["reply"].is_string()) {
    reply = (*doc)["reply"].get<std::string>();
  } else {
    reply = raw;
  }
  reply = std::string(trim(reply));
  if (reply.empty()) {
    throw Error(ErrorCode::Refusal, "empty simulated reply for role '" + role + "'");
  }
  return {role, std::move(reply), used_context};
}

}  // namespace demod

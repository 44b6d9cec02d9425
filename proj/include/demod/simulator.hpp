#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "demod/domain.hpp"
#include "demod/providers.hpp"

namespace demod {

inline constexpr std::string_view kContextStart =
    "The start of the interaction context between the user and the selected role";
inline constexpr std::string_view kContextEnd =
    "The end of the interaction context between the user and the selected role";
inline constexpr std::string_view kNoContextNotice =
    "No interaction context is available between the user and the selected "
    "role. Follow the rules without the context.";

struct SimulatorConfig {
  std::vector<std::string> generic_roles = {"parent", "friend", "stranger"};
  std::size_t max_comments = 20;
  std::size_t context_char_budget = 4000;
  double temperature = 0.7;
  std::string expression_style =
      "Write one or two short, natural sentences in the first person, in the "
      "same language as the post.";
  // Template with {post}, {role} and {context}; built-in default when unset.
  std::optional<std::filesystem::path> template_path;
};

const std::string& default_simulation_template();

// Newest suffix of `comments` holding at most max_comments items whose total
// length in code points stays within char_budget.
std::vector<Comment> select_context(const std::vector<Comment>& comments,
                                    std::size_t max_comments,
                                    std::size_t char_budget);

std::size_t utf8_length(std::string_view s);

class Simulator {
 public:
  Simulator(std::shared_ptr<ChatProvider> chat, SimulatorConfig config = {});

  // Generic roles followed by peers from the profile, sorted. Errors:
  // Unauthorized without an active interaction_contexts grant.
  std::vector<std::string> list_roles(const UserProfile& profile,
                                      const AuthGrant& grant) const;

  ChatRequest build_simulation_prompt(const Post& post, const std::string& role,
                                      const std::vector<Comment>& context) const;

  // Errors: Unauthorized, UnknownRole, provider errors (message names the
  // role), Refusal on an empty reply.
  SimulationResult simulate(const Post& post, const std::string& role,
                            const UserProfile& profile, const AuthGrant& grant) const;

  const SimulatorConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<ChatProvider> chat_;
  SimulatorConfig config_;
  std::string template_;
};

}  // namespace demod

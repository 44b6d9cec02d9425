#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace demod {

// Single-pass substitution of {name} placeholders. Substituted values are not
// rescanned, so user text containing "{topic}" stays literal. Unknown
// placeholders are left as written.
std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& values);

std::string read_text_file(const std::filesystem::path& path);

// Finds the outermost JSON object in model output, tolerating code fences
// and surrounding prose. Returns nullopt if nothing parses as an object.
std::optional<nlohmann::json> extract_json_object(std::string_view raw);

// Removes every occurrence of `marker` from `text`.
std::string strip_marker(std::string text, std::string_view marker);

}  // namespace demod

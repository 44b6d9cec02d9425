#include "demod/prompt.hpp"

#include <fstream>
#include <sstream>

#include "demod/error.hpp"

namespace demod {

std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{') {
      const auto close = tpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto it = values.find(std::string(tpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tpl[i++];
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<nlohmann::json> extract_json_object(std::string_view raw) {
  const auto first = raw.find('{');
  const auto last = raw.rfind('}');
  if (first == std::string_view::npos || last == std::string_view::npos ||
      last < first) {
    return std::nullopt;
  }
  auto doc = nlohmann::json::parse(raw.substr(first, last - first + 1), nullptr,
                                   /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  return doc;
}

std::string strip_marker(std::string text, std::string_view marker) {
  if (marker.empty()) return text;
  for (auto pos = text.find(marker); pos != std::string::npos;
       pos = text.find(marker, pos)) {
    text.erase(pos, marker.size());
  }
  return text;
}

}  // namespace demod

#pragma once

#include <sstream>
#include <string>

#include "demod/providers.hpp"

namespace demod::golden {

inline std::string render(const ChatRequest& r) {
  std::ostringstream out;
  out << "=== system\n" << r.system_text << "\n=== user\n" << r.user_text
      << "\n=== schema\n" << r.output_schema_hint << "\n=== tag\n" << r.tag
      << "\n=== temperature\n" << r.temperature << "\n";
  return out.str();
}

}  // namespace demod::golden

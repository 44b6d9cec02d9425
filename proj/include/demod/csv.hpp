#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace demod {

// RFC 4180 records: quoted fields may hold commas, doubled quotes and line
// breaks. Errors: DatasetParse on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Quotes a field when it holds a comma, quote or line break.
std::string csv_field(std::string_view value);

std::string csv_row(const std::vector<std::string>& fields);

}  // namespace demod

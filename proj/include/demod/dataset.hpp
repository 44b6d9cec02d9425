#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "demod/domain.hpp"

namespace demod {

struct Sample {
  std::size_t index = 0;
  Verdict label = Verdict::Nontoxic;
  std::string text;
  std::optional<std::string> topic;
  std::optional<double> score;  // precomputed toxicity score, if the file has one
};

// CSV with a required header naming at least `label` and `text`; optional
// `topic` and `score` columns. Labels: 1/0, toxic/nontoxic, Y/N.
// Errors: DatasetParse (missing file, missing columns, bad label, no rows).
std::vector<Sample> parse_dataset(std::string_view csv_text);
std::vector<Sample> load_dataset(const std::filesystem::path& path);

std::vector<Post> to_posts(const std::vector<Sample>& samples);

}  // namespace demod

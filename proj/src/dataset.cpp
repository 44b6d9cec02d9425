#include "demod/dataset.hpp"

#include <algorithm>

#include "demod/csv.hpp"
#include "demod/error.hpp"
#include "demod/prompt.hpp"

namespace demod {

namespace {

std::optional<Verdict> parse_label(std::string_view raw) {
  const auto v = ascii_lower(trim(raw));
  if (v == "1" || v == "toxic" || v == "y" || v == "offensive") return Verdict::Toxic;
  if (v == "0" || v == "nontoxic" || v == "n" || v == "non-offensive") return Verdict::Nontoxic;
  return std::nullopt;
}

}  // namespace

std::vector<Sample> parse_dataset(std::string_view csv_text) {
  const auto rows = parse_csv(csv_text);
  if (rows.empty()) throw Error(ErrorCode::DatasetParse, "dataset is empty");

  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (ascii_lower(trim(header[i])) == name) return i;
    }
    return std::nullopt;
  };
  const auto label_col = column("label");
  const auto text_col = column("text");
  const auto topic_col = column("topic");
  const auto score_col = column("score");
  if (!label_col || !text_col) {
    throw Error(ErrorCode::DatasetParse, "dataset header must name label and text columns");
  }

  std::vector<Sample> samples;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto line = std::to_string(r + 1);
    if (row.size() <= std::max(*label_col, *text_col)) {
      throw Error(ErrorCode::DatasetParse, "row " + line + " has too few fields");
    }
    Sample s;
    s.index = samples.size();
    const auto label = parse_label(row[*label_col]);
    if (!label) {
      throw Error(ErrorCode::DatasetParse, "row " + line + ": bad label '" + row[*label_col] + "'");
    }
    s.label = *label;
    s.text = row[*text_col];
    if (topic_col && *topic_col < row.size() && !trim(row[*topic_col]).empty()) {
      s.topic = std::string(trim(row[*topic_col]));
    }
    if (score_col && *score_col < row.size() && !trim(row[*score_col]).empty()) {
      try {
        s.score = std::stod(row[*score_col]);
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::DatasetParse, "row " + line + ": bad score");
      }
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw Error(ErrorCode::DatasetParse, "dataset has no rows");
  return samples;
}

std::vector<Sample> load_dataset(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::DatasetParse, "cannot read dataset " + path.string());
  }
  return parse_dataset(text);
}

std::vector<Post> to_posts(const std::vector<Sample>& samples) {
  std::vector<Post> posts;
  posts.reserve(samples.size());
  for (const auto& s : samples) posts.push_back({s.text, s.topic, {}});
  return posts;
}

}  // namespace demod

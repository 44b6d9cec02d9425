#include "demod/providers.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "demod/error.hpp"

namespace demod {

void validate(const ChatRequest& request) {
  if (request.system_text.empty() || request.user_text.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "chat request needs non-empty system and user text");
  }
  if (!(request.temperature >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "temperature must be >= 0");
  }
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

LexiconClassifier::LexiconClassifier(
    std::unordered_map<std::string, double> weights, double bias,
    double threshold, std::shared_ptr<const Tokenizer> tokenizer)
    : weights_(std::move(weights)),
      bias_(bias),
      threshold_(threshold),
      tokenizer_(std::move(tokenizer)) {
  if (!tokenizer_) tokenizer_ = std::make_shared<DefaultTokenizer>();
}

LexiconClassifier LexiconClassifier::from_file(
    const std::filesystem::path& path, double bias, double threshold,
    std::shared_ptr<const Tokenizer> tokenizer) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot open lexicon file " + path.string());
  }
  std::unordered_map<std::string, double> weights;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected token<TAB>weight");
    }
    try {
      std::size_t used = 0;
      const auto value = line.substr(tab + 1);
      const double w = std::stod(value, &used);
      if (!trim(value.substr(used)).empty()) throw std::invalid_argument("trailing");
      weights[ascii_lower(line.substr(0, tab))] = w;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ":" + std::to_string(line_no) +
                      ": bad weight");
    }
  }
  return LexiconClassifier(std::move(weights), bias, threshold,
                           std::move(tokenizer));
}

double LexiconClassifier::weight(std::string_view token) const {
  const auto it = weights_.find(ascii_lower(token));
  return it == weights_.end() ? 0.0 : it->second;
}

ClassifierScore LexiconClassifier::classify(std::string_view text) const {
  if (text.empty()) throw Error(ErrorCode::EmptyInput, "cannot classify empty text");
  double z = bias_;
  for (const auto& t : tokenizer_->tokenize(text)) z += weight(t.text);
  ClassifierScore s;
  s.toxic_probability = logistic(z);
  s.label = s.toxic_probability > threshold_ ? Verdict::Toxic : Verdict::Nontoxic;
  return s;
}

std::vector<TokenContribution> contributions(std::string_view text,
                                             const ToxicityClassifier& classifier,
                                             const Tokenizer& tokenizer,
                                             AttributionTarget target) {
  const auto tokens = tokenizer.tokenize(text);
  if (tokens.empty()) {
    throw Error(ErrorCode::EmptyInput, "text has no tokens to attribute");
  }
  const double full = classifier.classify(text).toxic_probability;

  std::vector<TokenContribution> out;
  out.reserve(tokens.size());
  double max_abs = 0.0;
  std::string occluded;
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    const auto& span = tokens[j].span;
    occluded.assign(text.substr(0, span.begin));
    occluded += ' ';
    occluded.append(text.substr(span.end));
    const double without = classifier.classify(occluded).toxic_probability;
    const double raw =
        target == AttributionTarget::Toxic ? full - without : without - full;
    max_abs = std::max(max_abs, std::abs(raw));
    out.push_back({tokens[j].text, j, raw, 0.0});
  }
  if (max_abs > 0.0) {
    for (auto& c : out) c.normalized_value = c.raw_value / max_abs;
  }
  return out;
}

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) {
    throw Error(ErrorCode::InvalidArgument, "embedding dimension must be positive");
  }
}

EmbeddingTable EmbeddingTable::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot open embedding file " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": missing header");
  }
  std::size_t dim = 0;
  try {
    dim = std::stoul(std::string(trim(line)));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": bad header");
  }
  EmbeddingTable table(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected token<TAB>values");
    }
    std::istringstream values(line.substr(tab + 1));
    std::vector<double> v;
    double x = 0.0;
    while (values >> x) v.push_back(x);
    if (!values.eof() || v.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(dim) + " values");
    }
    table.add(line.substr(0, tab), std::move(v));
  }
  return table;
}

void EmbeddingTable::add(std::string token, std::vector<double> vector) {
  if (vector.size() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch,
                "embedding for '" + token + "' has wrong dimension");
  }
  table_.insert_or_assign(std::move(token), std::move(vector));
}

bool EmbeddingTable::contains(std::string_view token) const {
  return table_.count(std::string(token)) > 0;
}

std::vector<double> EmbeddingTable::embed(std::string_view token) const {
  const auto it = table_.find(std::string(token));
  if (it != table_.end()) return it->second;
  return fallback_vector(token, dimension_);
}

std::vector<double> EmbeddingTable::fallback_vector(std::string_view token,
                                                    std::size_t dimension) {
  constexpr std::uint64_t kOffset = 14695981039346656037ull;
  constexpr std::uint64_t kPrime = 1099511628211ull;
  std::uint64_t seed = kOffset;
  for (unsigned char c : token) {
    seed ^= c;
    seed *= kPrime;
  }
  std::vector<double> v(dimension);
  for (std::size_t i = 0; i < dimension; ++i) {
    std::uint64_t h = seed;
    for (int shift = 0; shift < 64; shift += 8) {
      h ^= (static_cast<std::uint64_t>(i) >> shift) & 0xFF;
      h *= kPrime;
    }
    // Top 53 bits -> [0, 1] -> [-1, 1].
    const double unit = static_cast<double>(h >> 11) / 9007199254740991.0;
    v[i] = 2.0 * unit - 1.0;
  }
  return v;
}

}  // namespace demod

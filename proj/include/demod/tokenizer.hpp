#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace demod {

// Half-open byte range into a UTF-8 string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const Span&) const = default;
};

struct Token {
  std::string text;
  Span span;

  bool operator==(const Token&) const = default;
};

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<Token> tokenize(std::string_view text) const = 0;
};

// Word units for alphabetic scripts, one unit per character for Han and kana.
// Whitespace, punctuation and symbols separate units and are not emitted.
// An apostrophe between two letters stays inside the word ("didn't").
class DefaultTokenizer final : public Tokenizer {
 public:
  std::vector<Token> tokenize(std::string_view text) const override;
};

// ASCII lowercase; other bytes unchanged.
std::string ascii_lower(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace demod

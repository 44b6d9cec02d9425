#include "demod/tokenizer.hpp"

#include <cctype>

namespace demod {
namespace {

enum class CharClass { Separator, Word, Ideograph, Apostrophe };

struct Decoded {
  char32_t cp;
  std::size_t len;
};

// Invalid sequences decode as one byte of U+FFFD.
Decoded decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + len > s.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

bool is_ideograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2FA1F) ||
         (cp >= 0x3040 && cp <= 0x30FF);
}

bool is_non_ascii_separator(char32_t cp) {
  if (cp == 0xFFFD) return true;
  if (cp >= 0x80 && cp <= 0xBF) return true;  // C1 controls, Latin-1 punctuation
  if (cp == 0xD7 || cp == 0xF7) return true;
  if (cp >= 0x2000 && cp <= 0x2BFF) return true;  // punctuation, arrows, symbols
  if (cp >= 0x3000 && cp <= 0x303F) return true;  // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return true;
  if (cp >= 0xFF00 && cp <= 0xFFEF) {
    const bool fullwidth_alnum = (cp >= 0xFF10 && cp <= 0xFF19) ||
                                 (cp >= 0xFF21 && cp <= 0xFF3A) ||
                                 (cp >= 0xFF41 && cp <= 0xFF5A);
    return !fullwidth_alnum;
  }
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return true;  // emoji
  return false;
}

CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    if (std::isalnum(static_cast<int>(cp))) return CharClass::Word;
    if (cp == '\'') return CharClass::Apostrophe;
    return CharClass::Separator;
  }
  if (cp == 0x2019) return CharClass::Apostrophe;
  if (is_ideograph(cp)) return CharClass::Ideograph;
  if (is_non_ascii_separator(cp)) return CharClass::Separator;
  return CharClass::Word;
}

}  // namespace

std::vector<Token> DefaultTokenizer::tokenize(std::string_view text) const {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t word_begin = 0;
  bool in_word = false;

  auto close_word = [&](std::size_t end) {
    if (in_word) {
      out.push_back({std::string(text.substr(word_begin, end - word_begin)),
                     {word_begin, end}});
      in_word = false;
    }
  };

  while (i < text.size()) {
    const auto d = decode(text, i);
    switch (classify(d.cp)) {
      case CharClass::Word:
        if (!in_word) {
          in_word = true;
          word_begin = i;
        }
        break;
      case CharClass::Apostrophe: {
        // Joins only when both neighbours are word characters.
        const std::size_t next = i + d.len;
        const bool joins = in_word && next < text.size() &&
                           classify(decode(text, next).cp) == CharClass::Word;
        if (!joins) close_word(i);
        break;
      }
      case CharClass::Ideograph:
        close_word(i);
        out.push_back({std::string(text.substr(i, d.len)), {i, i + d.len}});
        break;
      case CharClass::Separator:
        close_word(i);
        break;
    }
    i += d.len;
  }
  close_word(text.size());
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace demod

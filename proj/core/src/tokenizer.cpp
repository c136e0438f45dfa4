#include "qpp/tokenizer.hpp"

#include <fstream>

#include "qpp/error.hpp"
#include "qpp/porter_stemmer.hpp"

namespace qpp {

namespace {

// Decodes one UTF-8 sequence starting at text[pos]. Malformed bytes decode to
// U+FFFD and consume a single byte.
char32_t decode_utf8(std::string_view text, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  const unsigned char lead = byte(pos);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + static_cast<std::size_t>(extra) >= text.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i <= extra; ++i) {
    const unsigned char cont = byte(pos + static_cast<std::size_t>(i));
    if ((cont & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  pos += static_cast<std::size_t>(extra) + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// ASCII letters and digits are word characters. Outside ASCII everything is
// treated as a letter except the punctuation, symbol and space blocks below.
bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  if (cp <= 0xBF) return false;                    // C1 controls, Latin-1 punctuation
  if (cp == 0xD7 || cp == 0xF7) return false;      // multiplication, division signs
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // general punctuation .. misc symbols
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp == 0xFEFF || cp == 0xFFFD) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  return true;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0x80) return cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x100 && cp <= 0x17E) {
    // Latin Extended-A alternates upper/lower case pairs; the parity flips in
    // the U+0139..U+0148 and U+0179..U+017E runs.
    const bool odd_upper = (cp >= 0x139 && cp <= 0x148) || cp >= 0x179;
    if (cp == 0x138 || cp == 0x149) return cp;
    const bool upper = odd_upper ? (cp % 2 == 1) : (cp % 2 == 0);
    return upper ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

} // namespace

std::vector<std::string> TokenizationConfig::bundled_stopwords() {
  // Lucene's classic English stop set.
  return {"a",    "an",   "and",   "are",  "as",   "at",    "be",    "but",  "by",   "for",  "if",
          "in",   "into", "is",    "it",   "no",   "not",   "of",    "on",   "or",   "such", "that",
          "the",  "their", "then", "there", "these", "they", "this", "to",   "was",  "will", "with"};
}

std::vector<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open stopword file: " + path.string());
  }
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    words.push_back(line.substr(start));
  }
  return words;
}

Tokenizer::Tokenizer(TokenizationConfig config) : config_(std::move(config)) {
  if (config_.remove_stopwords) {
    for (const auto& w : config_.stopwords) {
      // Stopwords are matched after normalization, so normalize the list too.
      std::string lowered;
      std::size_t pos = 0;
      while (pos < w.size()) append_utf8(lowered, to_lower(decode_utf8(w, pos)));
      stopwords_.insert(std::move(lowered));
    }
  }
}

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (current.empty()) return;
    if (!config_.remove_stopwords || !stopwords_.contains(current)) {
      tokens.push_back(config_.stem ? porter_stem(current) : current);
    }
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = decode_utf8(text, pos);
    if (is_word_char(cp)) {
      append_utf8(current, to_lower(cp));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

} // namespace qpp

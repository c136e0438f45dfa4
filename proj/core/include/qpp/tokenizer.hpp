#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace qpp {

/// Analyzer settings. The same configuration must be used for the corpus and
/// for the queries scored against it; CorpusStats stores the one it was built
/// with.
struct TokenizationConfig {
  bool remove_stopwords = true;
  bool stem = false;
  /// Active stopword list; defaults to the bundled English list.
  std::vector<std::string> stopwords = bundled_stopwords();

  static std::vector<std::string> bundled_stopwords();

  friend bool operator==(const TokenizationConfig&, const TokenizationConfig&) = default;
};

/// One word per line, UTF-8. Blank lines and lines starting with '#' are skipped.
std::vector<std::string> load_stopwords(const std::filesystem::path& path);

class Tokenizer {
public:
  explicit Tokenizer(TokenizationConfig config = {});

  /// Lowercases, splits on every non-alphanumeric code point, drops
  /// stopwords and optionally applies the Porter stemmer.
  std::vector<std::string> tokenize(std::string_view text) const;

  const TokenizationConfig& config() const noexcept { return config_; }

private:
  TokenizationConfig config_;
  std::unordered_set<std::string> stopwords_;
};

inline std::vector<std::string> tokenize(std::string_view text, const TokenizationConfig& config) {
  return Tokenizer(config).tokenize(text);
}

} // namespace qpp

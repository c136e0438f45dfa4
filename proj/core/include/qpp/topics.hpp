#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qpp/lm_scoring.hpp"
#include "qpp/tokenizer.hpp"

namespace qpp {

/// Topic texts plus their tokenized queries. The tokenizer configuration is
/// recorded so it can be checked against the corpus.
struct TopicSet {
  std::map<std::string, std::string, std::less<>> texts;
  std::map<std::string, Query, std::less<>> queries;
  TokenizationConfig tokenization;

  static TopicSet from_texts(std::map<std::string, std::string, std::less<>> texts, TokenizationConfig tokenization);

  std::vector<std::string> ids() const;
  std::size_t size() const noexcept { return texts.size(); }
  bool contains(std::string_view id) const { return texts.contains(id); }
};

inline TopicSet TopicSet::from_texts(std::map<std::string, std::string, std::less<>> texts,
                                     TokenizationConfig tokenization) {
  TopicSet set;
  const Tokenizer tokenizer(tokenization);
  for (const auto& [id, text] : texts) {
    set.queries.emplace(id, Query::from_tokens(id, tokenizer.tokenize(text)));
  }
  set.texts = std::move(texts);
  set.tokenization = std::move(tokenization);
  return set;
}

inline std::vector<std::string> TopicSet::ids() const {
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const auto& [id, text] : texts) out.push_back(id);
  return out;
}

} // namespace qpp

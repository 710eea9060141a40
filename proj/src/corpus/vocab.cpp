#include "graphdst/vocab.hpp"

#include "graphdst/errors.hpp"

namespace gdst {

Vocabulary::Vocabulary() {
  for (auto t : kSpecialTokens) add(std::string(t));
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < kSpecialTokens.size()) throw ValidationError("vocabulary lacks special tokens");
  for (std::size_t i = 0; i < kSpecialTokens.size(); ++i) {
    if (tokens[i] != kSpecialTokens[i]) {
      throw ValidationError("vocabulary special token " + std::to_string(i) + " is '" + tokens[i] +
                            "', expected '" + std::string(kSpecialTokens[i]) + "'");
    }
  }
  Vocabulary v;
  for (std::size_t i = kSpecialTokens.size(); i < tokens.size(); ++i) {
    if (v.contains(tokens[i])) throw ValidationError("duplicate vocabulary token '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  return v;
}

TokenId Vocabulary::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.push_back(token);
  ids_.emplace(token, id);
  return id;
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.count(std::string(token)) != 0;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw ValidationError("token id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::vector<std::string> Vocabulary::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto i : ids) out.push_back(token(i));
  return out;
}

Vocabulary build_vocab(std::span<const Dialogue> corpus, const Schema& schema) {
  if (corpus.empty()) throw ValidationError("build_vocab: empty corpus");
  Vocabulary v;
  for (const auto& d : schema.domains()) v.add(d);
  for (const auto& s : schema.slot_names()) v.add(s);
  for (std::size_t j = 0; j < schema.pair_count(); ++j) {
    for (const auto& value : schema.value_pool(j)) {
      for (const auto& t : tokenize(value)) v.add(t);
    }
  }
  for (const auto& dialogue : corpus) {
    for (const auto& turn : dialogue.turns) {
      for (const auto& t : turn.system_utterance) v.add(t);
      for (const auto& t : turn.user_utterance) v.add(t);
      for (const auto& value : turn.gold_state.values) {
        if (!value.is_text()) continue;
        for (const auto& t : tokenize(value.str())) v.add(t);
      }
    }
  }
  return v;
}

}  // namespace gdst

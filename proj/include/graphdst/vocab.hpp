#pragma once

#include "graphdst/dialogue.hpp"
#include "graphdst/schema.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gdst {

using TokenId = std::int64_t;

/// Token <-> id bijection. Special tokens always occupy ids 0..8 in the order
/// of kSpecialTokens.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kCls = 1;
  static constexpr TokenId kSep = 2;
  static constexpr TokenId kSlot = 3;
  static constexpr TokenId kEos = 4;
  static constexpr TokenId kUnk = 5;
  static constexpr TokenId kNull = 6;
  static constexpr TokenId kDontCare = 7;
  static constexpr TokenId kDash = 8;
  static constexpr std::array<std::string_view, 9> kSpecialTokens = {
      "[PAD]", "[CLS]", "[SEP]", "[SLOT]", "[EOS]", "[UNK]", "[NULL]", "[DONTCARE]", "-"};

  Vocabulary();
  /// Rebuilds from a full id-ordered token list (e.g. a checkpoint).
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  /// Returns the id of `token`, inserting it if new.
  TokenId add(const std::string& token);
  /// [UNK] for unseen tokens.
  TokenId id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<TokenId> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

/// Specials, then schema tokens (domains, slot names, pool value tokens in
/// schema order), then corpus tokens by first occurrence.
Vocabulary build_vocab(std::span<const Dialogue> corpus, const Schema& schema);

}  // namespace gdst

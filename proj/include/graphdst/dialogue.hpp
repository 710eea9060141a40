#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gdst {

/// Lowercases ASCII and splits on whitespace.
std::vector<std::string> tokenize(std::string_view text);
std::string join_tokens(const std::vector<std::string>& tokens);
/// tokenize() then join_tokens(): the canonical form of a value string.
std::string normalize(std::string_view text);

/// The value of one (domain, slot) pair: NULL, DONTCARE or a nonempty text.
class SlotValue {
 public:
  enum class Kind : std::uint8_t { kNull, kDontCare, kText };

  SlotValue() = default;
  static SlotValue null() { return SlotValue(); }
  static SlotValue dontcare() {
    SlotValue v;
    v.kind_ = Kind::kDontCare;
    return v;
  }
  /// Normalises `text`; an empty result is rejected.
  static SlotValue text(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_null() const { return kind_ == Kind::kNull; }
  bool is_dontcare() const { return kind_ == Kind::kDontCare; }
  bool is_text() const { return kind_ == Kind::kText; }
  /// Holds a value that puts the pair into the state graph.
  bool is_filled() const { return kind_ == Kind::kText; }
  const std::string& str() const { return text_; }

  /// "dontcare" for DONTCARE, the text otherwise, "" for NULL.
  std::string render() const;
  /// Inverse of render() for non-NULL values.
  static SlotValue parse(std::string_view rendered);

  friend bool operator==(const SlotValue&, const SlotValue&) = default;

 private:
  Kind kind_ = Kind::kNull;
  std::string text_;
};

inline constexpr std::string_view kDontCareText = "dontcare";

/// Values of all J pairs, indexed in schema order.
struct DialogueState {
  std::vector<SlotValue> values;

  static DialogueState empty(std::size_t pair_count) {
    return DialogueState{std::vector<SlotValue>(pair_count)};
  }
  std::size_t size() const { return values.size(); }
  const SlotValue& operator[](std::size_t j) const { return values[j]; }
  SlotValue& operator[](std::size_t j) { return values[j]; }

  friend bool operator==(const DialogueState&, const DialogueState&) = default;
};

struct DialogueTurn {
  std::vector<std::string> system_utterance;
  std::vector<std::string> user_utterance;
  DialogueState gold_state;

  friend bool operator==(const DialogueTurn&, const DialogueTurn&) = default;
};

struct Dialogue {
  std::string dialogue_id;
  std::vector<DialogueTurn> turns;

  friend bool operator==(const Dialogue&, const Dialogue&) = default;
};

}  // namespace gdst

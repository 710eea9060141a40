#include "graphdst/dialogue.hpp"

#include "graphdst/errors.hpp"

#include <cctype>

namespace gdst {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string normalize(std::string_view text) { return join_tokens(tokenize(text)); }

SlotValue SlotValue::text(std::string_view text) {
  SlotValue v;
  v.kind_ = Kind::kText;
  v.text_ = normalize(text);
  if (v.text_.empty()) throw ValidationError("slot value text is empty");
  return v;
}

std::string SlotValue::render() const {
  switch (kind_) {
    case Kind::kNull: return "";
    case Kind::kDontCare: return std::string(kDontCareText);
    case Kind::kText: return text_;
  }
  return "";
}

SlotValue SlotValue::parse(std::string_view rendered) {
  const std::string n = normalize(rendered);
  if (n == kDontCareText) return dontcare();
  return text(n);
}

}  // namespace gdst

#include "graphdst/corpus.hpp"

#include "graphdst/errors.hpp"

#include <fstream>
#include <sstream>

namespace gdst {

nlohmann::ordered_json dialogue_to_json(const Dialogue& dialogue, const Schema& schema) {
  nlohmann::ordered_json j;
  j["dialogue_id"] = dialogue.dialogue_id;
  nlohmann::ordered_json turns = nlohmann::ordered_json::array();
  for (const auto& turn : dialogue.turns) {
    nlohmann::ordered_json t;
    t["system"] = join_tokens(turn.system_utterance);
    t["user"] = join_tokens(turn.user_utterance);
    nlohmann::ordered_json state = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < turn.gold_state.size(); ++p) {
      const auto& v = turn.gold_state[p];
      if (v.is_null()) continue;
      state.push_back({schema.pair(p).domain, schema.pair(p).slot, v.render()});
    }
    t["state"] = state;
    turns.push_back(std::move(t));
  }
  j["turns"] = turns;
  return j;
}

Dialogue dialogue_from_json(const nlohmann::json& j, const Schema& schema) {
  if (!j.is_object()) throw ValidationError("dialogue record is not an object");
  Dialogue d;
  d.dialogue_id = j.at("dialogue_id").get<std::string>();
  for (const auto& t : j.at("turns")) {
    DialogueTurn turn;
    turn.system_utterance = tokenize(t.at("system").get<std::string>());
    turn.user_utterance = tokenize(t.at("user").get<std::string>());
    turn.gold_state = DialogueState::empty(schema.pair_count());
    std::vector<bool> seen(schema.pair_count(), false);
    for (const auto& entry : t.at("state")) {
      if (!entry.is_array() || entry.size() != 3) {
        throw ValidationError("state entries must be [domain, slot, value]");
      }
      const auto domain = entry[0].get<std::string>();
      const auto slot = entry[1].get<std::string>();
      const auto p = schema.pair_index(domain, slot);
      if (!p) throw ValidationError("unknown (domain, slot) pair '" + domain + "-" + slot + "'");
      if (seen[*p]) throw ValidationError("pair '" + domain + "-" + slot + "' listed twice");
      seen[*p] = true;
      turn.gold_state[*p] = SlotValue::parse(entry[2].get<std::string>());
    }
    d.turns.push_back(std::move(turn));
  }
  return d;
}

std::vector<Dialogue> parse_corpus(std::istream& in, const Schema& schema) {
  std::vector<Dialogue> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");
    for (const char* key : {"dialogue_id", "turns"}) {
      if (!j.contains(key)) throw ParseError(line_no, std::string("missing \"") + key + "\" key");
    }
    if (!j["turns"].is_array()) throw ParseError(line_no, "\"turns\" is not an array");
    for (const auto& t : j["turns"]) {
      if (!t.is_object()) throw ParseError(line_no, "turn is not an object");
      for (const char* key : {"system", "user", "state"}) {
        if (!t.contains(key)) throw ParseError(line_no, std::string("missing \"") + key + "\" key");
      }
    }
    try {
      out.push_back(dialogue_from_json(j, schema));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

void write_corpus(std::ostream& out, const std::vector<Dialogue>& corpus, const Schema& schema) {
  for (const auto& d : corpus) out << dialogue_to_json(d, schema).dump() << "\n";
}

std::vector<Dialogue> load_corpus(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path.string() + "'");
  return parse_corpus(in, schema);
}

void save_corpus(const std::filesystem::path& path, const std::vector<Dialogue>& corpus,
                 const Schema& schema) {
  std::ostringstream os;
  write_corpus(os, corpus, schema);
  write_file_atomic(path, os.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace gdst

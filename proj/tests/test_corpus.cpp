#include "graphdst/corpus.hpp"
#include "graphdst/errors.hpp"
#include "graphdst/vocab.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace gdst;

namespace {

Schema tiny_schema() {
  return Schema({"hotel"}, {{"hotel", {"name"}}}, {{{"hotel", "name"}, {"acorn house", "cityroomz"}}},
                {});
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty()) return true;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::string corpus_text(const std::vector<Dialogue>& corpus, const Schema& schema) {
  std::ostringstream os;
  write_corpus(os, corpus, schema);
  return os.str();
}

}  // namespace

TEST_CASE("tokenisation lowercases and splits on whitespace") {
  CHECK(tokenize("  Acorn   HOUSE\tplease ") == std::vector<std::string>{"acorn", "house", "please"});
  CHECK(tokenize("").empty());
  CHECK(normalize(" The  Lodge ") == "the lodge");
}

TEST_CASE("slot values") {
  CHECK(SlotValue().is_null());
  CHECK(SlotValue::dontcare().is_dontcare());
  CHECK_FALSE(SlotValue::dontcare().is_filled());
  SlotValue v = SlotValue::text("Acorn  House");
  CHECK(v.is_text());
  CHECK(v.str() == "acorn house");
  CHECK(SlotValue::parse(v.render()) == v);
  CHECK(SlotValue::parse("dontcare") == SlotValue::dontcare());
  CHECK_THROWS_AS(SlotValue::text("   "), Error);
}

TEST_CASE("schema validation names the offending field") {
  SUBCASE("empty pool") {
    try {
      Schema({"hotel"}, {{"hotel", {"name"}}}, {{{"hotel", "name"}, {}}}, {});
      FAIL("expected a schema error");
    } catch (const SchemaError& e) {
      CHECK(e.field().find("hotel") != std::string::npos);
    }
  }
  SUBCASE("whitespace in a slot name") {
    CHECK_THROWS_AS(Schema({"hotel"}, {{"hotel", {"price range"}}},
                           {{{"hotel", "price range"}, {"cheap"}}}, {}),
                    SchemaError);
  }
  SUBCASE("negative transition weight") {
    CHECK_THROWS_AS(Schema({"hotel", "taxi"}, {{"hotel", {"name"}}, {"taxi", {"departure"}}},
                           {{{"hotel", "name"}, {"a"}}, {{"taxi", "departure"}, {"b"}}},
                           {{{"hotel", "taxi"}, -1.0}}),
                    SchemaError);
  }
  SUBCASE("missing pool") {
    CHECK_THROWS_AS(Schema({"hotel"}, {{"hotel", {"name", "area"}}}, {{{"hotel", "name"}, {"a"}}}, {}),
                    SchemaError);
  }
}

TEST_CASE("built-in schemas have the documented shapes") {
  const Schema d = default_schema();
  CHECK(d.domains().size() == 4);
  CHECK(d.slot_names().size() == 10);
  CHECK(d.pair_count() == 12);
  const Schema f = full_scale_schema();
  CHECK(f.domains().size() == 5);
  CHECK(f.slot_names().size() == 17);
  CHECK(f.pair_count() == 30);
  const Schema l = linked_value_schema();
  CHECK_FALSE(l.links().empty());
  CHECK_THROWS_AS(preset_schema("nope"), Error);

  SUBCASE("json round trip") {
    for (const Schema& s : {d, f, l}) {
      const Schema back = Schema::from_json(nlohmann::json::parse(s.to_json().dump()));
      CHECK(back.to_json().dump() == s.to_json().dump());
    }
  }
}

TEST_CASE("generation contract on the five-domain schema") {
  const Schema schema = full_scale_schema();
  const auto corpus = generate_corpus(schema, 1, 1, 7);
  REQUIRE(corpus.size() == 1);
  REQUIRE(corpus[0].turns.size() == 1);
  const auto& turn = corpus[0].turns[0];
  std::size_t filled = 0;
  for (std::size_t j = 0; j < schema.pair_count(); ++j) {
    if (!turn.gold_state[j].is_text()) continue;
    ++filled;
    CHECK(contains_run(turn.user_utterance, tokenize(turn.gold_state[j].str())));
  }
  CHECK(filled >= 1);
}

TEST_CASE("generation is deterministic") {
  const Schema schema = default_schema();
  CHECK(corpus_text(generate_corpus(schema, 20, 5, 3), schema) ==
        corpus_text(generate_corpus(schema, 20, 5, 3), schema));
  CHECK(corpus_text(generate_corpus(schema, 20, 5, 3), schema) !=
        corpus_text(generate_corpus(schema, 20, 5, 4), schema));
  CHECK_THROWS_AS(generate_corpus(schema, 1, 0, 3), SchemaError);
}

TEST_CASE("every introduced value is spelled out in the utterances so far") {
  for (const Schema& schema : {default_schema(), full_scale_schema(), linked_value_schema()}) {
    for (const auto& d : generate_corpus(schema, 200, 6, 11)) {
      std::vector<std::string> history;
      DialogueState prev = DialogueState::empty(schema.pair_count());
      for (const auto& t : d.turns) {
        history.insert(history.end(), t.system_utterance.begin(), t.system_utterance.end());
        history.insert(history.end(), t.user_utterance.begin(), t.user_utterance.end());
        for (std::size_t j = 0; j < schema.pair_count(); ++j) {
          if (t.gold_state[j].is_text() && !(t.gold_state[j] == prev[j])) {
            CHECK(contains_run(history, tokenize(t.gold_state[j].str())));
          }
        }
        prev = t.gold_state;
      }
    }
  }
}

TEST_CASE("turn counts and value pools") {
  const Schema schema = default_schema();
  for (const auto& d : generate_corpus(schema, 100, 6, 2)) {
    CHECK(d.turns.size() >= 3);
    CHECK(d.turns.size() <= 6);
    for (const auto& t : d.turns) {
      REQUIRE(t.gold_state.size() == schema.pair_count());
      for (std::size_t j = 0; j < schema.pair_count(); ++j) {
        if (!t.gold_state[j].is_text()) continue;
        const auto& pool = schema.value_pool(j);
        CHECK(std::find(pool.begin(), pool.end(), t.gold_state[j].str()) != pool.end());
      }
    }
  }
}

TEST_CASE("transition weights steer the domain sequence") {
  // Every move out of the hotel goes to the taxi.
  const Schema schema({"hotel", "restaurant", "taxi"},
                      {{"hotel", {"name"}}, {"restaurant", {"food"}}, {"taxi", {"departure"}}},
                      {{{"hotel", "name"}, {"acorn house", "cityroomz"}},
                       {{"restaurant", "food"}, {"thai", "indian"}},
                       {{"taxi", "departure"}, {"ely", "norwich"}}},
                      {{{"hotel", "taxi"}, 1.0},
                       {{"restaurant", "hotel"}, 1.0},
                       {{"taxi", "hotel"}, 1.0}});
  const auto corpus = generate_corpus(schema, 100, 3, 1);
  std::size_t multi = 0;
  std::size_t hotel_taxi = 0;
  for (const auto& d : corpus) {
    const auto& last = d.turns.back().gold_state;
    std::set<std::string> domains;
    for (std::size_t j = 0; j < schema.pair_count(); ++j) {
      if (last[j].is_filled()) domains.insert(schema.pair(j).domain);
    }
    if (domains.size() < 2) continue;
    ++multi;
    if (domains.count("hotel") && domains.count("taxi")) ++hotel_taxi;
  }
  REQUIRE(multi > 0);
  CHECK(static_cast<double>(hotel_taxi) / static_cast<double>(multi) > 0.5);
}

TEST_CASE("corpus io") {
  const Schema schema = default_schema();

  SUBCASE("round trip") {
    const auto corpus = generate_corpus(schema, 30, 6, 5);
    std::istringstream in(corpus_text(corpus, schema));
    CHECK(parse_corpus(in, schema) == corpus);
  }
  SUBCASE("empty input") {
    std::istringstream in("");
    CHECK(parse_corpus(in, schema).empty());
  }
  SUBCASE("one line with two turns") {
    std::istringstream in(
        R"({"dialogue_id": "d1", "turns": [{"system": "", "user": "i need a hotel in the north", "state": [["hotel", "area", "north"]]}, {"system": "ok", "user": "any stars", "state": [["hotel", "area", "north"], ["hotel", "stars", "dontcare"]]}]})"
        "\n");
    const auto corpus = parse_corpus(in, schema);
    REQUIRE(corpus.size() == 1);
    REQUIRE(corpus[0].turns.size() == 2);
    const std::size_t stars = *schema.pair_index("hotel", "stars");
    CHECK(corpus[0].turns[1].gold_state[stars].is_dontcare());
    CHECK(corpus[0].turns[0].user_utterance.size() == 7);
  }
  SUBCASE("missing state key names the line") {
    std::istringstream in(
        R"({"dialogue_id": "d1", "turns": [{"system": "", "user": "hi", "state": []}]})"
        "\n\n"
        R"({"dialogue_id": "d2", "turns": [{"system": "", "user": "hi"}]})"
        "\n");
    try {
      parse_corpus(in, schema);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("malformed json") {
    std::istringstream in("{not json\n");
    CHECK_THROWS_AS(parse_corpus(in, schema), ParseError);
  }
  SUBCASE("unknown pair") {
    std::istringstream in(
        R"({"dialogue_id": "d1", "turns": [{"system": "", "user": "hi", "state": [["spa", "name", "x"]]}]})"
        "\n");
    CHECK_THROWS_AS(parse_corpus(in, schema), ValidationError);
  }
}

TEST_CASE("vocabulary") {
  SUBCASE("specials, schema tokens, then corpus tokens") {
    const Schema schema = tiny_schema();
    Dialogue d{"d", {DialogueTurn{{}, {"hello"}, DialogueState::empty(1)}}};
    const std::vector<Dialogue> corpus = {d};
    const Vocabulary v = build_vocab(corpus, schema);
    std::vector<std::string> expected(Vocabulary::kSpecialTokens.begin(),
                                      Vocabulary::kSpecialTokens.end());
    for (const char* t : {"hotel", "name", "acorn", "house", "cityroomz", "hello"}) {
      expected.emplace_back(t);
    }
    CHECK(v.tokens() == expected);
    CHECK(v.id("[PAD]") == Vocabulary::kPad);
    CHECK(v.id("-") == Vocabulary::kDash);
    CHECK(v.id("never-seen") == Vocabulary::kUnk);
  }
  SUBCASE("bijection and round trip") {
    const Schema schema = default_schema();
    const auto corpus = generate_corpus(schema, 10, 4, 1);
    const Vocabulary v = build_vocab(corpus, schema);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v.id(v.token(static_cast<TokenId>(i))) == static_cast<TokenId>(i));
    }
    const auto tokens = tokenize("i need a hotel with name acorn house");
    CHECK(v.decode(v.encode(tokens)) == tokens);
    CHECK(Vocabulary::from_tokens(v.tokens()) == v);
  }
  SUBCASE("order of later turns does not matter when first occurrences agree") {
    const Schema schema = tiny_schema();
    auto turn = [](std::vector<std::string> user) {
      return DialogueTurn{{}, std::move(user), DialogueState::empty(1)};
    };
    Dialogue a{"a", {turn({"hello", "there"}), turn({"there", "hello"})}};
    Dialogue b{"b", {turn({"hello", "there"}), turn({"hello", "there", "hello"})}};
    const std::vector<Dialogue> c1 = {a, b};
    const std::vector<Dialogue> c2 = {b, a};
    CHECK(build_vocab(c1, schema) == build_vocab(c2, schema));
  }
  SUBCASE("empty corpus is rejected") {
    CHECK_THROWS_AS(build_vocab(std::span<const Dialogue>{}, tiny_schema()), Error);
  }
  SUBCASE("specials must lead a restored token list") {
    CHECK_THROWS_AS(Vocabulary::from_tokens({"hello"}), Error);
  }
}

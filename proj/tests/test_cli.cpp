#include "../tools/commands.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using gdst::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Scratch directory with a schema and two small corpora.
struct Workspace {
  fs::path dir;

  explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    REQUIRE(cli({"schema", "--preset", "default", "--out", p("schema.json")}).code == 0);
    REQUIRE(cli({"generate", "--schema", p("schema.json"), "--out", p("train.jsonl"),
                 "--dialogues", "6", "--max-turns", "3", "--seed", "1"})
                .code == 0);
    REQUIRE(cli({"generate", "--schema", p("schema.json"), "--out", p("test.jsonl"),
                 "--dialogues", "4", "--max-turns", "3", "--seed", "2"})
                .code == 0);
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string p(const std::string& name) const { return (dir / name).string(); }

  std::vector<std::string> train_args(const std::string& out) const {
    return {"train", "--schema", p("schema.json"), "--train", p("train.jsonl"), "--valid",
            p("test.jsonl"), "--out", p(out), "--seed", "4", "--epochs", "2", "--d-h", "16",
            "--layers", "2", "--heads", "2"};
  }
};

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"generate", "--schema", "x.json", "--out", "y.jsonl"}).code == 2);  // no seed
  CHECK(cli({"schema", "--preset", "nope", "--out", "/tmp/never.json"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("a missing schema is rejected before anything is written") {
  Workspace ws("graphdst_cli_missing");
  const std::string out = ws.p("out");
  const Result r = cli({"train", "--schema", ws.p("absent.json"), "--train", ws.p("train.jsonl"),
                        "--out", out, "--seed", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("absent.json") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
  CHECK(cli({"generate", "--schema", ws.p("absent.json"), "--out", ws.p("g.jsonl"), "--seed",
             "1"})
            .code == 2);
  CHECK_FALSE(fs::exists(ws.p("g.jsonl")));
}

TEST_CASE("generate is a pure function of its seed") {
  Workspace ws("graphdst_cli_generate");
  REQUIRE(cli({"generate", "--schema", ws.p("schema.json"), "--out", ws.p("again.jsonl"),
               "--dialogues", "6", "--max-turns", "3", "--seed", "1"})
              .code == 0);
  CHECK(slurp(ws.p("again.jsonl")) == slurp(ws.p("train.jsonl")));
  CHECK_FALSE(slurp(ws.p("test.jsonl")) == slurp(ws.p("train.jsonl")));
}

TEST_CASE("train, eval and predict") {
  Workspace ws("graphdst_cli_train");
  REQUIRE(cli(ws.train_args("run1")).code == 0);
  REQUIRE(cli(ws.train_args("run2")).code == 0);
  for (const char* f : {"checkpoint.json", "train_log.csv"}) {
    REQUIRE(fs::exists(ws.dir / "run1" / f));
    CHECK(slurp(ws.dir / "run1" / f) == slurp(ws.dir / "run2" / f));
  }
  const std::string ckpt = ws.p("run1/checkpoint.json");

  SUBCASE("eval writes deterministic metrics") {
    for (const char* out : {"eval1", "eval2"}) {
      const Result r = cli({"eval", "--schema", ws.p("schema.json"), "--checkpoint", ckpt,
                            "--test", ws.p("test.jsonl"), "--out", ws.p(out),
                            "--latency-repeats", "1"});
      REQUIRE(r.code == 0);
    }
    CHECK(slurp(ws.p("eval1/metrics.json")) == slurp(ws.p("eval2/metrics.json")));
    const auto m = nlohmann::json::parse(slurp(ws.p("eval1/metrics.json")));
    CHECK(m["dialogues"] == 4);
    CHECK(m["joint_goal_accuracy"].get<double>() <= m["slot_accuracy"].get<double>());
    CHECK(m["per_domain_joint_accuracy"].size() == 4);
    CHECK(fs::exists(ws.p("eval1/latency.json")));
  }
  SUBCASE("a checkpoint for another schema exits with 3") {
    REQUIRE(cli({"schema", "--preset", "full", "--out", ws.p("full.json")}).code == 0);
    const Result r = cli({"eval", "--schema", ws.p("full.json"), "--checkpoint", ckpt, "--test",
                          ws.p("test.jsonl")});
    CHECK(r.code == 3);
  }
  SUBCASE("predict emits one line per turn") {
    REQUIRE(cli({"predict", "--schema", ws.p("schema.json"), "--checkpoint", ckpt, "--dialogues",
                 ws.p("test.jsonl"), "--out", ws.p("pred.jsonl")})
                .code == 0);
    std::ifstream in(ws.p("pred.jsonl"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("dialogue_id"));
      CHECK(j["operations"].size() == 12);
      ++lines;
    }
    std::ifstream test(ws.p("test.jsonl"));
    std::size_t turns = 0;
    while (std::getline(test, line)) turns += nlohmann::json::parse(line)["turns"].size();
    CHECK(lines == turns);
  }
  SUBCASE("an empty dialogue file gives an empty prediction file") {
    std::ofstream(ws.p("empty.jsonl")).close();
    REQUIRE(cli({"predict", "--schema", ws.p("schema.json"), "--checkpoint", ckpt, "--dialogues",
                 ws.p("empty.jsonl"), "--out", ws.p("none.jsonl")})
                .code == 0);
    CHECK(fs::exists(ws.p("none.jsonl")));
    CHECK(slurp(ws.p("none.jsonl")).empty());
  }
}

TEST_CASE("gradcheck exit codes") {
  const std::vector<std::string> base = {"gradcheck", "--seed", "1", "--d-h", "8", "--layers",
                                         "2", "--heads", "2", "--samples", "4"};
  CHECK(cli(base).code == 0);
  auto faulty = base;
  faulty.insert(faulty.end(), {"--inject-fault", "sigmoid"});
  const Result r = cli(faulty);
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
  faulty.back() = "bogus";
  CHECK(cli(faulty).code == 2);
}

TEST_CASE("stats writes every row label") {
  Workspace ws("graphdst_cli_stats");
  const Result r = cli({"stats", "--schema", ws.p("schema.json"), "--train", ws.p("train.jsonl"),
                        "--test", ws.p("test.jsonl")});
  REQUIRE(r.code == 0);
  for (const char* label : {"# edges", "# nodes", "# domains", "# values", ">=2 domains",
                            ">=3 domains", "in dialog state"}) {
    CHECK(r.out.find(label) != std::string::npos);
  }
  CHECK(r.out.find("\ntrain,") != std::string::npos);
  CHECK(r.out.find("\ntest,") != std::string::npos);
}

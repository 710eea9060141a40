#include "graphdst/corpus.hpp"
#include "graphdst/errors.hpp"
#include "graphdst/model.hpp"

#include <fstream>
#include <sstream>

namespace gdst {

namespace {

constexpr const char* kFormat = "graphdst-checkpoint";
constexpr int kVersion = 1;

}  // namespace

std::string checkpoint_json(const GraphDst& model) {
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["config"] = model.config().to_json();
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& p : model.schema().pairs()) pairs.push_back(p.key());
  j["pairs"] = std::move(pairs);
  j["vocab"] = model.vocab().tokens();
  j["params"] = model.params().to_json();
  return j.dump() + "\n";
}

void save_checkpoint(const GraphDst& model, const std::filesystem::path& path) {
  write_file_atomic(path, checkpoint_json(model));
}

GraphDst load_checkpoint(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read checkpoint '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError("checkpoint '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    if (j.value("format", "") != kFormat) throw CheckpointError("not a graphdst checkpoint");
    if (j.value("version", 0) != kVersion) {
      throw CheckpointError("unsupported checkpoint version " + j["version"].dump());
    }
    std::vector<std::string> pairs = j.at("pairs").get<std::vector<std::string>>();
    if (pairs.size() != schema.pair_count()) {
      throw CheckpointError("checkpoint has " + std::to_string(pairs.size()) +
                            " slot pairs, schema has " + std::to_string(schema.pair_count()));
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (pairs[k] != schema.pair(k).key()) {
        throw CheckpointError("slot pair " + std::to_string(k) + " is '" + pairs[k] +
                              "' in the checkpoint but '" + schema.pair(k).key() +
                              "' in the schema");
      }
    }
    ModelConfig config = ModelConfig::from_json(nlohmann::json::parse(j.at("config").dump()));
    Vocabulary vocab = Vocabulary::from_tokens(j.at("vocab").get<std::vector<std::string>>());
    GraphDst model(config, schema, std::move(vocab), 0);
    model.params().load_json(j.at("params"));
    return model;
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError("checkpoint '" + path.string() + "': " + e.what());
  }
}

}  // namespace gdst

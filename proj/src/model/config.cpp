#include "graphdst/config.hpp"

#include "graphdst/errors.hpp"

namespace gdst {

std::string to_string(GraphQuery q) { return q == GraphQuery::kCls ? "cls" : "slot"; }

GraphQuery graph_query_from_string(const std::string& s) {
  if (s == "cls") return GraphQuery::kCls;
  if (s == "slot") return GraphQuery::kSlot;
  throw ValidationError("graph_query must be 'cls' or 'slot', got '" + s + "'");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("model config: " + what); };
  if (d_h <= 0 || n_heads <= 0 || d_h % n_heads != 0) fail("d_h must be a positive multiple of n_heads");
  if (n_layers < 1) fail("n_layers must be at least 1");
  if (d_ff < 1) fail("d_ff must be positive");
  if (n_graph_blocks < 1 || n_graph_blocks > 2) fail("n_graph_blocks must be 1 or 2");
  if (n_graph_blocks > n_layers) fail("n_graph_blocks exceeds n_layers");
  if (n_gcn_layers < 1 || n_gcn_layers > 2) fail("n_gcn_layers must be 1 or 2");
  if (max_seq_len < 4) fail("max_seq_len too small");
  if (max_decode_len < 1) fail("max_decode_len must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(init_scale > 0.0)) fail("init_scale must be positive");
}

nlohmann::ordered_json ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["d_h"] = d_h;
  j["n_heads"] = n_heads;
  j["n_layers"] = n_layers;
  j["d_ff"] = d_ff;
  j["graph_enabled"] = graph_enabled;
  j["n_graph_blocks"] = n_graph_blocks;
  j["n_gcn_layers"] = n_gcn_layers;
  j["graph_query"] = to_string(graph_query);
  j["update_placeholders"] = update_placeholders;
  j["max_seq_len"] = max_seq_len;
  j["max_decode_len"] = max_decode_len;
  j["dropout"] = dropout;
  j["init_scale"] = init_scale;
  j["vocab_size"] = vocab_size;
  return j;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) { return from_json(j, ModelConfig{}); }

ModelConfig ModelConfig::from_json(const nlohmann::json& j, ModelConfig c) {
  if (!j.is_object()) throw ValidationError("model config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "d_h") c.d_h = v.get<int>();
      else if (key == "n_heads") c.n_heads = v.get<int>();
      else if (key == "n_layers") c.n_layers = v.get<int>();
      else if (key == "d_ff") c.d_ff = v.get<int>();
      else if (key == "graph_enabled") c.graph_enabled = v.get<bool>();
      else if (key == "n_graph_blocks") c.n_graph_blocks = v.get<int>();
      else if (key == "n_gcn_layers") c.n_gcn_layers = v.get<int>();
      else if (key == "graph_query") c.graph_query = graph_query_from_string(v.get<std::string>());
      else if (key == "update_placeholders") c.update_placeholders = v.get<bool>();
      else if (key == "max_seq_len") c.max_seq_len = v.get<std::size_t>();
      else if (key == "max_decode_len") c.max_decode_len = v.get<std::size_t>();
      else if (key == "dropout") c.dropout = v.get<double>();
      else if (key == "init_scale") c.init_scale = v.get<double>();
      else if (key == "vocab_size") c.vocab_size = v.get<std::size_t>();
      else throw ValidationError("model config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model config: ") + e.what());
  }
  return c;
}

}  // namespace gdst

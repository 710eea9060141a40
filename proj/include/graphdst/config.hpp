#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>

namespace gdst {

/// Which vector queries the state graph for the copy gate.
enum class GraphQuery { kCls, kSlot };

std::string to_string(GraphQuery q);
GraphQuery graph_query_from_string(const std::string& s);

/// Architecture and variant switches. JSON keys match the field names.
struct ModelConfig {
  int d_h = 64;
  int n_heads = 4;
  int n_layers = 3;
  int d_ff = 256;
  /// When false the graph path is skipped entirely (the w/o-Graph baseline).
  bool graph_enabled = true;
  int n_graph_blocks = 1;
  int n_gcn_layers = 1;
  GraphQuery graph_query = GraphQuery::kCls;
  bool update_placeholders = false;
  std::size_t max_seq_len = 256;
  std::size_t max_decode_len = 6;
  double dropout = 0.1;
  double init_scale = 0.02;
  /// Filled in from the vocabulary when a model is built.
  std::size_t vocab_size = 0;

  /// Throws ValidationError on an inconsistent configuration.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static ModelConfig from_json(const nlohmann::json& j, ModelConfig base);
  static ModelConfig from_json(const nlohmann::json& j);
};

}  // namespace gdst

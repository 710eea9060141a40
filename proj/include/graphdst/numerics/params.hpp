#pragma once

#include "graphdst/numerics/tensor.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>

namespace gdst::nn {

/// Learning-rate group. Every trainable tensor belongs to exactly one.
enum class ParamGroup : std::uint8_t { kEncoder, kDecoder, kGraph };

std::string_view to_string(ParamGroup group);
ParamGroup param_group_from_string(std::string_view name);

struct Parameter {
  std::string name;
  ParamGroup group = ParamGroup::kEncoder;
  Matrix value;
  Matrix grad;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

using ParamId = std::size_t;

/// Insertion-ordered named parameter collection.
class ParamStore {
 public:
  ParamId add(std::string name, ParamGroup group, Matrix init);
  /// uniform(-scale, scale) initialisation drawn from `rng`.
  ParamId add_uniform(std::string name, ParamGroup group, Index rows, Index cols, double scale,
                      std::mt19937_64& rng);
  ParamId add_zeros(std::string name, ParamGroup group, Index rows, Index cols);

  Parameter& operator[](ParamId id) { return params_[id]; }
  const Parameter& operator[](ParamId id) const { return params_[id]; }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  ParamId id_of(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();

  /// {"name": {"group":..., "shape":[r,c], "data":[...]}} in insertion order.
  nlohmann::ordered_json to_json() const;
  /// Overwrites values from `j`. Names and shapes must match exactly.
  void load_json(const nlohmann::ordered_json& j);

 private:
  std::deque<Parameter> params_;
  std::unordered_map<std::string, ParamId> index_;
};

/// Resolves parameters to tensors for one forward pass. With a tape the
/// tensors are differentiable leaves; without one they are constants, and
/// the store is only read.
class ParamBinder {
 public:
  explicit ParamBinder(const ParamStore& store) : store_(&store) {}
  ParamBinder(ParamStore& store, Tape& tape) : store_(&store), mutable_store_(&store), tape_(&tape) {}

  Tensor operator()(ParamId id);
  Tape* tape() const { return tape_; }

 private:
  const ParamStore* store_;
  ParamStore* mutable_store_ = nullptr;
  Tape* tape_ = nullptr;
  std::unordered_map<ParamId, Tensor> cache_;
};

}  // namespace gdst::nn

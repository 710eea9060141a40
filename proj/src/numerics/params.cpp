#include "graphdst/numerics/params.hpp"

#include "graphdst/errors.hpp"

namespace gdst::nn {

std::string_view to_string(ParamGroup group) {
  switch (group) {
    case ParamGroup::kEncoder: return "encoder";
    case ParamGroup::kDecoder: return "decoder";
    case ParamGroup::kGraph: return "gcn";
  }
  return "?";
}

ParamGroup param_group_from_string(std::string_view name) {
  if (name == "encoder") return ParamGroup::kEncoder;
  if (name == "decoder") return ParamGroup::kDecoder;
  if (name == "gcn") return ParamGroup::kGraph;
  throw Error("unknown parameter group '" + std::string(name) + "'");
}

ParamId ParamStore::add(std::string name, ParamGroup group, Matrix init) {
  if (index_.count(name) != 0) throw Error("duplicate parameter name '" + name + "'");
  const ParamId id = params_.size();
  index_.emplace(name, id);
  Parameter p;
  p.name = std::move(name);
  p.group = group;
  p.value = std::move(init);
  params_.push_back(std::move(p));
  return id;
}

ParamId ParamStore::add_uniform(std::string name, ParamGroup group, Index rows, Index cols,
                                double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return add(std::move(name), group, std::move(m));
}

ParamId ParamStore::add_zeros(std::string name, ParamGroup group, Index rows, Index cols) {
  return add(std::move(name), group, Matrix::Zero(rows, cols));
}

ParamId ParamStore::id_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("no parameter named '" + name + "'");
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

nlohmann::ordered_json ParamStore::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& p : params_) {
    nlohmann::ordered_json entry;
    entry["group"] = std::string(to_string(p.group));
    entry["shape"] = {p.value.rows(), p.value.cols()};
    entry["data"] = std::vector<double>(p.value.data(), p.value.data() + p.value.size());
    out[p.name] = std::move(entry);
  }
  return out;
}

void ParamStore::load_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw CheckpointError("parameter block is not an object");
  if (j.size() != params_.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(j.size()) + " tensors, model expects " +
                          std::to_string(params_.size()));
  }
  for (auto& p : params_) {
    auto it = j.find(p.name);
    if (it == j.end()) throw CheckpointError("checkpoint lacks tensor '" + p.name + "'");
    const auto shape = it->at("shape").get<std::vector<Index>>();
    if (shape.size() != 2 || shape[0] != p.value.rows() || shape[1] != p.value.cols()) {
      throw CheckpointError("shape mismatch for tensor '" + p.name + "'");
    }
    const auto data = it->at("data").get<std::vector<double>>();
    if (static_cast<Index>(data.size()) != p.value.size()) {
      throw CheckpointError("data length mismatch for tensor '" + p.name + "'");
    }
    std::copy(data.begin(), data.end(), p.value.data());
  }
}

Tensor ParamBinder::operator()(ParamId id) {
  auto it = cache_.find(id);
  if (it != cache_.end()) return it->second;
  Tensor t = tape_ != nullptr ? tape_->watch((*mutable_store_)[id])
                              : Tensor::constant((*store_)[id].value);
  cache_.emplace(id, t);
  return t;
}

}  // namespace gdst::nn

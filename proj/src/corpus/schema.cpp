#include "graphdst/schema.hpp"

#include "graphdst/dialogue.hpp"
#include "graphdst/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace gdst {

namespace {

void check_name(const std::string& field, const std::string& name) {
  if (name.empty()) throw SchemaError(field, "empty name");
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      throw SchemaError(field, "name '" + name + "' contains whitespace");
    }
    if (c == '-') throw SchemaError(field, "name '" + name + "' contains the separator '-'");
    if (std::isupper(static_cast<unsigned char>(c)) != 0) {
      throw SchemaError(field, "name '" + name + "' is not lowercase");
    }
  }
}

Schema::PairName split_key(const std::string& field, const std::string& key) {
  const auto dash = key.find('-');
  if (dash == std::string::npos) throw SchemaError(field, "expected 'domain-slot', got '" + key + "'");
  return {key.substr(0, dash), key.substr(dash + 1)};
}

}  // namespace

Schema::Schema(std::vector<std::string> domains,
               std::map<std::string, std::vector<std::string>> slots_of,
               std::map<PairName, std::vector<std::string>> value_pool,
               std::map<PairName, double> transition_weights,
               std::vector<std::pair<PairName, std::vector<PairName>>> links)
    : domains_(std::move(domains)) {
  if (domains_.empty()) throw SchemaError("domains", "no domains");
  std::set<std::string> seen;
  for (const auto& d : domains_) {
    check_name("domains", d);
    if (!seen.insert(d).second) throw SchemaError("domains", "duplicate domain '" + d + "'");
  }
  for (const auto& [d, _] : slots_of) {
    if (seen.count(d) == 0) throw SchemaError("slots", "unknown domain '" + d + "'");
  }

  pairs_of_.resize(domains_.size());
  for (std::size_t di = 0; di < domains_.size(); ++di) {
    const auto& d = domains_[di];
    auto it = slots_of.find(d);
    if (it == slots_of.end() || it->second.empty()) {
      throw SchemaError("slots." + d, "domain has no slots");
    }
    std::set<std::string> local;
    for (const auto& s : it->second) {
      check_name("slots." + d, s);
      if (!local.insert(s).second) throw SchemaError("slots." + d, "duplicate slot '" + s + "'");
      auto sn = std::find(slot_names_.begin(), slot_names_.end(), s);
      if (sn == slot_names_.end()) {
        slot_names_.push_back(s);
        sn = slot_names_.end() - 1;
      }
      SlotPair pair;
      pair.domain_index = di;
      pair.domain = d;
      pair.slot = s;
      pair.slot_name_index = static_cast<std::size_t>(sn - slot_names_.begin());
      pairs_of_[di].push_back(pairs_.size());
      pairs_.push_back(std::move(pair));
    }
    slots_of_.push_back(it->second);
  }

  for (const auto& [name, _] : value_pool) {
    if (!pair_index(name.first, name.second)) {
      throw SchemaError("values", "unknown pair '" + name.first + "-" + name.second + "'");
    }
  }
  for (const auto& p : pairs_) {
    const std::string field = "values." + p.key();
    auto it = value_pool.find({p.domain, p.slot});
    if (it == value_pool.end() || it->second.empty()) throw SchemaError(field, "empty value pool");
    std::vector<std::string> pool;
    for (const auto& raw : it->second) {
      const std::string v = normalize(raw);
      if (v.empty()) throw SchemaError(field, "empty value");
      if (v == kDontCareText || v == "none") throw SchemaError(field, "reserved value '" + v + "'");
      if (tokenize(v).size() > 3) throw SchemaError(field, "value '" + v + "' exceeds 3 tokens");
      if (std::find(pool.begin(), pool.end(), v) == pool.end()) pool.push_back(v);
    }
    pools_.push_back(std::move(pool));
  }

  transitions_.assign(domains_.size(), std::vector<double>(domains_.size(), 0.0));
  for (const auto& [from_to, w] : transition_weights) {
    const auto from = domain_index(from_to.first);
    const auto to = domain_index(from_to.second);
    if (!from || !to) {
      throw SchemaError("transitions", "unknown domain in '" + from_to.first + "' -> '" +
                                           from_to.second + "'");
    }
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw SchemaError("transitions", "weight for '" + from_to.first + "' -> '" +
                                           from_to.second + "' must be finite and nonnegative");
    }
    transitions_[*from][*to] = w;
  }

  for (const auto& [target, sources] : links) {
    const auto t = pair_index(target.first, target.second);
    if (!t) throw SchemaError("links", "unknown target '" + target.first + "-" + target.second + "'");
    ValueLink link;
    link.target = *t;
    for (const auto& s : sources) {
      const auto si = pair_index(s.first, s.second);
      if (!si) throw SchemaError("links", "unknown source '" + s.first + "-" + s.second + "'");
      if (pairs_[*si].domain_index == pairs_[*t].domain_index) {
        throw SchemaError("links", "source and target share a domain");
      }
      link.sources.push_back(*si);
    }
    if (link.sources.empty()) throw SchemaError("links", "link without sources");
    links_.push_back(std::move(link));
  }
}

std::optional<std::size_t> Schema::domain_index(const std::string& domain) const {
  auto it = std::find(domains_.begin(), domains_.end(), domain);
  if (it == domains_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - domains_.begin());
}

std::optional<std::size_t> Schema::pair_index(const std::string& domain,
                                              const std::string& slot) const {
  for (std::size_t j = 0; j < pairs_.size(); ++j) {
    if (pairs_[j].domain == domain && pairs_[j].slot == slot) return j;
  }
  return std::nullopt;
}

nlohmann::ordered_json Schema::to_json() const {
  nlohmann::ordered_json j;
  j["domains"] = domains_;
  nlohmann::ordered_json slots = nlohmann::ordered_json::object();
  for (std::size_t d = 0; d < domains_.size(); ++d) slots[domains_[d]] = slots_of_[d];
  j["slots"] = slots;
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  for (std::size_t p = 0; p < pairs_.size(); ++p) values[pairs_[p].key()] = pools_[p];
  j["values"] = values;
  nlohmann::ordered_json trans = nlohmann::ordered_json::object();
  for (std::size_t a = 0; a < domains_.size(); ++a) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (std::size_t b = 0; b < domains_.size(); ++b) {
      if (transitions_[a][b] > 0.0) row[domains_[b]] = transitions_[a][b];
    }
    trans[domains_[a]] = row;
  }
  j["transitions"] = trans;
  if (!links_.empty()) {
    nlohmann::ordered_json links = nlohmann::ordered_json::array();
    for (const auto& l : links_) {
      nlohmann::ordered_json e;
      e["target"] = pairs_[l.target].key();
      std::vector<std::string> src;
      for (auto s : l.sources) src.push_back(pairs_[s].key());
      e["sources"] = src;
      links.push_back(e);
    }
    j["links"] = links;
  }
  return j;
}

Schema Schema::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("<root>", "schema must be a JSON object");
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw SchemaError(key, "missing field");
    return j.at(key);
  };
  try {
    const auto domains = require("domains").get<std::vector<std::string>>();
    std::map<std::string, std::vector<std::string>> slots;
    for (const auto& [d, list] : require("slots").items()) {
      slots[d] = list.get<std::vector<std::string>>();
    }
    std::map<PairName, std::vector<std::string>> values;
    for (const auto& [key, list] : require("values").items()) {
      values[split_key("values", key)] = list.get<std::vector<std::string>>();
    }
    std::map<PairName, double> trans;
    if (j.contains("transitions")) {
      for (const auto& [from, row] : j.at("transitions").items()) {
        for (const auto& [to, w] : row.items()) trans[{from, to}] = w.get<double>();
      }
    }
    std::vector<std::pair<PairName, std::vector<PairName>>> links;
    if (j.contains("links")) {
      for (const auto& e : j.at("links")) {
        std::vector<PairName> sources;
        for (const auto& s : e.at("sources")) sources.push_back(split_key("links", s.get<std::string>()));
        links.emplace_back(split_key("links", e.at("target").get<std::string>()), std::move(sources));
      }
    }
    return Schema(domains, slots, values, trans, links);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("<root>", e.what());
  }
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schema file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return Schema::from_json(j);
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write schema file '" + path.string() + "'");
  out << schema.to_json().dump(2) << "\n";
}

}  // namespace gdst

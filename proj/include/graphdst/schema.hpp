#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gdst {

/// One (domain, slot) pair. Pairs are indexed 0..J-1 in schema order.
struct SlotPair {
  std::size_t domain_index = 0;
  std::string domain;
  std::string slot;
  std::size_t slot_name_index = 0;  // index into Schema::slot_names()

  std::string key() const { return domain + "-" + slot; }
};

/// A value for `target` may be taken from whichever `sources` pair is filled
/// in the current state; the user then refers to it instead of restating it.
struct ValueLink {
  std::size_t target = 0;
  std::vector<std::size_t> sources;
};

/// Domains, their slots, value pools and domain transition weights.
///
/// Construction validates everything; a Schema is immutable afterwards.
class Schema {
 public:
  using PairName = std::pair<std::string, std::string>;

  Schema(std::vector<std::string> domains, std::map<std::string, std::vector<std::string>> slots_of,
         std::map<PairName, std::vector<std::string>> value_pool,
         std::map<PairName, double> transition_weights,
         std::vector<std::pair<PairName, std::vector<PairName>>> links = {});

  const std::vector<std::string>& domains() const { return domains_; }
  const std::vector<std::string>& slots_of(std::size_t domain) const { return slots_of_[domain]; }
  std::optional<std::size_t> domain_index(const std::string& domain) const;

  /// J, the total number of (domain, slot) pairs.
  std::size_t pair_count() const { return pairs_.size(); }
  const SlotPair& pair(std::size_t j) const { return pairs_[j]; }
  const std::vector<SlotPair>& pairs() const { return pairs_; }
  std::optional<std::size_t> pair_index(const std::string& domain, const std::string& slot) const;
  /// Pair indices of one domain, in schema order.
  const std::vector<std::size_t>& pairs_of(std::size_t domain) const { return pairs_of_[domain]; }

  /// Distinct slot names in first-occurrence order.
  const std::vector<std::string>& slot_names() const { return slot_names_; }

  /// Normalised surface strings for pair j.
  const std::vector<std::string>& value_pool(std::size_t j) const { return pools_[j]; }
  double transition_weight(std::size_t from, std::size_t to) const {
    return transitions_[from][to];
  }
  const std::vector<ValueLink>& links() const { return links_; }

  nlohmann::ordered_json to_json() const;
  static Schema from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> domains_;
  std::vector<std::vector<std::string>> slots_of_;
  std::vector<SlotPair> pairs_;
  std::vector<std::vector<std::size_t>> pairs_of_;
  std::vector<std::string> slot_names_;
  std::vector<std::vector<std::string>> pools_;
  std::vector<std::vector<double>> transitions_;
  std::vector<ValueLink> links_;
};

/// 4 domains / 10 slots / 12 pairs; the default desk-scale schema.
Schema default_schema();
/// 5 domains / 17 slots / 30 pairs, the shape of the preprocessed MultiWOZ data.
Schema full_scale_schema();
/// Taxi endpoints are always taken from a venue already held in the state
/// (hotel, restaurant or attraction name).
Schema linked_value_schema();
/// Looks up "default", "full" or "linked".
Schema preset_schema(const std::string& name);

Schema load_schema(const std::filesystem::path& path);
void save_schema(const Schema& schema, const std::filesystem::path& path);

}  // namespace gdst

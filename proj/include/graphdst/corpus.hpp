#pragma once

#include "graphdst/dialogue.hpp"
#include "graphdst/schema.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace gdst {

/// Synthesises `n_dialogues` dialogues. A pure function of its arguments.
///
/// Each dialogue has between ceil(max_turns / 2) and max_turns turns. The
/// active domain of each turn after the first is drawn from the transition
/// row of the previous one. Every value a turn introduces is spelled out in
/// that turn's user utterance, except values taken through a schema link,
/// which the user refers to by the source domain name (the value itself was
/// spelled out when the source was filled).
std::vector<Dialogue> generate_corpus(const Schema& schema, std::size_t n_dialogues,
                                      std::size_t max_turns, std::uint64_t seed);

/// One JSON Lines record.
nlohmann::ordered_json dialogue_to_json(const Dialogue& dialogue, const Schema& schema);
/// Throws ValidationError for pairs outside `schema`.
Dialogue dialogue_from_json(const nlohmann::json& j, const Schema& schema);

std::vector<Dialogue> parse_corpus(std::istream& in, const Schema& schema);
void write_corpus(std::ostream& out, const std::vector<Dialogue>& corpus, const Schema& schema);

std::vector<Dialogue> load_corpus(const std::filesystem::path& path, const Schema& schema);
/// Writes through a temporary file and renames it into place.
void save_corpus(const std::filesystem::path& path, const std::vector<Dialogue>& corpus,
                 const Schema& schema);

/// Writes `content` to `path` atomically (temporary sibling + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace gdst

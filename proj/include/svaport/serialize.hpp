#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "svaport/sim.hpp"
#include "svaport/translate.hpp"
#include "svaport/trojan.hpp"

namespace svaport::io {

using ojson = nlohmann::ordered_json;

ojson to_json(const sim::Stimulus& s);
/// Accepts the object form `{reset_cycles, cycles: [...]}` or a bare array
/// of per-cycle maps.  Throws ConfigError.
sim::Stimulus stimulus_from_json(const nlohmann::json& j);

ojson to_json(const trojan::TrojanSpec& spec);
trojan::TrojanSpec spec_from_json(const nlohmann::json& j);

ojson to_json(const graph::Relationship& r);
ojson to_json(const translate::LinkReport& r);
ojson to_json(const sim::AssertionVerdict& v);

/// Throws ConfigError naming the file on I/O or JSON errors.
std::string read_file(const std::filesystem::path& p);
nlohmann::json read_json(const std::filesystem::path& p);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& p, std::string_view content);
inline void write_json(const std::filesystem::path& p, const ojson& j) { write_atomic(p, j.dump(2) + "\n"); }

}  // namespace svaport::io

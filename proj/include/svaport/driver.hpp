#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "svaport/metrics.hpp"
#include "svaport/rtl.hpp"
#include "svaport/sim.hpp"
#include "svaport/sva.hpp"
#include "svaport/trojan.hpp"

namespace svaport::driver {

namespace fs = std::filesystem;

struct ForgeSettings {
    std::size_t count = 0;
    unsigned k_min = 1;
    unsigned k_max = 8;
    std::vector<unsigned> k_values;
};

struct ModuleConfig {
    std::string name;
    fs::path target_design;
    std::optional<fs::path> source_design;
    fs::path assertions;
    std::optional<fs::path> signal_map;
    ForgeSettings forge;
};

struct ProjectConfig {
    std::uint64_t seed = 0;
    std::size_t horizon = 16;
    unsigned reset_cycles = 1;
    std::size_t search_budget = 10000;
    metrics::Format format = metrics::Format::table;
    fs::path out = "out";
    unsigned jobs = 1;
    std::vector<ModuleConfig> modules;
};

/// Relative paths resolve against `base`.  Throws ConfigError, including for
/// referenced files that do not exist.
ProjectConfig parse_config(std::string_view json_text, const fs::path& base);
ProjectConfig load_config(const fs::path& path);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<metrics::Format> format;
    std::optional<fs::path> out;
    std::optional<unsigned> jobs;
    std::optional<std::size_t> count;
    std::optional<unsigned> k_min;
    std::optional<unsigned> k_max;
};
/// `k_min`/`k_max` replace any explicit `k_values` list.
void apply_overrides(ProjectConfig& config, const Overrides& o);

/// Artifact locations under the output directory.
fs::path translate_dir(const ProjectConfig& c, const std::string& module);
fs::path trojan_dir(const ProjectConfig& c, const std::string& module);
fs::path eval_dir(const ProjectConfig& c, const std::string& module);
fs::path report_dir(const ProjectConfig& c);

/// Translated assertions of a module as written by `cmd_translate`.
std::vector<sva::Assertion> load_translated(const ProjectConfig& c, const std::string& module);
/// Trojan ids of a module as written by `cmd_inject`.
std::vector<std::string> load_trojan_ids(const ProjectConfig& c, const std::string& module);

struct Detection {
    bool detected = false;
    std::vector<std::string> detected_by;
    std::vector<sim::AssertionVerdict> verdicts;
};

/// Detected when any assertion fails at least once under `stimulus`.
Detection evaluate_trojan(const rtl::Netlist& injected, const sim::Stimulus& stimulus,
                          const std::vector<sva::Assertion>& assertions);

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads.  The first
/// exception is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

/// Exit codes: 0 success, 1 parse/config/forge/simulation errors,
/// 2 (translate only) when some assertion is untranslatable.
int cmd_translate(const ProjectConfig& config, std::ostream& out, std::ostream& err);
int cmd_inject(const ProjectConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const ProjectConfig& config, std::ostream& out, std::ostream& err);
int cmd_report(const ProjectConfig& config, std::ostream& out, std::ostream& err);

}  // namespace svaport::driver

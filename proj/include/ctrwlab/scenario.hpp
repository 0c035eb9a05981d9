#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctrwlab/processes.hpp"
#include "ctrwlab/stats.hpp"
#include "json.hpp"

namespace ctrwlab {

// A scenario file:
//   { "kind": "attraction", "name": "...", "seed": 7, "reps": 10000,
//     "n_list": [100, 1000, 10000], "output": {"report": "...", "paths": "..."},
//     "params": { ...kind-specific... } }
// Unknown keys anywhere are rejected (CONFIG_UNKNOWN_KEY).
struct Scenario {
    std::string kind;
    std::string name;
    std::uint64_t seed = 0;
    std::size_t reps = 1000;
    std::vector<std::int64_t> n_list{100, 1000, 10000};
    std::string report_path;  // empty: not written
    std::string paths_dir;    // empty: derived from report_path
    nlohmann::json params = nlohmann::json::object();

    static Scenario from_json(const nlohmann::json& j);
    static Scenario load(const std::string& path);
    nlohmann::json to_json() const;
};

inline const std::vector<std::string>& scenario_kinds() {
    static const std::vector<std::string> k{"simulate", "attraction", "gd",  "gdca", "gdci",
                                            "integrals", "adversarial", "sde", "sdde", "metrics"};
    return k;
}

// Parses {"alpha", "innovation", "scale", "beta", "wait_scale", "coefficients",
// "past", "coupling"}; missing keys take their defaults.
ProcessConfig process_from_json(const nlohmann::json& j);
nlohmann::json process_to_json(const ProcessConfig& c);

struct RunOptions {
    int threads = 1;
    bool write_files = true;
};

// The report echoes the normalised scenario (defaults filled in) as params,
// so the scenario can be rerun from the report alone.
DiagnosticReport run_scenario(const Scenario& s, const RunOptions& opt = {});

// Seed of an independent family of streams for (seed, tag, n).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t n);

}  // namespace ctrwlab

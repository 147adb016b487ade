#pragma once

// Scenario plumbing shared by the CLI: atomic CSV/JSON writers, run
// context, and the preset catalog covering the standard sweeps.

#include <functional>
#include <string>
#include <vector>

#include "eitmem/config.hpp"

namespace eitmem::scenario {

inline constexpr const char* kToolVersion = "eitmem 1.0.0";

struct RunContext {
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct Scenario {
    std::string name;
    std::string figure;       // figure label the preset reproduces
    std::string description;
    std::vector<std::string> notes;  // conventions, assumptions
    std::function<void(const RunContext&)> run;
};

// Deterministic formatting: shortest round-trippable decimal via %.12g.
std::string format_double(double v);

using Row = std::vector<double>;

void write_csv_atomic(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<Row>& rows);

void write_json_atomic(const std::string& path, const config::Json& j);

// Summary skeleton with version and resolved parameters.
config::Json run_summary(const config::Config& cfg, const RunContext& ctx);

const std::vector<Scenario>& preset_catalog();

const Scenario* find_preset(const std::string& name);

// Generic scenario config: {"name":..., "target":..., parameter blocks,
// optional "sweep"}; writes its outputs under ctx.out_dir.
void run_scenario(const config::Json& scenario_config, const RunContext& ctx);

}  // namespace eitmem::scenario

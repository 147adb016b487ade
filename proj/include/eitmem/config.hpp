#pragma once

// Config-file ingestion. Keys follow the units used in the surrounding
// literature: rates and Rabi frequencies in units of Gamma, with *_mhz,
// *_ghz, *_ns, *_us, and *_deg variants converted through the selected
// transition. Unknown keys are rejected.

#include <json.hpp>

#include <optional>
#include <string>

#include "eitmem/storage.hpp"
#include "eitmem/units.hpp"

namespace eitmem::config {

using Json = nlohmann::json;

struct Config {
    Transition transition = Transition::cesium_d1();
    std::string transition_name = "cs-d1";
    MediumParams medium;
    FieldParams field;
    std::optional<GaussianPulse> pulse;
    GridOptions grid;
    std::optional<storage::StorageProtocol> protocol;
    std::optional<storage::DecayModel> decay;
    Json raw;  // resolved input for report reproducibility
};

Json load_json_file(const std::string& path);

// Parse and validate; throws ValidationError with the offending key path.
Config parse_config(const Json& j);

Config load_config(const std::string& path);

// Resolved parameter set for run summaries (all values in Gamma units).
Json describe(const Config& c);

}  // namespace eitmem::config

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "epiflow/case_data.hpp"
#include "epiflow/networks.hpp"
#include "epiflow/priors.hpp"
#include "epiflow/training.hpp"

namespace epiflow {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One parsed run configuration: forward model, priors (standardization not
// yet fitted), network shape, training settings, data schema.
struct RunConfig {
  SimulatorSpec sim;
  ParameterSpace space;
  NetworkConfig net;
  TrainConfig train;
  CaseSchema data;
  std::uint64_t seed = 1;
  int standardization_draws = 20000;
  int holdout_days = 0;
};

// Parse a JSON config file on top of built-in defaults. Unknown keys are
// rejected; ablation toggles are checked against the chosen model.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json_text(const std::string& text,
                                    const std::string& origin);

// Resolve a config path: as given if it exists, otherwise relative to
// $EPIFLOW_CONFIG_DIR when that is set.
std::string resolve_config_path(const std::string& path);

}  // namespace epiflow

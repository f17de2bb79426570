#pragma once

#include <cstdint>
#include <string>

#include "encmf/ann.hpp"

namespace encmf {

// One twin-experiment run. Loadable from a JSON file; unknown keys are
// rejected. CLI flags override file values field by field.
struct ExperimentConfig {
  std::string model = "lorenz63";  // lorenz63 | lorenz96
  std::string filter = "mlencmf";  // enkf | genkf | mlencmf | cmf-oracle-1d
  int n_ens = 1000;
  double dt = 0.01;
  double dt_obs = 0.5;
  int steps = 500;
  std::uint64_t seed = 1;
  bool burn_in = false;  // drop the first 10% of steps from the aggregates
  ForceA force_a = ForceA::Auto;
  // When false (default), the analysis_ms column is written as 0 so reruns
  // with the same seed produce byte-identical files.
  bool timing = false;
  TrainConfig train;
  std::string out_dir;  // empty: compute only, write nothing

  void validate() const;
};

ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Full round-trippable echo of the configuration (JSON text).
std::string config_to_json(const ExperimentConfig& cfg);

ForceA parse_force_a(const std::string& text);
std::string force_a_to_string(ForceA value);

}  // namespace encmf

#pragma once

#include <string>
#include <vector>

#include "encmf/config.hpp"
#include "encmf/metrics.hpp"

namespace encmf {

// Comparison grid: one axis varied over a value list, each point run per
// filter with a per-point derived seed (shared across filters so every filter
// sees the same synthesized truth).
struct SweepConfig {
  ExperimentConfig base;
  std::string axis;  // dt_obs | n_ens | m_aug
  std::vector<double> values;
  std::vector<std::string> filters = {"enkf", "mlencmf"};
  std::string out_dir;  // empty: compute only

  void validate() const;
};

struct SweepPoint {
  std::string filter;
  std::string axis;
  double value = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunMetrics metrics;
  int n_train_fallbacks = 0;
};

// Runs all (value, filter) points; a failing point is recorded with its error
// and the sweep continues. Writes sweep_summary.csv when out_dir is set.
std::vector<SweepPoint> run_sweep(const SweepConfig& cfg);

// The base config with one axis value and filter applied; exposed so single
// points can be reproduced exactly.
ExperimentConfig sweep_point_config(const SweepConfig& cfg, std::size_t index,
                                    const std::string& filter);

}  // namespace encmf

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "encmf/stats.hpp"
#include "encmf/types.hpp"

namespace encmf {

// Static scalar inverse problem: prior N(0, 2^2), observation h(q) + noise
// with h piecewise (identity left of zero, square right of it) and noise
// N(0, 0.5^2). Compares the conditional-mean update against the affine one
// and a weighted-sample posterior reference.
struct Demo1dConfig {
  int n_ens = 10000;     // filter ensemble size
  int n_oracle = 10000;  // posterior-reference sample size
  std::uint64_t seed = 1;
  int grid_points = 201;  // conditional-mean curve resolution
  double y_min = -8.0;
  double y_max = 12.0;
  std::vector<double> q_true_values = {-2.0, 0.0, 2.0};
  int density_bins = 81;
  double density_min = -6.0;
  double density_max = 6.0;
  std::string out_dir;  // empty: compute only
};

struct Demo1dCase {
  double q_true = 0.0;
  double y_hat = 0.0;
  double encmf_mean = 0.0;
  double genkf_mean = 0.0;
  double posterior_mean = 0.0;
  double encmf_se = 0.0;     // ensemble standard error of the mean
  double posterior_se = 0.0; // importance-sampling standard error
  double encmf_var = 0.0;
  double genkf_var = 0.0;
  // Histogram densities over the shared bin grid.
  std::vector<double> encmf_density;
  std::vector<double> genkf_density;
  std::vector<double> posterior_density;
};

struct Demo1dResult {
  // Conditional-mean curve against its affine approximation.
  std::vector<double> grid_y, grid_cm, grid_linear;
  AffineEstimator linear;
  // Conditional variance distribution over the forecast observations.
  std::vector<double> cond_var_sorted;
  double expected_cond_var = 0.0;
  double encmf_var = 0.0;
  double genkf_var = 0.0;
  std::vector<Demo1dCase> cases;
};

Demo1dResult run_demo1d(const Demo1dConfig& cfg);

}  // namespace encmf

#pragma once

#include <vector>

#include "encmf/types.hpp"

namespace encmf {

// Tracking-performance summary of one filter run.
struct RunMetrics {
  std::vector<double> rmse_series;
  double avg_rmse = 0.0;
  double median_rmse = 0.0;
  double avg_spread = 0.0;
  double coverage_prob = 0.0;
};

// Component-averaged deviation ||mean - truth|| / sqrt(n).
double rmse_step(const Vector& mean, const Vector& truth);

// sqrt(trace(ensemble_cov) / n); requires at least two members.
double spread_step(const StateEnsemble& ensemble);

// Empirical quantile with the linear-interpolation (order-statistic) rule.
// Takes its argument by value and sorts it.
double empirical_quantile(std::vector<double> values, double p);

// Number of components whose truth value lies inside the central `level`
// interval of the ensemble's marginal, bounded by the (1-level)/2 and
// 1-(1-level)/2 empirical quantiles.
int coverage_step(const StateEnsemble& ensemble, const Vector& truth,
                  double level = 0.95);

struct Aggregate {
  double average;
  double median;  // midpoint of the two central values for even counts
};

Aggregate aggregate(const std::vector<double>& series);

}  // namespace encmf

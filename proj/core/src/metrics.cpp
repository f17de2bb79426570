#include "encmf/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "encmf/stats.hpp"

namespace encmf {

double rmse_step(const Vector& mean, const Vector& truth) {
  if (mean.size() != truth.size())
    throw DomainError("rmse_step: dimension mismatch");
  return (mean - truth).norm() / std::sqrt(static_cast<double>(mean.size()));
}

double spread_step(const StateEnsemble& ensemble) {
  if (ensemble.cols() < 2)
    throw DomainError("spread_step: needs at least two members");
  const Matrix cov = ensemble_cov(ensemble);
  return std::sqrt(cov.trace() / static_cast<double>(ensemble.rows()));
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty())
    throw DomainError("empirical_quantile: empty sample");
  if (!(p >= 0.0) || !(p <= 1.0))
    throw DomainError("empirical_quantile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

int coverage_step(const StateEnsemble& ensemble, const Vector& truth,
                  double level) {
  if (ensemble.rows() != truth.size())
    throw DomainError("coverage_step: dimension mismatch");
  if (ensemble.cols() < 2)
    throw DomainError("coverage_step: needs at least two members");
  if (!(level >= 0.0 && level <= 1.0))
    throw DomainError("coverage_step: level must lie in [0, 1]");
  const double p_lo = (1.0 - level) / 2.0;
  const double p_hi = 1.0 - p_lo;
  int covered = 0;
  std::vector<double> row(static_cast<std::size_t>(ensemble.cols()));
  for (Eigen::Index i = 0; i < ensemble.rows(); ++i) {
    for (Eigen::Index c = 0; c < ensemble.cols(); ++c)
      row[static_cast<std::size_t>(c)] = ensemble(i, c);
    const double lo = empirical_quantile(row, p_lo);
    const double hi = empirical_quantile(row, p_hi);
    if (truth[i] >= lo && truth[i] <= hi) ++covered;
  }
  return covered;
}

Aggregate aggregate(const std::vector<double>& series) {
  if (series.empty()) throw DomainError("aggregate: empty series");
  double sum = 0.0;
  for (const double v : series) sum += v;
  std::vector<double> sorted = series;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  double median;
  if (n % 2 == 1) {
    median = sorted[n / 2];
  } else {
    median = 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }
  return {sum / static_cast<double>(n), median};
}

}  // namespace encmf

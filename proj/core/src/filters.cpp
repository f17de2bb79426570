#include "encmf/filters.hpp"

#include <cmath>
#include <utility>

namespace encmf {

namespace {

void check_input(const AnalysisInput& in, const char* where) {
  if (in.states.cols() != in.observations.cols())
    throw DomainError(std::string(where) +
                      ": state/observation member counts differ");
  if (in.observed.size() != in.observations.rows())
    throw DomainError(std::string(where) +
                      ": measurement dimension mismatch");
}

// Normalized importance weights for the prior samples given the measurement.
Vector sir_weights(const StateEnsemble& prior_samples,
                   const ObservationMap& map, const NoiseModel& noise,
                   const Vector& observed) {
  const Eigen::Index n = prior_samples.cols();
  if (n < 1) throw DomainError("sir_weights: needs at least one sample");
  Vector logw(n);
  for (Eigen::Index i = 0; i < n; ++i)
    logw[i] = noise.log_density(observed - map(prior_samples.col(i)));
  const double shift = logw.maxCoeff();
  Vector w = (logw.array() - shift).exp();
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericalError("sir_weights: degenerate importance weights");
  return w / total;
}

}  // namespace

StateEnsemble apply_gain_update(const AnalysisInput& in, const Matrix& gain) {
  check_input(in, "apply_gain_update");
  if (gain.rows() != in.states.rows() || gain.cols() != in.observations.rows())
    throw DomainError("apply_gain_update: gain dimension mismatch");
  return in.states + gain * ((-in.observations).colwise() + in.observed);
}

StateEnsemble enkf_analysis(const AnalysisInput& in, const Matrix& h,
                            const Matrix& noise_cov) {
  check_input(in, "enkf_analysis");
  const Matrix gain =
      kalman_gain_linear(ensemble_cov(in.states), h, noise_cov);
  return apply_gain_update(in, gain);
}

StateEnsemble genkf_analysis(const AnalysisInput& in) {
  check_input(in, "genkf_analysis");
  const Matrix gain = kalman_gain_generalized(in.states, in.observations);
  return apply_gain_update(in, gain);
}

StateEnsemble cmf_analysis(const AnalysisInput& in,
                           const std::function<Vector(const Vector&)>& g) {
  check_input(in, "cmf_analysis");
  const Vector g_observed = g(in.observed);
  StateEnsemble out = in.states;
  for (Eigen::Index i = 0; i < out.cols(); ++i)
    out.col(i) += g_observed - g(in.observations.col(i));
  return out;
}

Vector ConditionalMeanModel::operator()(const Vector& y) const {
  Vector out = linear(y);
  if (use_residual) out += residual(y);
  return out;
}

StateEnsemble mlencmf_analysis(const AnalysisInput& in,
                               const ConditionalMeanModel& cm) {
  check_input(in, "mlencmf_analysis");
  StateEnsemble out = apply_gain_update(in, cm.linear.gain);
  if (!cm.use_residual) return out;
  const Vector r_observed = cm.residual(in.observed);
  const Matrix r_forecast = cm.residual_batch(in.observations);
  out += (-r_forecast).colwise() + r_observed;
  return out;
}

Vector posterior_mean_sir(const StateEnsemble& prior_samples,
                          const ObservationMap& map, const NoiseModel& noise,
                          const Vector& observed) {
  const Vector w = sir_weights(prior_samples, map, noise, observed);
  return prior_samples * w;
}

Matrix posterior_second_moment_sir(const StateEnsemble& prior_samples,
                                   const ObservationMap& map,
                                   const NoiseModel& noise,
                                   const Vector& observed) {
  const Vector w = sir_weights(prior_samples, map, noise, observed);
  const Eigen::Index n = prior_samples.rows();
  Matrix acc = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < prior_samples.cols(); ++i) {
    const Vector q = prior_samples.col(i);
    acc.noalias() += w[i] * (q * q.transpose());
  }
  return acc;
}

Sir1dOracle::Sir1dOracle(Vector prior_samples, const ObservationMap& map,
                         double noise_variance)
    : q_(std::move(prior_samples)), noise_variance_(noise_variance) {
  if (q_.size() < 1)
    throw DomainError("Sir1dOracle: needs at least one sample");
  if (map.state_dim() != 1 || map.obs_dim() != 1)
    throw DomainError("Sir1dOracle: map must be scalar");
  if (!(noise_variance_ > 0.0))
    throw DomainError("Sir1dOracle: noise variance must be positive");
  hq_ = Vector(q_.size());
  Vector one(1);
  for (Eigen::Index i = 0; i < q_.size(); ++i) {
    one[0] = q_[i];
    hq_[i] = map(one)[0];
  }
}

Vector Sir1dOracle::normalized_weights(double observed) const {
  const Eigen::ArrayXd logw =
      -(observed - hq_.array()).square() / (2.0 * noise_variance_);
  Eigen::ArrayXd w = (logw - logw.maxCoeff()).exp();
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericalError("Sir1dOracle: degenerate importance weights");
  w /= total;
  return w.matrix();
}

Sir1dOracle::Moments Sir1dOracle::moments(double observed) const {
  const Vector w = normalized_weights(observed);
  const double mean = (w.array() * q_.array()).sum();
  const double second = (w.array() * q_.array().square()).sum();
  return {mean, second - mean * mean};
}

}  // namespace encmf

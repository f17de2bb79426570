#pragma once

#include <functional>

#include "encmf/observation.hpp"
#include "encmf/stats.hpp"
#include "encmf/types.hpp"

namespace encmf {

// One assimilation problem: a forecast ensemble, its simulated observations
// (noise already added, column-paired with the states), and the measurement.
struct AnalysisInput {
  StateEnsemble states;
  ObservationEnsemble observations;
  Vector observed;
};

// q_i + gain * (observed - y_i) for every member pair. All ensemble analysis
// updates below reduce to this with their particular gain.
StateEnsemble apply_gain_update(const AnalysisInput& in, const Matrix& gain);

// Stochastic ensemble Kalman update with the gain built from the forecast
// state covariance and a linear observation operator.
StateEnsemble enkf_analysis(const AnalysisInput& in, const Matrix& h,
                            const Matrix& noise_cov);

// Same update with the gain estimated from the paired ensembles,
// cov(Q, Y) cov(Y)^{-1}; valid for nonlinear observation operators.
StateEnsemble genkf_analysis(const AnalysisInput& in);

// Conditional-mean shift: q_i + g(observed) - g(y_i) for an arbitrary
// estimate g of E[q | y].
StateEnsemble cmf_analysis(const AnalysisInput& in,
                           const std::function<Vector(const Vector&)>& g);

// Conditional-mean estimate used by the ML filter: affine part plus an
// optional learned residual, included only when use_residual is set.
// residual(y) evaluates one input; residual_batch evaluates columns.
struct ConditionalMeanModel {
  AffineEstimator linear;
  std::function<Vector(const Vector&)> residual;
  std::function<Matrix(const Matrix&)> residual_batch;
  bool use_residual = false;

  Vector operator()(const Vector& y) const;
};

// Affine update via the generalized gain, plus the residual shift
// use_residual ? residual(observed) - residual(y_i) : 0. With use_residual
// false this reproduces genkf_analysis exactly.
StateEnsemble mlencmf_analysis(const AnalysisInput& in,
                               const ConditionalMeanModel& cm);

// Self-normalized importance sampling against the prior samples with weights
// proportional to the observation likelihood. Log-weights are shifted by
// their maximum before exponentiation.
Vector posterior_mean_sir(const StateEnsemble& prior_samples,
                          const ObservationMap& map, const NoiseModel& noise,
                          const Vector& observed);

// E[q q^T | observed] under the same weighting.
Matrix posterior_second_moment_sir(const StateEnsemble& prior_samples,
                                   const ObservationMap& map,
                                   const NoiseModel& noise,
                                   const Vector& observed);

// Scalar-state specialization that fixes the prior sample once and answers
// many measurement values; h(q) is precomputed per sample.
class Sir1dOracle {
 public:
  Sir1dOracle(Vector prior_samples, const ObservationMap& map,
              double noise_variance);

  struct Moments {
    double mean;
    double variance;
  };
  Moments moments(double observed) const;
  double posterior_mean(double observed) const { return moments(observed).mean; }

  // Self-normalized importance weights over the prior samples.
  Vector normalized_weights(double observed) const;
  const Vector& prior_samples() const { return q_; }

 private:
  Vector q_;
  Vector hq_;
  double noise_variance_;
};

}  // namespace encmf

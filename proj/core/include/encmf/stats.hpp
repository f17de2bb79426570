#pragma once

#include "encmf/types.hpp"

namespace encmf {

// Sample mean of the columns of `ensemble`.
Vector ensemble_mean(const Matrix& ensemble);

// Sample covariance of the columns, normalized by the member count N (not
// N - 1). Deviations are accumulated left to right so results are
// bit-reproducible for a fixed column order.
Matrix ensemble_cov(const Matrix& ensemble);

// Cross-covariance cov(A, B) between two column-paired ensembles, normalized
// by N. Columns with the same index form a joint sample.
Matrix cross_cov(const Matrix& a, const Matrix& b);

// Solves (A + eps * I) X = B for symmetric positive semi-definite A via LDLT.
// Tries the exact system first, then eps at 1e-10 and 1e-6 times
// trace(A) / dim; an attempt counts only if its residual is near machine
// precision. Raises NumericalError when every attempt fails.
Matrix solve_spd(const Matrix& a, const Matrix& b);

// Gain for a linear observation operator H: Sigma H^T (H Sigma H^T + R)^{-1}.
Matrix kalman_gain_linear(const Matrix& state_cov, const Matrix& h,
                          const Matrix& noise_cov);

// Gain from paired state/observation ensembles: cov(Q, Y) cov(Y)^{-1}.
// Works for nonlinear observation operators; the observation ensemble must
// already include the simulated noise.
Matrix kalman_gain_generalized(const StateEnsemble& states,
                               const ObservationEnsemble& observations);

// Affine map y |-> gain * y + offset.
struct AffineEstimator {
  Matrix gain;
  Vector offset;

  Vector operator()(const Vector& y) const { return gain * y + offset; }
  Matrix apply(const Matrix& ys) const {
    return (gain * ys).colwise() + offset;
  }
};

// Best affine predictor of the states given the observations, fitted from the
// paired ensembles: gain = cov(Q, Y) cov(Y)^{-1}, offset = mean(Q) - gain *
// mean(Y).
AffineEstimator fit_affine(const StateEnsemble& states,
                           const ObservationEnsemble& observations);

}  // namespace encmf

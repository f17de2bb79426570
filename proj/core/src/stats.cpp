#include "encmf/stats.hpp"

#include <string>

namespace encmf {

namespace {

void require_members(const Matrix& ensemble, const char* where) {
  if (ensemble.cols() < 1)
    throw DomainError(std::string(where) + ": ensemble needs at least one member");
}

}  // namespace

Vector ensemble_mean(const Matrix& ensemble) {
  require_members(ensemble, "ensemble_mean");
  Vector sum = ensemble.col(0);
  for (Eigen::Index i = 1; i < ensemble.cols(); ++i) sum += ensemble.col(i);
  return sum / static_cast<double>(ensemble.cols());
}

Matrix ensemble_cov(const Matrix& ensemble) {
  require_members(ensemble, "ensemble_cov");
  const Vector mean = ensemble_mean(ensemble);
  Matrix acc = Matrix::Zero(ensemble.rows(), ensemble.rows());
  for (Eigen::Index i = 0; i < ensemble.cols(); ++i) {
    const Vector dev = ensemble.col(i) - mean;
    acc.noalias() += dev * dev.transpose();
  }
  return acc / static_cast<double>(ensemble.cols());
}

Matrix cross_cov(const Matrix& a, const Matrix& b) {
  require_members(a, "cross_cov");
  if (a.cols() != b.cols())
    throw DomainError("cross_cov: ensembles must have the same member count");
  const Vector mean_a = ensemble_mean(a);
  const Vector mean_b = ensemble_mean(b);
  Matrix acc = Matrix::Zero(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    acc.noalias() += (a.col(i) - mean_a) * (b.col(i) - mean_b).transpose();
  }
  return acc / static_cast<double>(a.cols());
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) throw DomainError("solve_spd: matrix must be square");
  if (a.rows() != b.rows())
    throw DomainError("solve_spd: right-hand side has mismatched rows");
  const double scale = a.trace() / static_cast<double>(a.rows());
  for (const double rel : {0.0, 1e-10, 1e-6}) {
    Matrix shifted = a;
    if (rel > 0.0) shifted.diagonal().array() += rel * scale;
    Eigen::LDLT<Matrix> ldlt(shifted);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
    Matrix x = ldlt.solve(b);
    if (!x.allFinite()) continue;
    // The factorization is backward stable, so an accurate solve leaves a
    // residual near machine precision; anything larger means a semi-definite
    // system slipped through the pivot checks and needs the next shift.
    const double residual = (shifted * x - b).cwiseAbs().maxCoeff();
    const double reference = b.cwiseAbs().maxCoeff() +
                             shifted.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff();
    if (residual > 1e-8 * reference) continue;
    return x;
  }
  throw NumericalError(
      "solve_spd: matrix not positive definite after regularization (trace/dim = " +
      std::to_string(scale) + ")");
}

Matrix kalman_gain_linear(const Matrix& state_cov, const Matrix& h,
                          const Matrix& noise_cov) {
  if (h.cols() != state_cov.rows())
    throw DomainError("kalman_gain_linear: operator/state dimension mismatch");
  if (noise_cov.rows() != h.rows() || noise_cov.cols() != h.rows())
    throw DomainError("kalman_gain_linear: noise covariance dimension mismatch");
  const Matrix innovation_cov = h * state_cov * h.transpose() + noise_cov;
  // K = Sigma H^T S^{-1}  computed as  S^{-1} (H Sigma)  transposed.
  return solve_spd(innovation_cov, h * state_cov.transpose()).transpose();
}

Matrix kalman_gain_generalized(const StateEnsemble& states,
                               const ObservationEnsemble& observations) {
  const Matrix cq = cross_cov(states, observations);
  const Matrix cy = ensemble_cov(observations);
  return solve_spd(cy, cq.transpose()).transpose();
}

AffineEstimator fit_affine(const StateEnsemble& states,
                           const ObservationEnsemble& observations) {
  AffineEstimator est;
  est.gain = kalman_gain_generalized(states, observations);
  est.offset = ensemble_mean(states) - est.gain * ensemble_mean(observations);
  return est;
}

}  // namespace encmf

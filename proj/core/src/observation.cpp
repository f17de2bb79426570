#include "encmf/observation.hpp"

#include <cmath>
#include <utility>

namespace encmf {

ObservationMap::ObservationMap(Eigen::Index state_dim, Eigen::Index obs_dim,
                               bool linear, Matrix h,
                               std::function<Vector(const Vector&)> fn)
    : state_dim_(state_dim),
      obs_dim_(obs_dim),
      linear_(linear),
      h_(std::move(h)),
      fn_(std::move(fn)) {}

ObservationMap ObservationMap::identity(Eigen::Index dim) {
  if (dim < 1) throw DomainError("ObservationMap::identity: dim must be >= 1");
  Matrix h = Matrix::Identity(dim, dim);
  return ObservationMap(dim, dim, true, h,
                        [](const Vector& q) { return q; });
}

ObservationMap ObservationMap::selector(Eigen::Index state_dim,
                                        std::vector<Eigen::Index> indices) {
  if (state_dim < 1)
    throw DomainError("ObservationMap::selector: state_dim must be >= 1");
  if (indices.empty())
    throw DomainError("ObservationMap::selector: needs at least one index");
  for (const Eigen::Index idx : indices)
    if (idx < 0 || idx >= state_dim)
      throw DomainError("ObservationMap::selector: index out of range");
  const Eigen::Index m = static_cast<Eigen::Index>(indices.size());
  Matrix h = Matrix::Zero(m, state_dim);
  for (Eigen::Index r = 0; r < m; ++r) h(r, indices[r]) = 1.0;
  auto fn = [indices, m](const Vector& q) {
    Vector out(m);
    for (Eigen::Index r = 0; r < m; ++r) out[r] = q[indices[r]];
    return out;
  };
  return ObservationMap(state_dim, m, true, std::move(h), std::move(fn));
}

ObservationMap ObservationMap::scalar_piecewise() {
  auto fn = [](const Vector& q) {
    Vector out(1);
    out[0] = q[0] <= 0.0 ? q[0] : q[0] * q[0];
    return out;
  };
  return ObservationMap(1, 1, false, Matrix(), std::move(fn));
}

Vector ObservationMap::operator()(const Vector& q) const {
  if (q.size() != state_dim_)
    throw DomainError("ObservationMap: state dimension mismatch");
  return fn_(q);
}

Matrix ObservationMap::apply(const Matrix& ensemble) const {
  if (ensemble.rows() != state_dim_)
    throw DomainError("ObservationMap::apply: state dimension mismatch");
  Matrix out(obs_dim_, ensemble.cols());
  for (Eigen::Index i = 0; i < ensemble.cols(); ++i)
    out.col(i) = fn_(ensemble.col(i));
  return out;
}

const Matrix& ObservationMap::matrix() const {
  if (!linear_)
    throw DomainError("ObservationMap::matrix: map is not linear");
  return h_;
}

NoiseModel::NoiseModel(Matrix cov, bool diagonal)
    : cov_(std::move(cov)), diagonal_(diagonal) {
  const Eigen::Index m = cov_.rows();
  double log_det = 0.0;
  if (diagonal_) {
    sqrt_var_ = Vector(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double v = cov_(j, j);
      if (!(v > 0.0))
        throw DomainError("NoiseModel: variances must be positive");
      sqrt_var_[j] = std::sqrt(v);
      log_det += std::log(v);
    }
  } else {
    Eigen::LLT<Matrix> llt(cov_);
    if (llt.info() != Eigen::Success)
      throw DomainError("NoiseModel: covariance must be positive definite");
    chol_lower_ = llt.matrixL();
    for (Eigen::Index j = 0; j < m; ++j)
      log_det += 2.0 * std::log(chol_lower_(j, j));
  }
  log_norm_ = -0.5 * (static_cast<double>(m) * std::log(2.0 * M_PI) + log_det);
}

NoiseModel NoiseModel::diagonal(Vector variances) {
  if (variances.size() < 1)
    throw DomainError("NoiseModel::diagonal: needs at least one component");
  Matrix cov = Matrix::Zero(variances.size(), variances.size());
  cov.diagonal() = variances;
  return NoiseModel(std::move(cov), true);
}

NoiseModel NoiseModel::isotropic(Eigen::Index dim, double variance) {
  if (dim < 1) throw DomainError("NoiseModel::isotropic: dim must be >= 1");
  return diagonal(Vector::Constant(dim, variance));
}

NoiseModel NoiseModel::full(Matrix cov) {
  if (cov.rows() != cov.cols() || cov.rows() < 1)
    throw DomainError("NoiseModel::full: covariance must be square");
  if (!cov.isApprox(cov.transpose()))
    throw DomainError("NoiseModel::full: covariance must be symmetric");
  return NoiseModel(std::move(cov), false);
}

Vector NoiseModel::sample(RngStream& rng) const {
  const Vector z = rng.normal_vector(dim());
  if (diagonal_) return sqrt_var_.cwiseProduct(z);
  return chol_lower_ * z;
}

double NoiseModel::log_density(const Vector& x) const {
  if (x.size() != dim())
    throw DomainError("NoiseModel::log_density: dimension mismatch");
  double quad;
  if (diagonal_) {
    quad = x.cwiseQuotient(sqrt_var_).squaredNorm();
  } else {
    quad = chol_lower_.triangularView<Eigen::Lower>().solve(x).squaredNorm();
  }
  return log_norm_ - 0.5 * quad;
}

ObservationEnsemble forecast_observations(const ObservationMap& map,
                                          const NoiseModel& noise,
                                          const StateEnsemble& ensemble,
                                          const RngPolicy& rng,
                                          StreamLabel label,
                                          std::uint32_t step) {
  if (noise.dim() != map.obs_dim())
    throw DomainError("forecast_observations: noise/map dimension mismatch");
  Matrix out(map.obs_dim(), ensemble.cols());
  for (Eigen::Index i = 0; i < ensemble.cols(); ++i) {
    RngStream stream = rng.stream(label, step, static_cast<std::uint32_t>(i));
    out.col(i) = map(ensemble.col(i)) + noise.sample(stream);
  }
  return out;
}

ObservationScenario l63_scenario() {
  return {ObservationMap::identity(3), NoiseModel::isotropic(3, 4.0)};
}

ObservationScenario l96_scenario(Eigen::Index state_dim) {
  std::vector<Eigen::Index> even;
  for (Eigen::Index j = 0; j < state_dim; j += 2) even.push_back(j);
  const Eigen::Index m = static_cast<Eigen::Index>(even.size());
  return {ObservationMap::selector(state_dim, std::move(even)),
          NoiseModel::isotropic(m, 0.5)};
}

ObservationScenario demo1d_scenario() {
  return {ObservationMap::scalar_piecewise(), NoiseModel::isotropic(1, 0.25)};
}

}  // namespace encmf

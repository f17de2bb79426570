#pragma once

#include <functional>
#include <vector>

#include "encmf/rng.hpp"
#include "encmf/types.hpp"

namespace encmf {

// Observation operator h: R^n -> R^m. Linear maps expose their matrix so
// filters that require one can use it; nonlinear maps only evaluate.
class ObservationMap {
 public:
  // h(q) = q.
  static ObservationMap identity(Eigen::Index dim);
  // h(q) = q restricted to the given component indices (in the given order).
  static ObservationMap selector(Eigen::Index state_dim,
                                 std::vector<Eigen::Index> indices);
  // Scalar map: h(q) = q for q <= 0, q^2 otherwise.
  static ObservationMap scalar_piecewise();

  Vector operator()(const Vector& q) const;
  // Applies h column-by-column.
  Matrix apply(const Matrix& ensemble) const;

  bool is_linear() const { return linear_; }
  // Matrix representation; throws DomainError for nonlinear maps.
  const Matrix& matrix() const;

  Eigen::Index state_dim() const { return state_dim_; }
  Eigen::Index obs_dim() const { return obs_dim_; }

 private:
  ObservationMap(Eigen::Index state_dim, Eigen::Index obs_dim, bool linear,
                 Matrix h, std::function<Vector(const Vector&)> fn);

  Eigen::Index state_dim_;
  Eigen::Index obs_dim_;
  bool linear_;
  Matrix h_;
  std::function<Vector(const Vector&)> fn_;
};

// Mean-zero Gaussian noise. Diagonal covariances sample and evaluate without
// factorization work.
class NoiseModel {
 public:
  static NoiseModel diagonal(Vector variances);
  static NoiseModel isotropic(Eigen::Index dim, double variance);
  static NoiseModel full(Matrix cov);

  const Matrix& cov() const { return cov_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(cov_.rows()); }

  // Draws one sample, consuming dim() normals from the stream in component
  // order.
  Vector sample(RngStream& rng) const;
  // log N(x; 0, cov) including the normalization constant.
  double log_density(const Vector& x) const;

 private:
  NoiseModel(Matrix cov, bool diagonal);

  Matrix cov_;
  bool diagonal_;
  Vector sqrt_var_;     // diagonal path
  Matrix chol_lower_;   // general path
  double log_norm_;     // -(m/2) log(2 pi) - (1/2) log det cov
};

// Simulated observations of each ensemble member: column i is
// h(ensemble.col(i)) + xi_i with xi_i drawn from stream (label, step, i).
ObservationEnsemble forecast_observations(const ObservationMap& map,
                                          const NoiseModel& noise,
                                          const StateEnsemble& ensemble,
                                          const RngPolicy& rng,
                                          StreamLabel label,
                                          std::uint32_t step);

// Observation operator plus its noise, as used by a given experiment.
struct ObservationScenario {
  ObservationMap map;
  NoiseModel noise;
};

// Full-state observation with isotropic variance-4 noise on a 3-state model.
ObservationScenario l63_scenario();
// Even-index components (0, 2, ...) with isotropic variance-0.5 noise.
ObservationScenario l96_scenario(Eigen::Index state_dim = 40);
// Scalar piecewise map with variance-0.25 noise.
ObservationScenario demo1d_scenario();

}  // namespace encmf

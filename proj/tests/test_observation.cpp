#include "doctest.h"

#include "encmf/observation.hpp"
#include "encmf/rng.hpp"
#include "encmf/types.hpp"

#include <cmath>

using namespace encmf;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("identity map passes states through and exposes the unit matrix") {
  ObservationMap map = ObservationMap::identity(3);
  CHECK(map.is_linear());
  CHECK(map.state_dim() == 3);
  CHECK(map.obs_dim() == 3);
  CHECK((map.matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  Vector q(3);
  q << 1.0, -2.0, 0.5;
  CHECK((map(q) - q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("selector map picks the requested components in order") {
  ObservationMap map = ObservationMap::selector(5, {0, 2, 4});
  CHECK(map.is_linear());
  CHECK(map.obs_dim() == 3);
  Vector q(5);
  q << 10.0, 11.0, 12.0, 13.0, 14.0;
  Vector y = map(q);
  CHECK(y(0) == 10.0);
  CHECK(y(1) == 12.0);
  CHECK(y(2) == 14.0);

  // operator(), apply() and the explicit matrix agree.
  Matrix ens(5, 2);
  ens.col(0) = q;
  ens.col(1) = 2.0 * q;
  Matrix applied = map.apply(ens);
  CHECK((applied - map.matrix() * ens).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(ObservationMap::selector(5, {0, 5}), DomainError);
  CHECK_THROWS_AS(ObservationMap::selector(5, {-1}), DomainError);
}

TEST_CASE("scalar piecewise map is identity below zero and square above") {
  ObservationMap map = ObservationMap::scalar_piecewise();
  CHECK_FALSE(map.is_linear());
  CHECK(map.state_dim() == 1);
  CHECK(map.obs_dim() == 1);
  auto h = [&](double q) {
    Vector v(1);
    v << q;
    return map(v)(0);
  };
  CHECK(h(-1.5) == -1.5);
  CHECK(h(0.0) == 0.0);
  CHECK(h(2.0) == 4.0);
  CHECK(h(0.5) == 0.25);
  CHECK_THROWS_AS(map.matrix(), DomainError);
}

TEST_CASE("diagonal noise sampling has the requested second moments") {
  Vector variances(2);
  variances << 4.0, 0.25;
  NoiseModel noise = NoiseModel::diagonal(variances);
  CHECK(noise.dim() == 2);
  CHECK(noise.cov()(0, 0) == 4.0);
  CHECK(noise.cov()(1, 1) == 0.25);
  CHECK(noise.cov()(0, 1) == 0.0);

  RngPolicy policy{11};
  RngStream rng = policy.stream(StreamLabel::Oracle, 0, 0, 0);
  const int n = 100000;
  Vector sum = Vector::Zero(2), sum2 = Vector::Zero(2);
  for (int i = 0; i < n; ++i) {
    Vector x = noise.sample(rng);
    sum += x;
    sum2 += x.cwiseProduct(x);
  }
  Vector mean = sum / n;
  Vector var = sum2 / n - mean.cwiseProduct(mean);
  CHECK(std::abs(mean(0)) < 0.03);
  CHECK(std::abs(mean(1)) < 0.01);
  CHECK(var(0) == doctest::Approx(4.0).epsilon(0.03));
  CHECK(var(1) == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("full-covariance noise reproduces its correlation structure") {
  Matrix cov(2, 2);
  cov << 2.0, 0.8,  //
      0.8, 1.0;
  NoiseModel noise = NoiseModel::full(cov);
  RngPolicy policy{13};
  RngStream rng = policy.stream(StreamLabel::Oracle, 0, 0, 0);
  const int n = 200000;
  Matrix samples(2, n);
  for (int i = 0; i < n; ++i) samples.col(i) = noise.sample(rng);
  Vector mean = samples.rowwise().mean();
  Matrix centered = samples.colwise() - mean;
  Matrix emp = centered * centered.transpose() / n;
  CHECK((emp - cov).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("log_density matches the closed-form Gaussian formula") {
  // 1-D, variance 0.25: log p(x) = -log(2 pi 0.25)/2 - x^2 / 0.5.
  NoiseModel noise = NoiseModel::isotropic(1, 0.25);
  Vector x(1);
  x << 0.5;
  double expected = -0.5 * std::log(2.0 * kPi * 0.25) - 0.25 / 0.5;
  CHECK(noise.log_density(x) == doctest::Approx(expected).epsilon(1e-12));

  // Correlated 2-D case against the explicit inverse.
  Matrix cov(2, 2);
  cov << 2.0, 0.8,  //
      0.8, 1.0;
  NoiseModel full = NoiseModel::full(cov);
  Vector z(2);
  z << 0.3, -1.1;
  const double det = 2.0 * 1.0 - 0.8 * 0.8;
  Matrix inv(2, 2);
  inv << 1.0, -0.8,  //
      -0.8, 2.0;
  inv /= det;
  double quad = z.dot(inv * z);
  double expectation = -std::log(2.0 * kPi) - 0.5 * std::log(det) - 0.5 * quad;
  CHECK(full.log_density(z) == doctest::Approx(expectation).epsilon(1e-12));

  // Diagonal and full representations of the same covariance agree.
  Vector dvar(2);
  dvar << 2.0, 1.0;
  NoiseModel diag = NoiseModel::diagonal(dvar);
  NoiseModel asfull = NoiseModel::full(dvar.asDiagonal().toDenseMatrix());
  CHECK(diag.log_density(z) == doctest::Approx(asfull.log_density(z)).epsilon(1e-12));
}

TEST_CASE("noise model rejects invalid covariances") {
  Vector neg(1);
  neg << -1.0;
  CHECK_THROWS_AS(NoiseModel::diagonal(neg), DomainError);
  Matrix notspd(2, 2);
  notspd << 1.0, 2.0,  //
      2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(NoiseModel::full(notspd), DomainError);
}

TEST_CASE("forecast observations are member-addressed and reproducible") {
  ObservationMap map = ObservationMap::identity(2);
  NoiseModel noise = NoiseModel::isotropic(2, 1.0);
  RngPolicy policy{21};
  Matrix states(2, 4);
  states << 1.0, 2.0, 3.0, 4.0,  //
      -1.0, -2.0, -3.0, -4.0;

  Matrix obs1 = forecast_observations(map, noise, states, policy, StreamLabel::ForecastNoise, 3);
  Matrix obs2 = forecast_observations(map, noise, states, policy, StreamLabel::ForecastNoise, 3);
  CHECK((obs1 - obs2).cwiseAbs().maxCoeff() == 0.0);

  // Column i is h(q_i) plus the draw from stream (label, step, member=i).
  for (Eigen::Index i = 0; i < 4; ++i) {
    RngStream s = policy.stream(StreamLabel::ForecastNoise, 3, static_cast<std::uint32_t>(i));
    Vector expected = states.col(i) + noise.sample(s);
    CHECK((obs1.col(i) - expected).cwiseAbs().maxCoeff() == 0.0);
  }

  // A different step reuses nothing.
  Matrix obs3 = forecast_observations(map, noise, states, policy, StreamLabel::ForecastNoise, 4);
  CHECK((obs1 - obs3).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("bundled scenarios have the documented shapes") {
  ObservationScenario l63 = l63_scenario();
  CHECK(l63.map.state_dim() == 3);
  CHECK(l63.map.obs_dim() == 3);
  CHECK(l63.noise.cov()(0, 0) == 4.0);

  ObservationScenario l96 = l96_scenario(40);
  CHECK(l96.map.state_dim() == 40);
  CHECK(l96.map.obs_dim() == 20);
  CHECK(l96.noise.cov()(0, 0) == 0.5);
  Vector q = Vector::LinSpaced(40, 0.0, 39.0);
  Vector y = l96.map(q);
  for (Eigen::Index j = 0; j < 20; ++j) CHECK(y(j) == 2.0 * static_cast<double>(j));

  ObservationScenario demo = demo1d_scenario();
  CHECK_FALSE(demo.map.is_linear());
  CHECK(demo.noise.cov()(0, 0) == 0.25);
}

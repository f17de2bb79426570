#include "doctest.h"

#include "encmf/metrics.hpp"
#include "encmf/types.hpp"

#include <cmath>
#include <vector>

using namespace encmf;

TEST_CASE("rmse is the dimension-normalized error norm") {
  Vector mean(3), truth(3);
  mean << 3.0, 0.0, 4.0;
  truth << 0.0, 0.0, 0.0;
  CHECK(rmse_step(mean, truth) == doctest::Approx(5.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(rmse_step(truth, truth) == 0.0);
  // Equivalent form: sqrt of the mean squared component error.
  Vector a(2), b(2);
  a << 1.0, -1.0;
  b << 0.0, 1.0;
  CHECK(rmse_step(a, b) == doctest::Approx(std::sqrt((1.0 + 4.0) / 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(rmse_step(mean, a), DomainError);
}

TEST_CASE("spread is the root mean ensemble variance") {
  // 1-D ensemble {1, 3}: 1/N covariance 1 -> spread 1.
  Matrix ens(1, 2);
  ens << 1.0, 3.0;
  CHECK(spread_step(ens) == doctest::Approx(1.0).epsilon(1e-14));

  // 2-D: variances 1 and 4 -> sqrt((1+4)/2).
  Matrix e2(2, 4);
  e2 << 1.0, -1.0, 1.0, -1.0,  //
      2.0, -2.0, 2.0, -2.0;
  CHECK(spread_step(e2) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));

  // Translation does not change the spread.
  Matrix shifted = e2.colwise() + Vector::Constant(2, 100.0);
  CHECK(spread_step(shifted) == doctest::Approx(spread_step(e2)).epsilon(1e-12));

  Matrix single(1, 1);
  single << 5.0;
  CHECK_THROWS_AS(spread_step(single), DomainError);
}

TEST_CASE("empirical quantile interpolates between order statistics") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(empirical_quantile(v, 0.0) == 1.0);
  CHECK(empirical_quantile(v, 1.0) == 4.0);
  // Position p (N - 1): 0.5 * 3 = 1.5 -> halfway between 2 and 3.
  CHECK(empirical_quantile(v, 0.5) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(empirical_quantile(v, 0.25) == doctest::Approx(1.75).epsilon(1e-14));
  // Input order is irrelevant.
  std::vector<double> shuffled{3.0, 1.0, 4.0, 2.0};
  CHECK(empirical_quantile(shuffled, 0.5) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(empirical_quantile({7.0}, 0.3) == 7.0);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), DomainError);
  CHECK_THROWS_AS(empirical_quantile(v, -0.1), DomainError);
  CHECK_THROWS_AS(empirical_quantile(v, 1.1), DomainError);
}

TEST_CASE("coverage counts components inside the central 95% band") {
  // 41 members at 0, 1, ..., 40: the 2.5% and 97.5% quantiles sit at 1 and
  // 39 exactly.
  Matrix ens(2, 41);
  for (Eigen::Index i = 0; i < 41; ++i) {
    ens(0, i) = static_cast<double>(i);
    ens(1, i) = static_cast<double>(i);
  }
  Vector truth(2);
  truth << 20.0, 39.5;  // inside; outside the upper bound
  CHECK(coverage_step(ens, truth) == 1);
  truth << -0.5, 40.0;  // below; above
  CHECK(coverage_step(ens, truth) == 0);

  // A custom narrower band, [10, 30] per component; the band edges are
  // exactly representable here, and a truth right on an edge is covered.
  truth << 20.0, 36.0;
  CHECK(coverage_step(ens, truth, 0.5) == 1);
  truth << 10.0, 30.0;
  CHECK(coverage_step(ens, truth, 0.5) == 2);
  CHECK_THROWS_AS(coverage_step(ens, truth, 1.5), DomainError);
}

TEST_CASE("aggregate reports mean and midpoint median") {
  Aggregate agg = aggregate({1.0, 2.0, 3.0, 100.0});
  CHECK(agg.average == doctest::Approx(26.5).epsilon(1e-14));
  CHECK(agg.median == doctest::Approx(2.5).epsilon(1e-14));

  Aggregate odd = aggregate({5.0, 1.0, 3.0});
  CHECK(odd.average == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(odd.median == doctest::Approx(3.0).epsilon(1e-14));

  Aggregate single = aggregate({4.25});
  CHECK(single.average == 4.25);
  CHECK(single.median == 4.25);

  CHECK_THROWS_AS(aggregate({}), DomainError);
}

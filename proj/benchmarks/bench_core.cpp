// Microbenchmarks for the hot paths of the filtering loop: integration,
// ensemble statistics, gain solves, network passes, and the counter RNG.

#include <benchmark/benchmark.h>

#include "encmf/ann.hpp"
#include "encmf/models.hpp"
#include "encmf/observation.hpp"
#include "encmf/rng.hpp"
#include "encmf/stats.hpp"

#include <cstdint>

namespace {

encmf::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  encmf::RngPolicy policy{seed};
  encmf::RngStream rng = policy.stream(encmf::StreamLabel::Oracle, 0, 0, 0);
  encmf::Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
  return out;
}

void bm_rk4_lorenz63(benchmark::State& state) {
  encmf::DynamicsModel model = encmf::DynamicsModel::lorenz63();
  encmf::Vector q(3);
  q << 1.0, 1.0, 1.0;
  for (auto _ : state) {
    encmf::Vector next = model.integrate(0.0, q, 0.5, 0.01);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(bm_rk4_lorenz63);

void bm_rk4_lorenz96(benchmark::State& state) {
  encmf::DynamicsModel model = encmf::DynamicsModel::lorenz96(40, 8.0);
  encmf::Vector q = encmf::Vector::Constant(40, 8.0);
  q(0) = 8.01;
  for (auto _ : state) {
    encmf::Vector next = model.integrate(0.0, q, 0.4, 0.01);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(bm_rk4_lorenz96);

void bm_ensemble_cov(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  encmf::Matrix ens = random_matrix(40, n, 7);
  for (auto _ : state) {
    encmf::Matrix cov = encmf::ensemble_cov(ens);
    benchmark::DoNotOptimize(cov);
  }
}
BENCHMARK(bm_ensemble_cov)->Arg(200)->Arg(1000);

void bm_generalized_gain(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  encmf::Matrix states = random_matrix(40, n, 11);
  encmf::Matrix obs = random_matrix(20, n, 13);
  for (auto _ : state) {
    encmf::Matrix gain = encmf::kalman_gain_generalized(states, obs);
    benchmark::DoNotOptimize(gain);
  }
}
BENCHMARK(bm_generalized_gain)->Arg(200)->Arg(1000);

void bm_net_forward_batch(benchmark::State& state) {
  encmf::RngPolicy policy{23};
  encmf::RngStream rng = policy.stream(encmf::StreamLabel::NetInit, 0, 0, 0);
  encmf::DenseNetwork net = encmf::DenseNetwork::glorot({20, 30, 40}, rng);
  encmf::Matrix batch = random_matrix(20, 64, 29);
  for (auto _ : state) {
    encmf::Matrix out = net.forward_batch(batch);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(bm_net_forward_batch);

void bm_net_loss_and_grad(benchmark::State& state) {
  encmf::RngPolicy policy{31};
  encmf::RngStream rng = policy.stream(encmf::StreamLabel::NetInit, 0, 0, 0);
  encmf::DenseNetwork net = encmf::DenseNetwork::glorot({20, 30, 40}, rng);
  encmf::NetworkGradients grads = encmf::NetworkGradients::zeros_like(net);
  encmf::Matrix inputs = random_matrix(20, 64, 37);
  encmf::Matrix targets = random_matrix(40, 64, 41);
  for (auto _ : state) {
    double loss = encmf::loss_and_grad(net, inputs, targets, 1e-4, grads);
    benchmark::DoNotOptimize(loss);
  }
}
BENCHMARK(bm_net_loss_and_grad);

void bm_philox_normals(benchmark::State& state) {
  encmf::RngPolicy policy{43};
  encmf::RngStream rng = policy.stream(encmf::StreamLabel::Oracle, 0, 0, 0);
  for (auto _ : state) {
    double z = rng.normal();
    benchmark::DoNotOptimize(z);
  }
}
BENCHMARK(bm_philox_normals);

void bm_metric_vr(benchmark::State& state) {
  const Eigen::Index n_states = 3;
  const Eigen::Index pairs = 300 * 10;
  encmf::Matrix inputs = random_matrix(n_states, pairs, 47);
  encmf::Matrix targets = random_matrix(n_states, pairs, 53);
  encmf::AffineEstimator linear = encmf::fit_affine(targets, inputs);
  encmf::AugmentedDataset data{inputs, targets};
  for (auto _ : state) {
    double m = encmf::metric_vr(linear, data);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(bm_metric_vr);

}  // namespace

BENCHMARK_MAIN();

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "encmf/filters.hpp"
#include "encmf/observation.hpp"
#include "encmf/rng.hpp"
#include "encmf/stats.hpp"
#include "encmf/types.hpp"

namespace encmf {

// Dense feed-forward network with tanh hidden layers and a linear output
// layer. weights[l] maps layer l to layer l+1 (rows = fan-out). Batched
// evaluation treats matrix columns as samples.
struct DenseNetwork {
  std::vector<Eigen::Index> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static DenseNetwork zeros(std::vector<Eigen::Index> sizes);
  // Glorot-uniform weights (row-major draw order per layer), zero biases.
  static DenseNetwork glorot(std::vector<Eigen::Index> sizes, RngStream& rng);

  Eigen::Index input_dim() const { return layer_sizes.front(); }
  Eigen::Index output_dim() const { return layer_sizes.back(); }
  Eigen::Index parameter_count() const;

  Vector forward(const Vector& y) const;
  Matrix forward_batch(const Matrix& ys) const;
};

// Per-layer gradient slots matching a DenseNetwork's shapes.
struct NetworkGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static NetworkGradients zeros_like(const DenseNetwork& net);
};

// Mean over the batch columns of the squared output error, plus
// l2_coeff * sum of squared weights (biases unpenalized). Gradients are
// written into `grads` by reverse-mode accumulation.
double loss_and_grad(const DenseNetwork& net, const Matrix& inputs,
                     const Matrix& targets, double l2_coeff,
                     NetworkGradients& grads);

// Adam moment accumulators; step() applies one update in place.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long t = 0;
  std::vector<Matrix> m_w, v_w;
  std::vector<Vector> m_b, v_b;

  static AdamState for_network(const DenseNetwork& net);
};

void optimizer_step(DenseNetwork& net, const NetworkGradients& grads,
                    AdamState& state, double learning_rate);

// Per-component z-score transform. Columns of the fitted matrix are samples;
// scales are floored at 1e-8 so constant components stay finite.
struct Normalizer {
  Vector shift;
  Vector scale;

  static Normalizer fit(const Matrix& samples);

  Vector normalize(const Vector& x) const {
    return (x - shift).cwiseQuotient(scale);
  }
  Matrix normalize(const Matrix& xs) const {
    return ((xs.colwise() - shift).array().colwise() / scale.array()).matrix();
  }
  Vector denormalize(const Vector& z) const {
    return z.cwiseProduct(scale) + shift;
  }
  Matrix denormalize(const Matrix& zs) const {
    return ((zs.array().colwise() * scale.array()).colwise() + shift.array())
        .matrix();
  }
};

// Column p = i*M + j holds the pair (h(q_i) + xi_ij, q_i): M independent
// noise redraws per state member.
struct AugmentedDataset {
  Matrix inputs;
  Matrix targets;

  Eigen::Index size() const { return inputs.cols(); }
};

// Builds the N*M-pair dataset from the state ensemble; noise draw (i, j) comes
// from stream (AugmentNoise, step, i, j).
AugmentedDataset build_augmented(const StateEnsemble& states,
                                 const ObservationMap& map,
                                 const NoiseModel& noise, int m_aug,
                                 const RngPolicy& rng, std::uint32_t step);

// Mean squared residual after the affine part: (1/P) sum_p ||target_p -
// linear(input_p)||^2. The overload with `residual_batch` also subtracts the
// learned correction. Evaluated in original (unnormalized) units.
double metric_vr(const AffineEstimator& linear, const AugmentedDataset& data);
double metric_vr(const AffineEstimator& linear, const AugmentedDataset& data,
                 const std::function<Matrix(const Matrix&)>& residual_batch);

// a = 1 iff the corrected metric strictly beats the affine one; ties keep the
// affine model.
int select_model(double m_ann, double m_lin);

struct TrainConfig {
  int epochs_max = 300;
  double learning_rate = 0.001;
  int batch_size = 64;
  double l2_coeff = 1e-4;
  int m_aug = 10;
  double train_fraction = 0.7;
  // Stop after this many epochs without test-metric improvement; 0 trains the
  // full epochs_max.
  int patience = 30;
  std::vector<Eigen::Index> hidden_layers;  // empty: chosen by the model preset

  void validate() const;
};

struct TrainResult {
  DenseNetwork best;
  double best_metric = 0.0;
  // history[0] is the pre-training metric; one entry per completed epoch after.
  std::vector<double> history;
  int epochs_run = 0;
};

// Shuffled mini-batch optimization with a per-epoch test-metric callback.
// Retains the parameter snapshot with the lowest test metric, the initial
// network included. `test_metric` evaluates the current network; `epoch_rng`
// supplies the shuffle stream for each epoch (1-based).
TrainResult train_with_callback(
    DenseNetwork net, const Matrix& train_inputs, const Matrix& train_targets,
    const TrainConfig& cfg,
    const std::function<double(const DenseNetwork&)>& test_metric,
    const std::function<RngStream(int epoch)>& epoch_rng);

enum class ForceA { Auto, Zero, One };

// Everything the ML analysis update needs, plus the selection diagnostics that
// go into the run records.
struct CmFit {
  ConditionalMeanModel model;
  int a = 0;
  double m_ann = 0.0;
  double m_lin = 0.0;
  int epochs_run = 0;
  bool trained = false;
  // Best network of this fit, for carrying across sequential assimilation
  // steps; empty when training was skipped.
  std::optional<DenseNetwork> network;
};

// Full conditional-mean pipeline for one assimilation step: affine fit on the
// complete forecast ensembles; member split into train/test (deterministic in
// the seed); augmented datasets per split; network trained on normalized
// residuals q - g_l(y); both test metrics; selection flag. ForceA::Zero skips
// training entirely and returns the affine-only model.
//
// `warm_start`, when given and shaped like the configured network, seeds
// training instead of a fresh random init. Sequential filtering passes the
// previous step's `network` here so the correction keeps refining one model
// on the slowly drifting forecast distribution rather than relearning it
// from scratch each step; the best-snapshot retention still includes the
// warm-started initial state, so a stale model can only help, never force a
// worse fit past model selection.
CmFit fit_conditional_mean(const StateEnsemble& states,
                           const ObservationEnsemble& observations,
                           const ObservationMap& map, const NoiseModel& noise,
                           const TrainConfig& cfg, const RngPolicy& rng,
                           std::uint32_t step, ForceA force_a = ForceA::Auto,
                           const DenseNetwork* warm_start = nullptr);

// Self-describing snapshot of a trained correction (format tag
// "encmf-net-v1"): layer sizes, activation tag, row-major parameter arrays,
// and both normalizers.
std::string save_network_json(const DenseNetwork& net, const Normalizer& in_nrm,
                              const Normalizer& tgt_nrm);
void load_network_json(const std::string& text, DenseNetwork& net,
                       Normalizer& in_nrm, Normalizer& tgt_nrm);

}  // namespace encmf

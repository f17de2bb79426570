#include "encmf/ann.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "json.hpp"

namespace encmf {

namespace {

void check_sizes(const std::vector<Eigen::Index>& sizes) {
  if (sizes.size() < 2)
    throw DomainError("DenseNetwork: needs input and output layers");
  for (const Eigen::Index s : sizes)
    if (s < 1) throw DomainError("DenseNetwork: layer sizes must be >= 1");
}

}  // namespace

DenseNetwork DenseNetwork::zeros(std::vector<Eigen::Index> sizes) {
  check_sizes(sizes);
  DenseNetwork net;
  net.layer_sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    net.weights.push_back(
        Matrix::Zero(net.layer_sizes[l + 1], net.layer_sizes[l]));
    net.biases.push_back(Vector::Zero(net.layer_sizes[l + 1]));
  }
  return net;
}

DenseNetwork DenseNetwork::glorot(std::vector<Eigen::Index> sizes,
                                  RngStream& rng) {
  DenseNetwork net = zeros(std::move(sizes));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Matrix& w = net.weights[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = limit * (2.0 * rng.uniform() - 1.0);
  }
  return net;
}

Eigen::Index DenseNetwork::parameter_count() const {
  Eigen::Index total = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    total += weights[l].size() + biases[l].size();
  return total;
}

Vector DenseNetwork::forward(const Vector& y) const {
  if (y.size() != input_dim())
    throw DomainError("DenseNetwork::forward: input dimension mismatch");
  Vector a = y;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Vector z = weights[l] * a + biases[l];
    if (l + 1 < weights.size()) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
  }
  return a;
}

Matrix DenseNetwork::forward_batch(const Matrix& ys) const {
  if (ys.rows() != input_dim())
    throw DomainError("DenseNetwork::forward_batch: input dimension mismatch");
  Matrix a = ys;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Matrix z = (weights[l] * a).colwise() + biases[l];
    if (l + 1 < weights.size()) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
  }
  return a;
}

NetworkGradients NetworkGradients::zeros_like(const DenseNetwork& net) {
  NetworkGradients g;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.biases.push_back(Vector::Zero(net.biases[l].size()));
  }
  return g;
}

double loss_and_grad(const DenseNetwork& net, const Matrix& inputs,
                     const Matrix& targets, double l2_coeff,
                     NetworkGradients& grads) {
  const Eigen::Index batch = inputs.cols();
  if (batch < 1) throw DomainError("loss_and_grad: empty batch");
  if (targets.cols() != batch)
    throw DomainError("loss_and_grad: input/target batch mismatch");
  if (inputs.rows() != net.input_dim() || targets.rows() != net.output_dim())
    throw DomainError("loss_and_grad: dimension mismatch");

  const std::size_t depth = net.weights.size();
  // activations[0] is the input; activations[l+1] the output of layer l.
  std::vector<Matrix> activations(depth + 1);
  activations[0] = inputs;
  for (std::size_t l = 0; l < depth; ++l) {
    Matrix z = (net.weights[l] * activations[l]).colwise() + net.biases[l];
    if (l + 1 < depth) {
      activations[l + 1] = z.array().tanh().matrix();
    } else {
      activations[l + 1] = std::move(z);
    }
  }

  const Matrix err = activations[depth] - targets;
  double loss = err.squaredNorm() / static_cast<double>(batch);
  for (std::size_t l = 0; l < depth; ++l)
    loss += l2_coeff * net.weights[l].squaredNorm();
  if (!std::isfinite(loss))
    throw NumericalError("loss_and_grad: non-finite loss");

  Matrix delta = (2.0 / static_cast<double>(batch)) * err;
  for (std::size_t l = depth; l-- > 0;) {
    grads.weights[l].noalias() = delta * activations[l].transpose();
    grads.weights[l] += (2.0 * l2_coeff) * net.weights[l];
    grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      // tanh'(z) = 1 - tanh(z)^2, with tanh(z) cached in activations[l].
      delta = ((net.weights[l].transpose() * delta).array() *
               (1.0 - activations[l].array().square()))
                  .matrix();
    }
  }
  return loss;
}

AdamState AdamState::for_network(const DenseNetwork& net) {
  AdamState s;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    s.m_w.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.v_w.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.m_b.push_back(Vector::Zero(net.biases[l].size()));
    s.v_b.push_back(Vector::Zero(net.biases[l].size()));
  }
  return s;
}

void optimizer_step(DenseNetwork& net, const NetworkGradients& grads,
                    AdamState& state, double learning_rate) {
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite())
      throw NumericalError("optimizer_step: non-finite gradients");
  }
  ++state.t;
  const double corr1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    state.m_w[l] = state.beta1 * state.m_w[l] + (1.0 - state.beta1) * grads.weights[l];
    state.v_w[l] = (state.beta2 * state.v_w[l].array() +
                    (1.0 - state.beta2) * grads.weights[l].array().square())
                       .matrix();
    net.weights[l] -= (learning_rate * (state.m_w[l].array() / corr1) /
                       ((state.v_w[l].array() / corr2).sqrt() + state.epsilon))
                          .matrix();
    state.m_b[l] = state.beta1 * state.m_b[l] + (1.0 - state.beta1) * grads.biases[l];
    state.v_b[l] = (state.beta2 * state.v_b[l].array() +
                    (1.0 - state.beta2) * grads.biases[l].array().square())
                       .matrix();
    net.biases[l] -= (learning_rate * (state.m_b[l].array() / corr1) /
                      ((state.v_b[l].array() / corr2).sqrt() + state.epsilon))
                         .matrix();
  }
}

Normalizer Normalizer::fit(const Matrix& samples) {
  if (samples.cols() < 1)
    throw DomainError("Normalizer::fit: needs at least one sample");
  Normalizer nrm;
  nrm.shift = samples.rowwise().mean();
  const Matrix dev = samples.colwise() - nrm.shift;
  Vector var = dev.array().square().matrix().rowwise().mean();
  nrm.scale = var.array().sqrt().max(1e-8).matrix();
  return nrm;
}

AugmentedDataset build_augmented(const StateEnsemble& states,
                                 const ObservationMap& map,
                                 const NoiseModel& noise, int m_aug,
                                 const RngPolicy& rng, std::uint32_t step) {
  if (m_aug < 1) throw DomainError("build_augmented: m_aug must be >= 1");
  const Eigen::Index n_members = states.cols();
  if (n_members < 1)
    throw DomainError("build_augmented: empty state ensemble");
  AugmentedDataset data;
  data.inputs = Matrix(map.obs_dim(), n_members * m_aug);
  data.targets = Matrix(states.rows(), n_members * m_aug);
  for (Eigen::Index i = 0; i < n_members; ++i) {
    const Vector h_q = map(states.col(i));
    for (int j = 0; j < m_aug; ++j) {
      RngStream stream = rng.stream(StreamLabel::AugmentNoise, step,
                                    static_cast<std::uint32_t>(i),
                                    static_cast<std::uint32_t>(j));
      const Eigen::Index p = i * m_aug + j;
      data.inputs.col(p) = h_q + noise.sample(stream);
      data.targets.col(p) = states.col(i);
    }
  }
  return data;
}

double metric_vr(const AffineEstimator& linear, const AugmentedDataset& data) {
  if (data.size() < 1) throw DomainError("metric_vr: empty dataset");
  const Matrix res = data.targets - linear.apply(data.inputs);
  return res.colwise().squaredNorm().sum() / static_cast<double>(data.size());
}

double metric_vr(const AffineEstimator& linear, const AugmentedDataset& data,
                 const std::function<Matrix(const Matrix&)>& residual_batch) {
  if (data.size() < 1) throw DomainError("metric_vr: empty dataset");
  const Matrix res =
      data.targets - linear.apply(data.inputs) - residual_batch(data.inputs);
  return res.colwise().squaredNorm().sum() / static_cast<double>(data.size());
}

int select_model(double m_ann, double m_lin) {
  if (!std::isfinite(m_ann) || !std::isfinite(m_lin))
    throw DomainError("select_model: metrics must be finite");
  return m_lin > m_ann ? 1 : 0;
}

void TrainConfig::validate() const {
  if (epochs_max < 1) throw ConfigError("train: epochs_max must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (l2_coeff < 0.0) throw ConfigError("train: l2_coeff must be >= 0");
  if (m_aug < 1) throw ConfigError("train: m_aug must be >= 1");
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
    throw ConfigError("train: train_fraction must lie in (0, 1)");
  if (patience < 0) throw ConfigError("train: patience must be >= 0");
  for (const Eigen::Index h : hidden_layers)
    if (h < 1) throw ConfigError("train: hidden layer sizes must be >= 1");
}

TrainResult train_with_callback(
    DenseNetwork net, const Matrix& train_inputs, const Matrix& train_targets,
    const TrainConfig& cfg,
    const std::function<double(const DenseNetwork&)>& test_metric,
    const std::function<RngStream(int epoch)>& epoch_rng) {
  cfg.validate();
  const Eigen::Index n_pairs = train_inputs.cols();
  if (n_pairs < 1) throw DomainError("train_with_callback: empty training set");
  if (train_targets.cols() != n_pairs)
    throw DomainError("train_with_callback: input/target size mismatch");

  TrainResult result;
  result.best = net;
  result.best_metric = test_metric(net);
  result.history.push_back(result.best_metric);

  AdamState adam = AdamState::for_network(net);
  NetworkGradients grads = NetworkGradients::zeros_like(net);
  const Eigen::Index batch =
      std::min<Eigen::Index>(cfg.batch_size, n_pairs);
  Matrix batch_in(train_inputs.rows(), batch);
  Matrix batch_tgt(train_targets.rows(), batch);

  int stale = 0;
  for (int epoch = 1; epoch <= cfg.epochs_max; ++epoch) {
    RngStream shuffle_rng = epoch_rng(epoch);
    const std::vector<Eigen::Index> order =
        shuffled_indices(n_pairs, shuffle_rng);
    for (Eigen::Index start = 0; start + batch <= n_pairs; start += batch) {
      for (Eigen::Index c = 0; c < batch; ++c) {
        batch_in.col(c) = train_inputs.col(order[start + c]);
        batch_tgt.col(c) = train_targets.col(order[start + c]);
      }
      loss_and_grad(net, batch_in, batch_tgt, cfg.l2_coeff, grads);
      optimizer_step(net, grads, adam, cfg.learning_rate);
    }
    result.epochs_run = epoch;
    const double metric = test_metric(net);
    result.history.push_back(metric);
    if (metric < result.best_metric) {
      result.best = net;
      result.best_metric = metric;
      stale = 0;
    } else {
      ++stale;
      if (cfg.patience > 0 && stale >= cfg.patience) break;
    }
  }
  return result;
}

namespace {

std::function<Matrix(const Matrix&)> make_residual_batch(
    const DenseNetwork& net, const Normalizer& in_nrm,
    const Normalizer& tgt_nrm) {
  return [net, in_nrm, tgt_nrm](const Matrix& ys) {
    return tgt_nrm.denormalize(net.forward_batch(in_nrm.normalize(ys)));
  };
}

}  // namespace

CmFit fit_conditional_mean(const StateEnsemble& states,
                           const ObservationEnsemble& observations,
                           const ObservationMap& map, const NoiseModel& noise,
                           const TrainConfig& cfg, const RngPolicy& rng,
                           std::uint32_t step, ForceA force_a,
                           const DenseNetwork* warm_start) {
  const Eigen::Index n_members = states.cols();
  if (n_members < 2)
    throw DomainError("fit_conditional_mean: needs at least two members");
  cfg.validate();

  CmFit fit;
  fit.model.linear = fit_affine(states, observations);
  if (force_a == ForceA::Zero) return fit;

  const AugmentedDataset full =
      build_augmented(states, map, noise, cfg.m_aug, rng, step);

  // Member split: a seeded permutation independent of the assimilation step,
  // so the partition is a function of (seed, N) alone.
  RngStream split_rng = rng.stream(StreamLabel::TrainShuffle, 0, 0, 1);
  const std::vector<Eigen::Index> perm =
      shuffled_indices(n_members, split_rng);
  Eigen::Index n_train = static_cast<Eigen::Index>(
      std::llround(cfg.train_fraction * static_cast<double>(n_members)));
  n_train = std::clamp<Eigen::Index>(n_train, 1, n_members - 1);

  const auto gather = [&](Eigen::Index first, Eigen::Index count) {
    AugmentedDataset out;
    out.inputs = Matrix(full.inputs.rows(), count * cfg.m_aug);
    out.targets = Matrix(full.targets.rows(), count * cfg.m_aug);
    for (Eigen::Index s = 0; s < count; ++s) {
      const Eigen::Index member = perm[first + s];
      out.inputs.middleCols(s * cfg.m_aug, cfg.m_aug) =
          full.inputs.middleCols(member * cfg.m_aug, cfg.m_aug);
      out.targets.middleCols(s * cfg.m_aug, cfg.m_aug) =
          full.targets.middleCols(member * cfg.m_aug, cfg.m_aug);
    }
    return out;
  };
  const AugmentedDataset train_set = gather(0, n_train);
  const AugmentedDataset test_set = gather(n_train, n_members - n_train);

  // The network learns the residual after the affine part, in standardized
  // coordinates fitted on the training split only.
  const Matrix train_residuals =
      train_set.targets - fit.model.linear.apply(train_set.inputs);
  const Normalizer in_nrm = Normalizer::fit(train_set.inputs);
  const Normalizer tgt_nrm = Normalizer::fit(train_residuals);

  std::vector<Eigen::Index> sizes;
  sizes.push_back(map.obs_dim());
  for (const Eigen::Index h : cfg.hidden_layers) sizes.push_back(h);
  sizes.push_back(states.rows());
  DenseNetwork net;
  if (warm_start != nullptr && warm_start->layer_sizes == sizes) {
    net = *warm_start;
  } else {
    RngStream init_rng = rng.stream(StreamLabel::NetInit, step, 0, 0);
    net = DenseNetwork::glorot(std::move(sizes), init_rng);
  }

  const auto test_metric = [&](const DenseNetwork& candidate) {
    return metric_vr(fit.model.linear, test_set,
                     make_residual_batch(candidate, in_nrm, tgt_nrm));
  };
  const auto epoch_rng = [&](int epoch) {
    return rng.stream(StreamLabel::TrainShuffle, step,
                      static_cast<std::uint32_t>(epoch), 0);
  };
  TrainResult trained = train_with_callback(
      std::move(net), in_nrm.normalize(train_set.inputs),
      tgt_nrm.normalize(train_residuals), cfg, test_metric, epoch_rng);

  fit.trained = true;
  fit.epochs_run = trained.epochs_run;
  fit.m_ann = trained.best_metric;
  fit.m_lin = metric_vr(fit.model.linear, test_set);
  fit.a = (force_a == ForceA::One) ? 1 : select_model(fit.m_ann, fit.m_lin);
  fit.model.residual_batch =
      make_residual_batch(trained.best, in_nrm, tgt_nrm);
  fit.network = trained.best;
  const DenseNetwork best = std::move(trained.best);
  fit.model.residual = [best, in_nrm, tgt_nrm](const Vector& y) {
    return tgt_nrm.denormalize(best.forward(in_nrm.normalize(y)));
  };
  fit.model.use_residual = (fit.a == 1);
  return fit;
}

std::string save_network_json(const DenseNetwork& net, const Normalizer& in_nrm,
                              const Normalizer& tgt_nrm) {
  nlohmann::json doc;
  doc["format"] = "encmf-net-v1";
  doc["activation"] = "tanh";
  doc["layer_sizes"] = net.layer_sizes;
  std::vector<std::vector<double>> weights, biases;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(net.weights[l].size()));
    for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c)
        w.push_back(net.weights[l](r, c));
    weights.push_back(std::move(w));
    biases.emplace_back(net.biases[l].data(),
                        net.biases[l].data() + net.biases[l].size());
  }
  doc["weights"] = weights;
  doc["biases"] = biases;
  const auto dump_nrm = [](const Normalizer& nrm) {
    nlohmann::json j;
    j["shift"] = std::vector<double>(nrm.shift.data(),
                                     nrm.shift.data() + nrm.shift.size());
    j["scale"] = std::vector<double>(nrm.scale.data(),
                                     nrm.scale.data() + nrm.scale.size());
    return j;
  };
  doc["input_normalizer"] = dump_nrm(in_nrm);
  doc["target_normalizer"] = dump_nrm(tgt_nrm);
  return doc.dump(2);
}

void load_network_json(const std::string& text, DenseNetwork& net,
                       Normalizer& in_nrm, Normalizer& tgt_nrm) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.value("format", "") != std::string("encmf-net-v1"))
    throw ConfigError("load_network_json: unrecognized format tag");
  if (doc.value("activation", "") != std::string("tanh"))
    throw ConfigError("load_network_json: unsupported activation");
  const auto sizes = doc.at("layer_sizes").get<std::vector<Eigen::Index>>();
  net = DenseNetwork::zeros(sizes);
  const auto weights = doc.at("weights").get<std::vector<std::vector<double>>>();
  const auto biases = doc.at("biases").get<std::vector<std::vector<double>>>();
  if (weights.size() != net.weights.size() || biases.size() != net.biases.size())
    throw ConfigError("load_network_json: layer count mismatch");
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Matrix& w = net.weights[l];
    if (weights[l].size() != static_cast<std::size_t>(w.size()) ||
        biases[l].size() != static_cast<std::size_t>(net.biases[l].size()))
      throw ConfigError("load_network_json: parameter count mismatch");
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = weights[l][k++];
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r)
      net.biases[l][r] = biases[l][static_cast<std::size_t>(r)];
  }
  const auto load_nrm = [](const nlohmann::json& j) {
    Normalizer nrm;
    const auto shift = j.at("shift").get<std::vector<double>>();
    const auto scale = j.at("scale").get<std::vector<double>>();
    nrm.shift = Eigen::Map<const Vector>(shift.data(),
                                         static_cast<Eigen::Index>(shift.size()));
    nrm.scale = Eigen::Map<const Vector>(scale.data(),
                                         static_cast<Eigen::Index>(scale.size()));
    return nrm;
  };
  in_nrm = load_nrm(doc.at("input_normalizer"));
  tgt_nrm = load_nrm(doc.at("target_normalizer"));
}

}  // namespace encmf

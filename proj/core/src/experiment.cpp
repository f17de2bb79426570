#include "encmf/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "encmf/ann.hpp"
#include "encmf/filters.hpp"
#include "encmf/stats.hpp"
#include "json.hpp"

namespace encmf {

namespace {

DynamicsModel model_for(const ExperimentConfig& cfg) {
  return DynamicsModel::from_name(cfg.model);
}

}  // namespace

ObservationScenario scenario_for_model(const std::string& model_name) {
  if (model_name == "lorenz63") return l63_scenario();
  if (model_name == "lorenz96") return l96_scenario();
  throw ConfigError("no observation scenario for model: " + model_name);
}

TrainConfig resolved_train_config(const ExperimentConfig& cfg) {
  TrainConfig train = cfg.train;
  if (train.hidden_layers.empty()) {
    train.hidden_layers = (cfg.model == "lorenz96")
                              ? std::vector<Eigen::Index>{30}
                              : std::vector<Eigen::Index>{20};
  }
  return train;
}

TwinData synthesize_truth_and_obs(const ExperimentConfig& cfg,
                                  const DynamicsModel& model,
                                  const ObservationScenario& scenario,
                                  const RngPolicy& rng) {
  const Eigen::Index n = model.dim();
  TwinData data;
  data.truth = Matrix(n, cfg.steps);
  data.observations = Matrix(scenario.map.obs_dim(), cfg.steps);
  RngStream init = rng.stream(StreamLabel::TruthInit);
  Vector q = init.normal_vector(n);
  for (int k = 1; k <= cfg.steps; ++k) {
    q = model.integrate(static_cast<double>(k - 1) * cfg.dt_obs, std::move(q),
                        cfg.dt_obs, cfg.dt);
    data.truth.col(k - 1) = q;
    RngStream obs_rng =
        rng.stream(StreamLabel::ObsNoise, static_cast<std::uint32_t>(k));
    data.observations.col(k - 1) = scenario.map(q) + scenario.noise.sample(obs_rng);
  }
  return data;
}

StateEnsemble init_ensemble(const ExperimentConfig& cfg, Eigen::Index dim,
                            const RngPolicy& rng) {
  StateEnsemble ens(dim, cfg.n_ens);
  for (int i = 0; i < cfg.n_ens; ++i) {
    RngStream member_rng = rng.stream(StreamLabel::EnsembleInit, 0,
                                      static_cast<std::uint32_t>(i));
    ens.col(i) = member_rng.normal_vector(dim);
  }
  return ens;
}

StepResult run_filter_step(const StateEnsemble& current, const Vector& observed,
                           const Vector& truth, int step,
                           const ExperimentConfig& cfg,
                           const DynamicsModel& model,
                           const ObservationScenario& scenario,
                           const RngPolicy& rng, int* fallback_count,
                           std::optional<DenseNetwork>* carried_net) {
  const double t0 = static_cast<double>(step - 1) * cfg.dt_obs;
  StateEnsemble forecast(current.rows(), current.cols());
  for (Eigen::Index i = 0; i < current.cols(); ++i)
    forecast.col(i) =
        model.integrate(t0, current.col(i), cfg.dt_obs, cfg.dt);

  AnalysisInput in;
  in.observations = forecast_observations(
      scenario.map, scenario.noise, forecast, rng, StreamLabel::ForecastNoise,
      static_cast<std::uint32_t>(step));
  in.states = std::move(forecast);
  in.observed = observed;

  StepResult result;
  result.record.step = step;
  result.record.t = static_cast<double>(step) * cfg.dt_obs;

  const auto start = std::chrono::steady_clock::now();
  if (cfg.filter == "enkf") {
    if (!scenario.map.is_linear())
      throw ConfigError("enkf requires a linear observation map");
    result.analysis =
        enkf_analysis(in, scenario.map.matrix(), scenario.noise.cov());
  } else if (cfg.filter == "genkf") {
    result.analysis = genkf_analysis(in);
  } else if (cfg.filter == "mlencmf") {
    CmFit fit;
    const DenseNetwork* warm =
        (carried_net != nullptr && carried_net->has_value())
            ? &carried_net->value()
            : nullptr;
    try {
      fit = fit_conditional_mean(in.states, in.observations, scenario.map,
                                 scenario.noise, resolved_train_config(cfg),
                                 rng, static_cast<std::uint32_t>(step),
                                 cfg.force_a, warm);
    } catch (const NumericalError& e) {
      std::cerr << "warning: network training failed at step " << step << " ("
                << e.what() << "); falling back to the affine update\n";
      if (fallback_count != nullptr) ++(*fallback_count);
      fit = CmFit{};
      fit.model.linear = fit_affine(in.states, in.observations);
    }
    result.analysis = mlencmf_analysis(in, fit.model);
    result.record.a = fit.a;
    result.record.m_ann = fit.m_ann;
    result.record.m_lin = fit.m_lin;
    if (carried_net != nullptr && fit.network.has_value())
      *carried_net = std::move(fit.network);
  } else {
    throw ConfigError("filter \"" + cfg.filter +
                      "\" is not available in twin experiments");
  }
  const auto stop = std::chrono::steady_clock::now();
  result.record.analysis_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();

  result.record.truth = truth;
  result.record.observation = observed;
  result.record.mean = ensemble_mean(result.analysis);
  result.record.rmse = rmse_step(result.record.mean, truth);
  result.record.spread = spread_step(result.analysis);
  result.record.covered = coverage_step(result.analysis, truth);
  result.record.n_components = static_cast<int>(current.rows());
  return result;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_records_csv(const std::string& path,
                       const std::vector<AssimilationRecord>& records,
                       bool timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write records file: " + path);
  out << "step,t,rmse,spread,covered,n_components,a,m_ann,m_lin,analysis_ms\n";
  for (const AssimilationRecord& r : records) {
    out << r.step << ',' << format_g17(r.t) << ',' << format_g17(r.rmse) << ','
        << format_g17(r.spread) << ',' << r.covered << ',' << r.n_components
        << ',' << r.a << ',' << format_g17(r.m_ann) << ','
        << format_g17(r.m_lin) << ','
        << format_g17(timing ? r.analysis_ms : 0.0) << '\n';
  }
}

void write_summary_json(const std::string& path, const ExperimentConfig& cfg,
                        const RunResult& result) {
  nlohmann::json doc;
  doc["config"] = nlohmann::json::parse(config_to_json(cfg));
  doc["metrics"]["avg_rmse"] = result.metrics.avg_rmse;
  doc["metrics"]["median_rmse"] = result.metrics.median_rmse;
  doc["metrics"]["avg_spread"] = result.metrics.avg_spread;
  doc["metrics"]["coverage_prob"] = result.metrics.coverage_prob;
  doc["n_steps"] = static_cast<int>(result.records.size());
  doc["burn_in_steps"] = result.burn_in_steps;
  doc["n_train_fallbacks"] = result.n_train_fallbacks;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write summary file: " + path);
  out << doc.dump(2) << '\n';
}

namespace {

void aggregate_run(const ExperimentConfig& cfg, RunResult& result) {
  const int total = static_cast<int>(result.records.size());
  if (total == 0) return;
  result.burn_in_steps = cfg.burn_in ? total / 10 : 0;
  std::vector<double> rmse, spread;
  long covered = 0;
  long components = 0;
  for (int k = result.burn_in_steps; k < total; ++k) {
    const AssimilationRecord& r = result.records[static_cast<std::size_t>(k)];
    rmse.push_back(r.rmse);
    spread.push_back(r.spread);
    covered += r.covered;
    components += r.n_components;
  }
  result.metrics.rmse_series = rmse;
  const Aggregate rmse_agg = aggregate(rmse);
  result.metrics.avg_rmse = rmse_agg.average;
  result.metrics.median_rmse = rmse_agg.median;
  result.metrics.avg_spread = aggregate(spread).average;
  result.metrics.coverage_prob =
      components > 0 ? static_cast<double>(covered) / static_cast<double>(components)
                     : 0.0;
}

void flush_outputs(const ExperimentConfig& cfg, const RunResult& result) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::create_directories(cfg.out_dir);
  write_records_csv(cfg.out_dir + "/records.csv", result.records, cfg.timing);
  write_summary_json(cfg.out_dir + "/summary.json", cfg, result);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.filter == "cmf-oracle-1d")
    throw ConfigError(
        "filter cmf-oracle-1d applies to the static scalar demo only (use the "
        "demo1d command)");
  const DynamicsModel model = model_for(cfg);
  const ObservationScenario scenario = scenario_for_model(cfg.model);
  const RngPolicy rng{cfg.seed};

  const TwinData twin = synthesize_truth_and_obs(cfg, model, scenario, rng);
  StateEnsemble ensemble = init_ensemble(cfg, model.dim(), rng);

  RunResult result;
  result.records.reserve(static_cast<std::size_t>(cfg.steps));
  // The learned correction is carried across steps: each analysis refines the
  // previous step's network on the new forecast ensemble.
  std::optional<DenseNetwork> carried_net;
  try {
    for (int k = 1; k <= cfg.steps; ++k) {
      StepResult step =
          run_filter_step(ensemble, twin.observations.col(k - 1),
                          twin.truth.col(k - 1), k, cfg, model, scenario, rng,
                          &result.n_train_fallbacks, &carried_net);
      ensemble = std::move(step.analysis);
      result.records.push_back(std::move(step.record));
    }
  } catch (...) {
    aggregate_run(cfg, result);
    flush_outputs(cfg, result);
    throw;
  }
  aggregate_run(cfg, result);
  flush_outputs(cfg, result);
  return result;
}

}  // namespace encmf

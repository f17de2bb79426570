// encmf — command-line front end for the ensemble filtering toolkit.
//
// Subcommands:
//   run     twin experiment: synthesize a truth/observation sequence, run one
//           filter over it, write records.csv + summary.json
//   demo1d  static scalar Bayesian update study with an importance-sampling
//           reference posterior; writes curve/variance/density CSVs
//   sweep   run a family of twin experiments along one config axis and
//           collect summary metrics in a single CSV
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure,
// 1 anything unexpected.

#include "CLI11.hpp"

#include "encmf/config.hpp"
#include "encmf/demo1d.hpp"
#include "encmf/experiment.hpp"
#include "encmf/sweep.hpp"
#include "encmf/types.hpp"

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct RunFlags {
  std::string config_path;
  std::string model;
  std::string filter;
  long long n_ens = 0;
  double dt = 0.0;
  double dt_obs = 0.0;
  long long steps = 0;
  std::uint64_t seed = 0;
  std::string force_a;
  std::string out_dir;
  bool burn_in = false;
  bool timing = false;

  long long epochs = 0;
  double learning_rate = 0.0;
  long long batch_size = 0;
  double l2 = 0.0;
  long long m_aug = 0;
  double train_fraction = 0.0;
  long long patience = 0;
  std::vector<long long> hidden;
};

// Attaches the twin-experiment options shared by `run` and `sweep`.
void add_run_options(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; command-line flags override its values");
  cmd->add_option("--model", f.model, "dynamics model: lorenz63 | lorenz96");
  cmd->add_option("--filter", f.filter, "filter: enkf | genkf | mlencmf");
  cmd->add_option("--n-ens", f.n_ens, "ensemble size");
  cmd->add_option("--dt", f.dt, "integrator step size");
  cmd->add_option("--dt-obs", f.dt_obs, "time between observations (integer multiple of --dt)");
  cmd->add_option("--steps", f.steps, "number of assimilation cycles");
  cmd->add_option("--seed", f.seed, "master RNG seed");
  cmd->add_option("--force-a", f.force_a,
                  "override the learned-correction switch: 0 (skip training), 1, or auto");
  cmd->add_option("--out-dir", f.out_dir, "directory for records.csv and summary.json");
  cmd->add_flag("--burn-in", f.burn_in, "drop the first 10% of cycles from aggregate metrics");
  cmd->add_flag("--timing", f.timing, "record wall-clock analysis times in records.csv");

  cmd->add_option("--epochs", f.epochs, "max training epochs per cycle");
  cmd->add_option("--learning-rate", f.learning_rate, "Adam learning rate");
  cmd->add_option("--batch-size", f.batch_size, "minibatch size");
  cmd->add_option("--l2", f.l2, "L2 penalty coefficient on weights");
  cmd->add_option("--m-aug", f.m_aug, "synthetic observations per member in the training set");
  cmd->add_option("--train-fraction", f.train_fraction, "fraction of members assigned to the training split");
  cmd->add_option("--patience", f.patience, "early-stop patience in epochs (0 disables)");
  cmd->add_option("--hidden", f.hidden, "hidden layer widths, e.g. --hidden 20,20")->delimiter(',');
}

// File config first (if any), then every flag the user actually passed on top.
encmf::ExperimentConfig resolve_config(const CLI::App* cmd, const RunFlags& f) {
  encmf::ExperimentConfig cfg;
  if (cmd->count("--config") > 0) cfg = encmf::load_config_file(f.config_path);

  if (cmd->count("--model") > 0) cfg.model = f.model;
  if (cmd->count("--filter") > 0) cfg.filter = f.filter;
  if (cmd->count("--n-ens") > 0) cfg.n_ens = static_cast<Eigen::Index>(f.n_ens);
  if (cmd->count("--dt") > 0) cfg.dt = f.dt;
  if (cmd->count("--dt-obs") > 0) cfg.dt_obs = f.dt_obs;
  if (cmd->count("--steps") > 0) cfg.steps = static_cast<Eigen::Index>(f.steps);
  if (cmd->count("--seed") > 0) cfg.seed = f.seed;
  if (cmd->count("--force-a") > 0) cfg.force_a = encmf::parse_force_a(f.force_a);
  if (cmd->count("--out-dir") > 0) cfg.out_dir = f.out_dir;
  if (cmd->count("--burn-in") > 0) cfg.burn_in = f.burn_in;
  if (cmd->count("--timing") > 0) cfg.timing = f.timing;

  if (cmd->count("--epochs") > 0) cfg.train.epochs_max = static_cast<Eigen::Index>(f.epochs);
  if (cmd->count("--learning-rate") > 0) cfg.train.learning_rate = f.learning_rate;
  if (cmd->count("--batch-size") > 0) cfg.train.batch_size = static_cast<Eigen::Index>(f.batch_size);
  if (cmd->count("--l2") > 0) cfg.train.l2_coeff = f.l2;
  if (cmd->count("--m-aug") > 0) cfg.train.m_aug = static_cast<Eigen::Index>(f.m_aug);
  if (cmd->count("--train-fraction") > 0) cfg.train.train_fraction = f.train_fraction;
  if (cmd->count("--patience") > 0) cfg.train.patience = static_cast<Eigen::Index>(f.patience);
  if (cmd->count("--hidden") > 0) {
    cfg.train.hidden_layers.clear();
    for (long long w : f.hidden) cfg.train.hidden_layers.push_back(static_cast<Eigen::Index>(w));
  }
  return cfg;
}

int do_run(const CLI::App* cmd, const RunFlags& f) {
  encmf::ExperimentConfig cfg = resolve_config(cmd, f);
  encmf::RunResult result = encmf::run_experiment(cfg);
  std::printf("model=%s filter=%s n_ens=%lld steps=%lld seed=%llu\n", cfg.model.c_str(),
              cfg.filter.c_str(), static_cast<long long>(cfg.n_ens),
              static_cast<long long>(cfg.steps), static_cast<unsigned long long>(cfg.seed));
  std::printf("avg_rmse=%.6g median_rmse=%.6g avg_spread=%.6g coverage=%.4f\n",
              result.metrics.avg_rmse, result.metrics.median_rmse, result.metrics.avg_spread,
              result.metrics.coverage_prob);
  if (result.n_train_fallbacks > 0)
    std::printf("train_fallbacks=%lld\n", static_cast<long long>(result.n_train_fallbacks));
  if (!cfg.out_dir.empty()) std::printf("outputs written to %s\n", cfg.out_dir.c_str());
  return 0;
}

int do_demo1d(encmf::Demo1dConfig& cfg) {
  encmf::Demo1dResult result = encmf::run_demo1d(cfg);
  std::printf("linear estimator: gain=%.6g offset=%.6g\n", result.linear.gain(0, 0),
              result.linear.offset(0));
  std::printf("assimilated variance: mean-shift=%.6g gain-only=%.6g expected-conditional=%.6g\n",
              result.encmf_var, result.genkf_var, result.expected_cond_var);
  for (std::size_t c = 0; c < result.cases.size(); ++c) {
    const encmf::Demo1dCase& cs = result.cases[c];
    std::printf("truth=%+.2f y=%.4f  posterior=%.4f(%.4f)  mean-shift=%.4f(%.4f)  gain-only=%.4f\n",
                cs.q_true, cs.y_hat, cs.posterior_mean, cs.posterior_se, cs.encmf_mean, cs.encmf_se,
                cs.genkf_mean);
  }
  if (!cfg.out_dir.empty()) std::printf("outputs written to %s\n", cfg.out_dir.c_str());
  return 0;
}

int do_sweep(const CLI::App* cmd, const RunFlags& f, encmf::SweepConfig& sweep) {
  sweep.base = resolve_config(cmd, f);
  std::vector<encmf::SweepPoint> points = encmf::run_sweep(sweep);
  for (const encmf::SweepPoint& p : points) {
    if (p.ok) {
      std::printf("%s %s=%g seed=%llu avg_rmse=%.6g coverage=%.4f\n", p.filter.c_str(),
                  sweep.axis.c_str(), p.value, static_cast<unsigned long long>(p.seed),
                  p.metrics.avg_rmse, p.metrics.coverage_prob);
    } else {
      std::printf("%s %s=%g seed=%llu FAILED: %s\n", p.filter.c_str(), sweep.axis.c_str(), p.value,
                  static_cast<unsigned long long>(p.seed), p.error.c_str());
    }
  }
  if (!sweep.out_dir.empty()) std::printf("summary written to %s\n", sweep.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble data assimilation with a learned conditional-mean correction"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one twin experiment");
  add_run_options(run_cmd, run_flags);

  encmf::Demo1dConfig demo_cfg;
  long long demo_n_ens = static_cast<long long>(demo_cfg.n_ens);
  long long demo_n_oracle = static_cast<long long>(demo_cfg.n_oracle);
  long long demo_grid = static_cast<long long>(demo_cfg.grid_points);
  long long demo_bins = static_cast<long long>(demo_cfg.density_bins);
  CLI::App* demo_cmd = app.add_subcommand("demo1d", "Static scalar Bayesian update study");
  demo_cmd->add_option("--n-ens", demo_n_ens, "filter ensemble / sample size");
  demo_cmd->add_option("--n-oracle", demo_n_oracle, "importance-sampling reference sample size");
  demo_cmd->add_option("--seed", demo_cfg.seed, "master RNG seed");
  demo_cmd->add_option("--out-dir", demo_cfg.out_dir, "directory for the CSV outputs");
  demo_cmd->add_option("--grid-points", demo_grid, "resolution of the estimator curve grid");
  demo_cmd->add_option("--y-min", demo_cfg.y_min, "lower edge of the curve grid");
  demo_cmd->add_option("--y-max", demo_cfg.y_max, "upper edge of the curve grid");
  demo_cmd->add_option("--bins", demo_bins, "histogram bins for the density comparison");
  demo_cmd->add_option("--density-min", demo_cfg.density_min, "lower edge of the density histogram");
  demo_cmd->add_option("--density-max", demo_cfg.density_max, "upper edge of the density histogram");

  RunFlags sweep_flags;
  encmf::SweepConfig sweep_cfg;
  std::string sweep_out;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Repeat a twin experiment along one config axis");
  add_run_options(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--axis", sweep_cfg.axis, "config field to vary: dt_obs | n_ens | m_aug")
      ->required();
  sweep_cmd->add_option("--values", sweep_cfg.values, "axis values, e.g. --values 0.1,0.2,0.5")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--filters", sweep_cfg.filters, "filters to run at every value")
      ->delimiter(',');
  sweep_cmd->add_option("--sweep-out", sweep_out, "directory for sweep_summary.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) return do_run(run_cmd, run_flags);
    if (demo_cmd->parsed()) {
      demo_cfg.n_ens = static_cast<Eigen::Index>(demo_n_ens);
      demo_cfg.n_oracle = static_cast<Eigen::Index>(demo_n_oracle);
      demo_cfg.grid_points = static_cast<Eigen::Index>(demo_grid);
      demo_cfg.density_bins = static_cast<Eigen::Index>(demo_bins);
      return do_demo1d(demo_cfg);
    }
    if (sweep_cmd->parsed()) {
      if (sweep_cmd->count("--sweep-out") > 0) sweep_cfg.out_dir = sweep_out;
      return do_sweep(sweep_cmd, sweep_flags, sweep_cfg);
    }
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const encmf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const encmf::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const encmf::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#include "encmf/demo1d.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "encmf/experiment.hpp"
#include "encmf/filters.hpp"
#include "encmf/observation.hpp"
#include "encmf/rng.hpp"

namespace encmf {

namespace {

constexpr double kPriorStd = 2.0;

void validate(const Demo1dConfig& cfg) {
  if (cfg.n_ens < 2) throw ConfigError("demo1d: n_ens must be >= 2");
  if (cfg.n_oracle < 2) throw ConfigError("demo1d: n_oracle must be >= 2");
  if (cfg.grid_points < 2) throw ConfigError("demo1d: grid_points must be >= 2");
  if (!(cfg.y_max > cfg.y_min)) throw ConfigError("demo1d: empty y grid");
  if (cfg.density_bins < 1) throw ConfigError("demo1d: density_bins must be >= 1");
  if (!(cfg.density_max > cfg.density_min))
    throw ConfigError("demo1d: empty density range");
  if (cfg.q_true_values.empty())
    throw ConfigError("demo1d: needs at least one q_true value");
}

std::vector<double> histogram_density(const Vector& samples,
                                      const Vector* weights,
                                      const Demo1dConfig& cfg) {
  std::vector<double> density(static_cast<std::size_t>(cfg.density_bins), 0.0);
  const double width =
      (cfg.density_max - cfg.density_min) / static_cast<double>(cfg.density_bins);
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const double v = samples[i];
    if (v < cfg.density_min || v >= cfg.density_max) continue;
    const auto bin = static_cast<std::size_t>((v - cfg.density_min) / width);
    density[bin] += (weights != nullptr) ? (*weights)[i]
                                         : 1.0 / static_cast<double>(samples.size());
  }
  for (double& d : density) d /= width;
  return density;
}

void write_demo_files(const Demo1dConfig& cfg, const Demo1dResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  {
    std::ofstream out(cfg.out_dir + "/demo1d_cm_curve.csv", std::ios::binary);
    out << "y,cm,linear\n";
    for (std::size_t i = 0; i < result.grid_y.size(); ++i)
      out << format_g17(result.grid_y[i]) << ',' << format_g17(result.grid_cm[i])
          << ',' << format_g17(result.grid_linear[i]) << '\n';
  }
  {
    std::ofstream out(cfg.out_dir + "/demo1d_cond_var_cdf.csv",
                      std::ios::binary);
    out << "variance,cdf\n";
    const auto n = static_cast<double>(result.cond_var_sorted.size());
    for (std::size_t i = 0; i < result.cond_var_sorted.size(); ++i)
      out << format_g17(result.cond_var_sorted[i]) << ','
          << format_g17(static_cast<double>(i + 1) / n) << '\n';
  }
  {
    std::ofstream out(cfg.out_dir + "/demo1d_filter_variances.csv",
                      std::ios::binary);
    out << "encmf_var,genkf_var,expected_cond_var\n";
    out << format_g17(result.encmf_var) << ',' << format_g17(result.genkf_var)
        << ',' << format_g17(result.expected_cond_var) << '\n';
  }
  {
    std::ofstream out(cfg.out_dir + "/demo1d_cases.csv", std::ios::binary);
    out << "q_true,y_hat,encmf_mean,genkf_mean,posterior_mean,encmf_se,"
           "posterior_se,encmf_var,genkf_var\n";
    for (const Demo1dCase& c : result.cases)
      out << format_g17(c.q_true) << ',' << format_g17(c.y_hat) << ','
          << format_g17(c.encmf_mean) << ',' << format_g17(c.genkf_mean) << ','
          << format_g17(c.posterior_mean) << ',' << format_g17(c.encmf_se)
          << ',' << format_g17(c.posterior_se) << ',' << format_g17(c.encmf_var)
          << ',' << format_g17(c.genkf_var) << '\n';
  }
  const double width = (cfg.density_max - cfg.density_min) /
                       static_cast<double>(cfg.density_bins);
  for (std::size_t c = 0; c < result.cases.size(); ++c) {
    std::ofstream out(
        cfg.out_dir + "/demo1d_density_case" + std::to_string(c) + ".csv",
        std::ios::binary);
    out << "bin_lo,bin_hi,encmf,genkf,posterior\n";
    const Demo1dCase& cs = result.cases[c];
    for (int b = 0; b < cfg.density_bins; ++b) {
      const double lo = cfg.density_min + b * width;
      out << format_g17(lo) << ',' << format_g17(lo + width) << ','
          << format_g17(cs.encmf_density[static_cast<std::size_t>(b)]) << ','
          << format_g17(cs.genkf_density[static_cast<std::size_t>(b)]) << ','
          << format_g17(cs.posterior_density[static_cast<std::size_t>(b)])
          << '\n';
    }
  }
}

}  // namespace

Demo1dResult run_demo1d(const Demo1dConfig& cfg) {
  validate(cfg);
  const ObservationScenario scenario = demo1d_scenario();
  const RngPolicy rng{cfg.seed};

  // Forecast ensemble of the static problem: prior draws and their simulated
  // observations.
  StateEnsemble states(1, cfg.n_ens);
  for (int i = 0; i < cfg.n_ens; ++i) {
    RngStream draw = rng.stream(StreamLabel::Demo, 0,
                                static_cast<std::uint32_t>(i), 0);
    states(0, i) = kPriorStd * draw.normal();
  }
  ObservationEnsemble observations(1, cfg.n_ens);
  for (int i = 0; i < cfg.n_ens; ++i) {
    RngStream noise_rng = rng.stream(StreamLabel::Demo, 0,
                                     static_cast<std::uint32_t>(i), 1);
    observations.col(i) =
        scenario.map(states.col(i)) + scenario.noise.sample(noise_rng);
  }

  // Independent prior sample backing the posterior reference.
  Vector oracle_q(cfg.n_oracle);
  for (int i = 0; i < cfg.n_oracle; ++i) {
    RngStream draw = rng.stream(StreamLabel::Oracle, 0,
                                static_cast<std::uint32_t>(i), 0);
    oracle_q[i] = kPriorStd * draw.normal();
  }
  const Sir1dOracle oracle(std::move(oracle_q), scenario.map, 0.25);

  Demo1dResult result;
  result.linear = fit_affine(states, observations);

  const auto cm_scalar = [&oracle](double y) { return oracle.moments(y).mean; };
  const auto cm_vector = [&cm_scalar](const Vector& y) {
    Vector out(1);
    out[0] = cm_scalar(y[0]);
    return out;
  };

  result.grid_y.reserve(static_cast<std::size_t>(cfg.grid_points));
  for (int i = 0; i < cfg.grid_points; ++i) {
    const double y = cfg.y_min + (cfg.y_max - cfg.y_min) * i /
                                     static_cast<double>(cfg.grid_points - 1);
    result.grid_y.push_back(y);
    result.grid_cm.push_back(cm_scalar(y));
    Vector yv(1);
    yv[0] = y;
    result.grid_linear.push_back(result.linear(yv)[0]);
  }

  // Conditional variance across the forecast observation distribution.
  result.cond_var_sorted.reserve(static_cast<std::size_t>(cfg.n_ens));
  double var_sum = 0.0;
  for (int i = 0; i < cfg.n_ens; ++i) {
    const double v = oracle.moments(observations(0, i)).variance;
    result.cond_var_sorted.push_back(v);
    var_sum += v;
  }
  result.expected_cond_var = var_sum / static_cast<double>(cfg.n_ens);
  std::sort(result.cond_var_sorted.begin(), result.cond_var_sorted.end());

  for (std::size_t c = 0; c < cfg.q_true_values.size(); ++c) {
    Demo1dCase cas;
    cas.q_true = cfg.q_true_values[c];
    Vector q_true_v(1);
    q_true_v[0] = cas.q_true;
    RngStream meas_rng = rng.stream(StreamLabel::Demo,
                                    static_cast<std::uint32_t>(c + 1), 0, 2);
    const Vector y_hat =
        scenario.map(q_true_v) + scenario.noise.sample(meas_rng);
    cas.y_hat = y_hat[0];

    AnalysisInput in{states, observations, y_hat};
    const StateEnsemble encmf_ens = cmf_analysis(in, cm_vector);
    const StateEnsemble genkf_ens = genkf_analysis(in);

    cas.encmf_mean = ensemble_mean(encmf_ens)[0];
    cas.genkf_mean = ensemble_mean(genkf_ens)[0];
    cas.encmf_var = ensemble_cov(encmf_ens)(0, 0);
    cas.genkf_var = ensemble_cov(genkf_ens)(0, 0);
    cas.encmf_se = std::sqrt(cas.encmf_var / static_cast<double>(cfg.n_ens));

    const Vector w = oracle.normalized_weights(cas.y_hat);
    cas.posterior_mean = (w.array() * oracle.prior_samples().array()).sum();
    cas.posterior_se =
        std::sqrt((w.array().square() *
                   (oracle.prior_samples().array() - cas.posterior_mean).square())
                      .sum());

    cas.encmf_density = histogram_density(encmf_ens.row(0).transpose(), nullptr, cfg);
    cas.genkf_density = histogram_density(genkf_ens.row(0).transpose(), nullptr, cfg);
    cas.posterior_density = histogram_density(oracle.prior_samples(), &w, cfg);

    result.cases.push_back(std::move(cas));
  }

  result.encmf_var = result.cases.front().encmf_var;
  result.genkf_var = result.cases.front().genkf_var;

  if (!cfg.out_dir.empty()) write_demo_files(cfg, result);
  return result;
}

}  // namespace encmf

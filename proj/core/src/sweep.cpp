#include "encmf/sweep.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "encmf/experiment.hpp"
#include "encmf/rng.hpp"

namespace encmf {

void SweepConfig::validate() const {
  if (axis != "dt_obs" && axis != "n_ens" && axis != "m_aug")
    throw ConfigError("sweep axis must be one of {dt_obs, n_ens, m_aug}, got \"" +
                      axis + "\"");
  if (values.empty()) throw ConfigError("sweep: needs at least one axis value");
  if (filters.empty()) throw ConfigError("sweep: needs at least one filter");
}

ExperimentConfig sweep_point_config(const SweepConfig& cfg, std::size_t index,
                                    const std::string& filter) {
  if (index >= cfg.values.size())
    throw ConfigError("sweep: axis index out of range");
  ExperimentConfig point = cfg.base;
  point.filter = filter;
  point.out_dir.clear();
  const double value = cfg.values[index];
  if (cfg.axis == "dt_obs") {
    point.dt_obs = value;
  } else if (cfg.axis == "n_ens") {
    point.n_ens = static_cast<int>(std::llround(value));
  } else {
    point.train.m_aug = static_cast<int>(std::llround(value));
  }
  // Seeds vary by axis point but not by filter, so filters at the same point
  // assimilate the same synthesized truth and observations.
  point.seed = derive_seed(cfg.base.seed, static_cast<std::uint64_t>(index));
  point.validate();
  return point;
}

namespace {

std::string sanitize_csv_text(std::string text) {
  for (char& c : text)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return text;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepPoint>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write sweep summary: " + path);
  out << "filter,axis,value,seed,status,avg_rmse,median_rmse,avg_spread,"
         "coverage_prob,n_train_fallbacks,error\n";
  for (const SweepPoint& p : points) {
    out << p.filter << ',' << p.axis << ',' << format_g17(p.value) << ','
        << p.seed << ',' << (p.ok ? "ok" : "failed") << ','
        << format_g17(p.metrics.avg_rmse) << ','
        << format_g17(p.metrics.median_rmse) << ','
        << format_g17(p.metrics.avg_spread) << ','
        << format_g17(p.metrics.coverage_prob) << ',' << p.n_train_fallbacks
        << ',' << sanitize_csv_text(p.error) << '\n';
  }
}

}  // namespace

std::vector<SweepPoint> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < cfg.values.size(); ++i) {
    for (const std::string& filter : cfg.filters) {
      SweepPoint point;
      point.filter = filter;
      point.axis = cfg.axis;
      point.value = cfg.values[i];
      try {
        const ExperimentConfig run_cfg = sweep_point_config(cfg, i, filter);
        point.seed = run_cfg.seed;
        const RunResult run = run_experiment(run_cfg);
        point.metrics = run.metrics;
        point.n_train_fallbacks = run.n_train_fallbacks;
        point.ok = true;
      } catch (const std::exception& e) {
        point.ok = false;
        point.error = e.what();
        std::cerr << "warning: sweep point (" << cfg.axis << " = "
                  << cfg.values[i] << ", " << filter << ") failed: " << e.what()
                  << '\n';
      }
      points.push_back(std::move(point));
    }
  }
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_sweep_csv(cfg.out_dir + "/sweep_summary.csv", points);
  }
  return points;
}

}  // namespace encmf

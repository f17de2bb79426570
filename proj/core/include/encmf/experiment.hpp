#pragma once

#include <optional>
#include <string>
#include <vector>

#include "encmf/ann.hpp"
#include "encmf/config.hpp"
#include "encmf/metrics.hpp"
#include "encmf/models.hpp"
#include "encmf/observation.hpp"
#include "encmf/rng.hpp"
#include "encmf/types.hpp"

namespace encmf {

// Diagnostics of one assimilation step (1-based step index k, t = k * dt_obs).
struct AssimilationRecord {
  int step = 0;
  double t = 0.0;
  Vector truth;
  Vector observation;
  Vector mean;
  double rmse = 0.0;
  double spread = 0.0;
  int covered = 0;
  int n_components = 0;
  int a = 0;
  double m_ann = 0.0;
  double m_lin = 0.0;
  double analysis_ms = 0.0;
};

struct RunResult {
  RunMetrics metrics;
  std::vector<AssimilationRecord> records;
  int n_train_fallbacks = 0;
  int burn_in_steps = 0;
};

// Synthesized truth states and their noisy observations at the K observation
// times; column k-1 belongs to step k.
struct TwinData {
  Matrix truth;
  Matrix observations;
};

// Truth trajectory from a N(0, I) initial draw, observed through the scenario
// with fresh noise per step. Uses the TruthInit and ObsNoise streams only, so
// the synthesized data are identical across filter choices for a given seed.
TwinData synthesize_truth_and_obs(const ExperimentConfig& cfg,
                                  const DynamicsModel& model,
                                  const ObservationScenario& scenario,
                                  const RngPolicy& rng);

// N i.i.d. members from N(0, I_n), independent of the truth draw.
StateEnsemble init_ensemble(const ExperimentConfig& cfg, Eigen::Index dim,
                            const RngPolicy& rng);

struct StepResult {
  StateEnsemble analysis;
  AssimilationRecord record;
};

// One forecast-analysis cycle: propagate every member over dt_obs, simulate
// forecast observations, run the configured analysis, and measure the step.
// A network-training failure inside the ML path falls back to the affine
// update (a = 0) and increments *fallback_count. `carried_net`, when given,
// warm-starts the ML correction and receives the newly trained network, so a
// sequential loop refines one model across steps.
StepResult run_filter_step(const StateEnsemble& current, const Vector& observed,
                           const Vector& truth, int step,
                           const ExperimentConfig& cfg,
                           const DynamicsModel& model,
                           const ObservationScenario& scenario,
                           const RngPolicy& rng, int* fallback_count,
                           std::optional<DenseNetwork>* carried_net = nullptr);

// Full twin experiment. When cfg.out_dir is set, writes records.csv and
// summary.json there (partial records are still flushed if a step fails).
RunResult run_experiment(const ExperimentConfig& cfg);

// Observation scenario belonging to a model preset.
ObservationScenario scenario_for_model(const std::string& model_name);

// TrainConfig with the model preset's default hidden layout filled in when
// the user left it empty.
TrainConfig resolved_train_config(const ExperimentConfig& cfg);

// Shortest text that parses back to exactly this double (17 significant
// digits).
std::string format_g17(double v);

void write_records_csv(const std::string& path,
                       const std::vector<AssimilationRecord>& records,
                       bool timing);
void write_summary_json(const std::string& path, const ExperimentConfig& cfg,
                        const RunResult& result);

}  // namespace encmf

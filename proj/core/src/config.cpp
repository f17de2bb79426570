#include "encmf/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace encmf {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : obj.items())
    if (known.find(item.key()) == known.end())
      throw ConfigError("unknown config key \"" + item.key() + "\" in " + where);
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key \"") + key +
                      "\" has the wrong type");
  }
}

}  // namespace

ForceA parse_force_a(const std::string& text) {
  if (text == "auto") return ForceA::Auto;
  if (text == "0") return ForceA::Zero;
  if (text == "1") return ForceA::One;
  throw ConfigError("force_a must be one of {0, 1, auto}, got \"" + text + "\"");
}

std::string force_a_to_string(ForceA value) {
  switch (value) {
    case ForceA::Zero: return "0";
    case ForceA::One: return "1";
    case ForceA::Auto: break;
  }
  return "auto";
}

void ExperimentConfig::validate() const {
  if (model != "lorenz63" && model != "lorenz96")
    throw ConfigError("model must be lorenz63 or lorenz96, got \"" + model + "\"");
  if (filter != "enkf" && filter != "genkf" && filter != "mlencmf" &&
      filter != "cmf-oracle-1d")
    throw ConfigError(
        "filter must be one of {enkf, genkf, mlencmf, cmf-oracle-1d}, got \"" +
        filter + "\"");
  if (n_ens < 2) throw ConfigError("n_ens must be >= 2");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(dt_obs > 0.0)) throw ConfigError("dt_obs must be > 0");
  const double ratio = dt_obs / dt;
  if (std::abs(ratio - std::llround(ratio)) > 1e-6 * ratio ||
      std::llround(ratio) < 1)
    throw ConfigError("dt_obs must be a positive integer multiple of dt");
  train.validate();
}

ExperimentConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

  reject_unknown_keys(doc,
                      {"model", "filter", "n_ens", "dt", "dt_obs", "steps",
                       "seed", "burn_in", "force_a", "timing", "train",
                       "out_dir"},
                      "config root");

  ExperimentConfig cfg;
  read_into(doc, "model", cfg.model);
  read_into(doc, "filter", cfg.filter);
  read_into(doc, "n_ens", cfg.n_ens);
  read_into(doc, "dt", cfg.dt);
  read_into(doc, "dt_obs", cfg.dt_obs);
  read_into(doc, "steps", cfg.steps);
  read_into(doc, "seed", cfg.seed);
  read_into(doc, "burn_in", cfg.burn_in);
  read_into(doc, "timing", cfg.timing);
  read_into(doc, "out_dir", cfg.out_dir);
  if (doc.contains("force_a")) {
    const json& fa = doc.at("force_a");
    if (fa.is_number_integer()) {
      cfg.force_a = parse_force_a(std::to_string(fa.get<int>()));
    } else if (fa.is_string()) {
      cfg.force_a = parse_force_a(fa.get<std::string>());
    } else {
      throw ConfigError("force_a must be a string or integer");
    }
  }
  if (doc.contains("train")) {
    const json& tr = doc.at("train");
    if (!tr.is_object()) throw ConfigError("train must be a JSON object");
    reject_unknown_keys(tr,
                        {"epochs_max", "learning_rate", "batch_size",
                         "l2_coeff", "m_aug", "train_fraction", "patience",
                         "hidden_layers"},
                        "train");
    read_into(tr, "epochs_max", cfg.train.epochs_max);
    read_into(tr, "learning_rate", cfg.train.learning_rate);
    read_into(tr, "batch_size", cfg.train.batch_size);
    read_into(tr, "l2_coeff", cfg.train.l2_coeff);
    read_into(tr, "m_aug", cfg.train.m_aug);
    read_into(tr, "train_fraction", cfg.train.train_fraction);
    read_into(tr, "patience", cfg.train.patience);
    read_into(tr, "hidden_layers", cfg.train.hidden_layers);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["model"] = cfg.model;
  doc["filter"] = cfg.filter;
  doc["n_ens"] = cfg.n_ens;
  doc["dt"] = cfg.dt;
  doc["dt_obs"] = cfg.dt_obs;
  doc["steps"] = cfg.steps;
  doc["seed"] = cfg.seed;
  doc["burn_in"] = cfg.burn_in;
  doc["force_a"] = force_a_to_string(cfg.force_a);
  doc["timing"] = cfg.timing;
  doc["out_dir"] = cfg.out_dir;
  doc["train"]["epochs_max"] = cfg.train.epochs_max;
  doc["train"]["learning_rate"] = cfg.train.learning_rate;
  doc["train"]["batch_size"] = cfg.train.batch_size;
  doc["train"]["l2_coeff"] = cfg.train.l2_coeff;
  doc["train"]["m_aug"] = cfg.train.m_aug;
  doc["train"]["train_fraction"] = cfg.train.train_fraction;
  doc["train"]["patience"] = cfg.train.patience;
  doc["train"]["hidden_layers"] = cfg.train.hidden_layers;
  return doc.dump(2);
}

}  // namespace encmf

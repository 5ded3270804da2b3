#include "epiflow/run_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace epiflow {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ConfigError(origin + ": " + msg);
}

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& origin, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) fail(origin, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void take(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

TrainConfig::Mode mode_from(const std::string& s, const std::string& origin) {
  if (s == "offline") return TrainConfig::Mode::kOffline;
  if (s == "online") return TrainConfig::Mode::kOnline;
  if (s == "hybrid") return TrainConfig::Mode::kHybrid;
  fail(origin, "unknown training mode '" + s + "' (offline|online|hybrid)");
}

// Partial override of one prior spec; the support/transform pairing is
// re-validated afterwards.
void apply_prior_override(ParamSpec& spec, const json& j,
                          const std::string& origin) {
  reject_unknown(j, {"family", "a", "b", "support", "lo", "hi", "transform"},
                 origin, "priors." + spec.name);
  if (j.contains("family")) {
    spec.family = jsonutil::family_from(j.at("family").get<std::string>());
  }
  if (j.contains("support")) {
    spec.support = jsonutil::support_from(j.at("support").get<std::string>());
    switch (spec.support) {
      case Support::kPositive: spec.transform = Transform::kLog; break;
      case Support::kUnitInterval: spec.transform = Transform::kLogit; break;
      case Support::kBounded: spec.transform = Transform::kScaledLogit; break;
      case Support::kUnbounded: spec.transform = Transform::kIdentity; break;
    }
  }
  if (j.contains("transform")) {
    spec.transform = jsonutil::transform_from(j.at("transform").get<std::string>());
  }
  take(j, "a", spec.a);
  take(j, "b", spec.b);
  take(j, "lo", spec.lo);
  take(j, "hi", spec.hi);
}

}  // namespace

RunConfig run_config_from_json_text(const std::string& text,
                                    const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(origin, "top level must be a JSON object");

  reject_unknown(j,
                 {"model", "population", "t_days", "burn_in_days", "channels",
                  "dummy_dims", "integrator", "ablations", "network", "priors",
                  "training", "data", "seed", "standardization_draws",
                  "holdout_days"},
                 origin, "config");

  RunConfig cfg;

  const std::string model = j.value("model", std::string("sir"));
  if (model == "sir") {
    cfg.sim.model = SimulatorSpec::Model::kSir;
  } else if (model == "seir") {
    cfg.sim.model = SimulatorSpec::Model::kSeir;
  } else {
    fail(origin, "unknown model '" + model + "' (sir|seir)");
  }
  const bool seir = cfg.sim.model == SimulatorSpec::Model::kSeir;

  if (j.contains("population")) {
    const double pop = j.at("population").get<double>();
    if (!(pop > 0)) fail(origin, "population must be positive");
    cfg.sim.sir.population = pop;
    cfg.sim.seir.population = pop;
    cfg.data.population = pop;
  }
  if (j.contains("t_days")) {
    const int t = j.at("t_days").get<int>();
    if (t < 1) fail(origin, "t_days must be >= 1");
    cfg.sim.sir.t_days = t;
    cfg.sim.seir.t_days = t;
  }
  if (j.contains("burn_in_days")) {
    if (!seir) fail(origin, "burn_in_days applies only to the seir model");
    cfg.sim.seir.burn_in_days = j.at("burn_in_days").get<int>();
    if (cfg.sim.seir.burn_in_days < 0) fail(origin, "burn_in_days must be >= 0");
  }
  if (j.contains("channels")) {
    if (!seir) fail(origin, "channels applies only to the seir model");
    cfg.sim.seir.channels = j.at("channels").get<std::vector<std::string>>();
    if (cfg.sim.seir.channels.empty()) fail(origin, "channels must be non-empty");
    for (const auto& ch : cfg.sim.seir.channels) {
      if (ch != "new_infected" && ch != "new_recovered" && ch != "new_dead") {
        fail(origin, "unknown channel '" + ch + "'");
      }
    }
  }
  cfg.sim.dummy_dims = j.value("dummy_dims", 0);
  if (cfg.sim.dummy_dims < 0) fail(origin, "dummy_dims must be >= 0");

  if (j.contains("integrator")) {
    const json& ji = j.at("integrator");
    reject_unknown(ji, {"dt", "output_stride"}, origin, "integrator");
    IntegratorConfig ic;
    take(ji, "dt", ic.dt);
    take(ji, "output_stride", ic.output_stride);
    try {
      ic.validate();
    } catch (const std::exception& e) {
      fail(origin, e.what());
    }
    cfg.sim.sir.integrator = ic;
    cfg.sim.seir.integrator = ic;
  }

  if (j.contains("ablations")) {
    const json& ja = j.at("ablations");
    reject_unknown(ja,
                   {"no_filter_net", "no_summary_net", "no_observation_model",
                    "no_intervention_model", "no_carrier_compartment"},
                   origin, "ablations");
    const bool no_obs = ja.value("no_observation_model", false);
    const bool no_int = ja.value("no_intervention_model", false);
    const bool no_car = ja.value("no_carrier_compartment", false);
    if ((no_obs || no_int || no_car) && !seir) {
      fail(origin, "model ablations apply only to the seir model");
    }
    cfg.sim.seir.observation_model = !no_obs;
    cfg.sim.seir.intervention_model = !no_int;
    cfg.sim.seir.carrier_compartment = !no_car;
    cfg.net.use_filter_net = !ja.value("no_filter_net", false);
    cfg.net.use_summary_net = !ja.value("no_summary_net", false);
  }

  cfg.space = make_parameter_space(cfg.sim);
  if (j.contains("priors")) {
    const json& jp = j.at("priors");
    if (!jp.is_object()) fail(origin, "priors must be an object");
    for (const auto& [name, override_j] : jp.items()) {
      const int idx = cfg.space.index_of(name);
      if (idx < 0) fail(origin, "prior override for unknown parameter '" + name + "'");
      apply_prior_override(cfg.space.specs[idx], override_j, origin);
    }
    try {
      cfg.space.validate();
    } catch (const std::exception& e) {
      fail(origin, std::string("bad prior override: ") + e.what());
    }
  }

  cfg.net.param_dim = cfg.space.size();
  cfg.net.channels = static_cast<int>(cfg.sim.channels().size());
  if (j.contains("network")) {
    const json& jn = j.at("network");
    reject_unknown(jn,
                   {"filter_blocks", "kernel_widths", "filters_per_width",
                    "summary_dim", "flow_blocks", "coupling_hidden",
                    "coupling_layers", "scale_clamp", "log1p_input", "init_seed"},
                   origin, "network");
    take(jn, "filter_blocks", cfg.net.filter_blocks);
    take(jn, "kernel_widths", cfg.net.kernel_widths);
    take(jn, "filters_per_width", cfg.net.filters_per_width);
    take(jn, "summary_dim", cfg.net.summary_dim);
    take(jn, "flow_blocks", cfg.net.flow_blocks);
    take(jn, "coupling_hidden", cfg.net.coupling_hidden);
    take(jn, "coupling_layers", cfg.net.coupling_layers);
    take(jn, "scale_clamp", cfg.net.scale_clamp);
    take(jn, "log1p_input", cfg.net.log1p_input);
    take(jn, "init_seed", cfg.net.init_seed);
  }
  try {
    cfg.net.validate();
  } catch (const std::exception& e) {
    fail(origin, std::string("bad network config: ") + e.what());
  }

  if (j.contains("training")) {
    const json& jt = j.at("training");
    reject_unknown(jt,
                   {"mode", "batch", "iterations", "rounds", "table_size", "lr",
                    "lr_min", "grad_clip", "early_stop", "ma_window",
                    "min_improve", "patience", "log_every", "checkpoint_every"},
                   origin, "training");
    if (jt.contains("mode")) {
      cfg.train.mode = mode_from(jt.at("mode").get<std::string>(), origin);
    }
    take(jt, "batch", cfg.train.batch);
    take(jt, "iterations", cfg.train.iterations);
    take(jt, "rounds", cfg.train.rounds);
    take(jt, "table_size", cfg.train.table_size);
    take(jt, "lr", cfg.train.adam.lr0);
    take(jt, "lr_min", cfg.train.adam.lr_min);
    take(jt, "grad_clip", cfg.train.adam.clip_norm);
    take(jt, "early_stop", cfg.train.early_stop);
    take(jt, "ma_window", cfg.train.ma_window);
    take(jt, "min_improve", cfg.train.min_improve);
    take(jt, "patience", cfg.train.patience);
    take(jt, "log_every", cfg.train.log_every);
    take(jt, "checkpoint_every", cfg.train.checkpoint_every);
    if (cfg.train.batch < 1) fail(origin, "training.batch must be >= 1");
    if (cfg.train.iterations < 1) fail(origin, "training.iterations must be >= 1");
    if (cfg.train.rounds < 1) fail(origin, "training.rounds must be >= 1");
    if (cfg.train.table_size < 1) fail(origin, "training.table_size must be >= 1");
  }

  if (j.contains("data")) {
    const json& jd = j.at("data");
    reject_unknown(jd,
                   {"date_column", "infected_column", "recovered_column",
                    "dead_column", "cumulative", "region", "population"},
                   origin, "data");
    take(jd, "date_column", cfg.data.date_column);
    take(jd, "infected_column", cfg.data.infected_column);
    take(jd, "recovered_column", cfg.data.recovered_column);
    take(jd, "dead_column", cfg.data.dead_column);
    take(jd, "cumulative", cfg.data.cumulative);
    take(jd, "region", cfg.data.region);
    take(jd, "population", cfg.data.population);
  }

  take(j, "seed", cfg.seed);
  take(j, "standardization_draws", cfg.standardization_draws);
  take(j, "holdout_days", cfg.holdout_days);
  if (cfg.standardization_draws < 100) {
    fail(origin, "standardization_draws must be >= 100");
  }
  if (cfg.holdout_days < 0) fail(origin, "holdout_days must be >= 0");
  cfg.train.seed = cfg.seed;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  const std::string resolved = resolve_config_path(path);
  std::ifstream in(resolved);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_config_from_json_text(buf.str(), resolved);
}

std::string resolve_config_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("EPIFLOW_CONFIG_DIR")) {
    if (*dir && fs::path(path).is_relative()) {
      const fs::path candidate = fs::path(dir) / path;
      if (fs::exists(candidate)) return candidate.string();
    }
  }
  return path;
}

}  // namespace epiflow

// epiflow command-line driver.
//
// Exit codes: 0 success, 1 usage/config, 2 data validation, 3 numerical
// failure. Every failure prints exactly one machine-parseable line to stderr:
//   epiflow: error kind=<usage|config|data|numeric> msg="..."

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "epiflow/case_data.hpp"
#include "epiflow/checkpoint.hpp"
#include "epiflow/dates.hpp"
#include "epiflow/diagnostics.hpp"
#include "epiflow/inference.hpp"
#include "epiflow/integrate.hpp"
#include "epiflow/run_config.hpp"
#include "epiflow/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace epiflow;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kCheckpointFormat = 1;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "; ";
    } else {
      out += c;
    }
  }
  return out;
}

int fail_line(int code, const char* kind, const std::string& msg) {
  std::fprintf(stderr, "epiflow: error kind=%s msg=\"%s\"\n", kind,
               escape(msg).c_str());
  return code;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Shared run context filled by global and subcommand flags.
struct Cli {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;

  // train
  std::string mode;
  long long iterations = 0;
  std::string out;
  std::string progress;
  long long checkpoint_every = -1;

  // simulate
  std::string theta_path;
  std::string theta_out;
  std::string start_date = "2020-03-01";

  // infer / forecast / diagnostics
  std::string checkpoint_path;
  std::string data_path;
  int samples = 2000;
  int horizon = 21;
  int n_sims = 1000;
  int m_sbc = 100;
  int n_test = 50;
};

struct Manifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t weight_hash = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  json inputs = json::object();
  std::vector<std::string> outputs;
};

void write_manifest(const fs::path& path, const Manifest& m) {
  json j{{"command", m.command},
         {"config_hash", hex64(m.config_hash)},
         {"seed", m.seed},
         {"threads", m.threads},
         {"versions",
          json{{"app", kVersion}, {"checkpoint_format", kCheckpointFormat}}},
         {"inputs", m.inputs},
         {"outputs", m.outputs},
         {"created", utc_now()}};
  if (m.weight_hash != 0) j["weight_hash"] = hex64(m.weight_hash);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write manifest: " + path.string());
  f << j.dump(2) << '\n';
}

void ensure_parent_dir(const fs::path& p) {
  const fs::path dir = p.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
}

RunConfig load_config(const Cli& cli) {
  if (cli.config_path.empty()) throw ConfigError("--config is required");
  RunConfig cfg = load_run_config(cli.config_path);
  if (cli.seed_set) {
    cfg.seed = cli.seed;
    cfg.train.seed = cli.seed;
  }
  return cfg;
}

// Reorders dataset channels into the order the simulator was trained on.
TimeSeries align_channels(const CaseDataset& ds, const SimulatorSpec& sim) {
  const std::vector<std::string> want = sim.channels();
  TimeSeries out = TimeSeries::zeros(want, ds.series.rows());
  out.start_day = ds.series.start_day;
  for (std::size_t c = 0; c < want.size(); ++c) {
    int src = -1;
    for (int k = 0; k < ds.series.cols(); ++k) {
      if (ds.series.channels[k] == want[c]) src = k;
    }
    if (src < 0) {
      throw DataError("dataset for region '" + ds.region +
                      "' lacks channel '" + want[c] + "'");
    }
    for (int t = 0; t < ds.series.rows(); ++t) {
      out.at(t, static_cast<int>(c)) = ds.series.at(t, src);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_train(const Cli& cli) {
  RunConfig cfg = load_config(cli);
  if (!cli.mode.empty()) {
    if (cli.mode == "offline") cfg.train.mode = TrainConfig::Mode::kOffline;
    else if (cli.mode == "online") cfg.train.mode = TrainConfig::Mode::kOnline;
    else if (cli.mode == "hybrid") cfg.train.mode = TrainConfig::Mode::kHybrid;
    else throw ConfigError("unknown --mode '" + cli.mode + "'");
  }
  if (cli.iterations > 0) cfg.train.iterations = cli.iterations;
  if (cli.checkpoint_every >= 0) cfg.train.checkpoint_every = cli.checkpoint_every;

  const fs::path out = cli.out.empty() ? fs::path("checkpoint.bin") : fs::path(cli.out);
  ensure_parent_dir(out);
  cfg.train.progress_path = cli.progress.empty() ? out.string() + ".log.jsonl" : cli.progress;

  Rng std_rng = Rng(cfg.seed).split(3);
  cfg.space = fit_standardization(std::move(cfg.space), cfg.standardization_draws, std_rng);

  Estimator<float> est(cfg.net);
  const std::uint64_t chash = config_fingerprint(cfg.net, cfg.space, cfg.sim);
  std::printf("train model=%s params=%d channels=%d config=%s\n",
              cfg.sim.model == SimulatorSpec::Model::kSir ? "sir" : "seir",
              cfg.net.param_dim, cfg.net.channels, hex64(chash).c_str());

  if (cfg.train.checkpoint_every > 0) {
    cfg.train.on_checkpoint = [&](long long iter) {
      Checkpoint snap = make_checkpoint(est, cfg.space, cfg.sim, iter, {}, iter);
      save_checkpoint(snap, out.string());
    };
  }

  const TrainResult res = train(cfg.train, cfg.space, cfg.sim, est);

  Checkpoint ckpt = make_checkpoint(est, cfg.space, cfg.sim, res.iterations_run,
                                    res.loss_history, res.iterations_run);
  save_checkpoint(ckpt, out.string());

  Manifest man;
  man.command = "train";
  man.config_hash = chash;
  man.weight_hash = weight_fingerprint(est);
  man.seed = cfg.seed;
  man.threads = cli.threads;
  man.inputs["config"] = cli.config_path;
  man.outputs = {out.filename().string()};
  write_manifest(out.string() + ".manifest.json", man);

  std::printf(
      "trained iterations=%lld sim_failures=%lld skipped=%lld early_stop=%d "
      "final_ma=%.6f out=%s\n",
      res.iterations_run, res.sim_failures, res.skipped_steps,
      res.early_stopped ? 1 : 0, res.final_loss_ma, out.string().c_str());
  return 0;
}

int cmd_simulate(const Cli& cli) {
  RunConfig cfg = load_config(cli);
  const fs::path out = cli.out.empty() ? fs::path("simulated.csv") : fs::path(cli.out);
  ensure_parent_dir(out);

  json fixed = json::object();
  if (!cli.theta_path.empty()) {
    std::ifstream f(cli.theta_path);
    if (!f) throw ConfigError("cannot open theta file: " + cli.theta_path);
    try {
      f >> fixed;
    } catch (const json::exception& e) {
      throw ConfigError(cli.theta_path + ": invalid JSON: " + std::string(e.what()));
    }
    if (!fixed.is_object()) throw ConfigError("theta file must be a JSON object");
  }

  const std::vector<std::string> names = cfg.sim.param_names();
  for (const auto& [key, value] : fixed.items()) {
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      throw ConfigError("theta file sets unknown parameter '" + key + "'");
    }
  }

  Rng rng = Rng(cfg.seed).split(11);
  const bool all_fixed = fixed.size() == names.size();
  const int max_attempts = all_fixed ? 1 : 100;

  std::vector<double> theta;
  SimOutput sim_out;
  bool ok = false;
  for (int attempt = 0; attempt < max_attempts && !ok; ++attempt) {
    theta = cfg.space.sample_prior(rng);
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (fixed.contains(names[i])) theta[i] = fixed.at(names[i]).get<double>();
    }
    sim_out = cfg.sim.simulate(theta, rng);
    ok = sim_out.ok;
  }
  if (!ok) throw std::runtime_error("simulation did not produce a finite trajectory");

  CaseDataset ds;
  ds.region = cfg.data.region;
  ds.population = cfg.data.population;
  ds.series = sim_out.observed;
  ds.series.start_day = parse_iso_date(cli.start_date);
  // Reported counts are integers; the generative model is continuous.
  for (double& v : ds.series.values) v = std::floor(v + 0.5);
  write_cases_csv(out.string(), ds);

  json jtheta = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) jtheta[names[i]] = theta[i];
  const std::string theta_out =
      cli.theta_out.empty() ? out.string() + ".theta.json" : cli.theta_out;
  {
    std::ofstream f(theta_out);
    if (!f) throw std::runtime_error("cannot write theta file: " + theta_out);
    f << jtheta.dump(2) << '\n';
  }

  Manifest man;
  man.command = "simulate";
  man.config_hash = config_fingerprint(cfg.net, cfg.space, cfg.sim);
  man.seed = cfg.seed;
  man.threads = cli.threads;
  man.inputs["config"] = cli.config_path;
  if (!cli.theta_path.empty()) man.inputs["theta"] = cli.theta_path;
  man.outputs = {out.filename().string(), fs::path(theta_out).filename().string()};
  write_manifest(out.string() + ".manifest.json", man);

  std::printf("simulated days=%d channels=%d out=%s\n", ds.series.rows(),
              ds.series.cols(), out.string().c_str());
  return 0;
}

CaseSchema schema_for(const Cli& cli) {
  if (cli.config_path.empty()) return CaseSchema{};
  return load_run_config(cli.config_path).data;
}

std::vector<fs::path> collect_datasets(const std::string& data_path) {
  if (!fs::exists(data_path)) throw DataError("no such file or directory: " + data_path);
  if (!fs::is_directory(data_path)) return {fs::path(data_path)};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(data_path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no .csv files in directory: " + data_path);
  return files;
}

int cmd_infer(const Cli& cli) {
  if (cli.checkpoint_path.empty()) throw ConfigError("--checkpoint is required");
  if (cli.data_path.empty()) throw ConfigError("--data is required");
  if (cli.samples < 100) throw ConfigError("--samples must be >= 100");

  const Checkpoint ckpt = load_checkpoint(cli.checkpoint_path);
  const Estimator<float> est = build_estimator(ckpt);
  const std::uint64_t whash = weight_fingerprint(est);
  const std::uint64_t seed = cli.seed_set ? cli.seed : 1;

  const CaseSchema schema = schema_for(cli);
  const std::vector<fs::path> files = collect_datasets(cli.data_path);
  const bool multi = files.size() > 1 || fs::is_directory(cli.data_path);

  const fs::path out_dir = cli.out.empty() ? fs::path("posterior") : fs::path(cli.out);
  fs::create_directories(out_dir);

  Manifest man;
  man.command = "infer";
  man.config_hash = ckpt.config_hash;
  man.weight_hash = whash;
  man.seed = seed;
  man.threads = cli.threads;
  man.inputs["checkpoint"] = cli.checkpoint_path;
  man.inputs["data"] = cli.data_path;
  if (!cli.config_path.empty()) man.inputs["config"] = cli.config_path;

  for (const fs::path& file : files) {
    CaseSchema local = schema;
    local.region = file.stem().string();
    const CaseDataset ds = load_cases(file.string(), local);
    const TimeSeries x = align_channels(ds, ckpt.sim);

    // Per-region stream keyed by the region name, not directory order.
    std::uint64_t tag = 1469598103934665603ull;
    for (char c : ds.region) tag = (tag ^ static_cast<unsigned char>(c)) * 1099511628211ull;
    Rng rng = Rng(seed).split(tag);

    const PosteriorDraws draws = sample_posterior(est, ckpt.space, x, cli.samples, rng);
    const std::vector<ParamSummary> summary = summarize_posterior(draws);

    OutputMeta meta;
    meta.config_hash = ckpt.config_hash;
    meta.weight_hash = whash;
    meta.data_hash = draws.data_hash;
    meta.seed = seed;

    const fs::path region_dir = multi ? out_dir / ds.region : out_dir;
    fs::create_directories(region_dir);
    write_draws_csv((region_dir / "draws.csv").string(), draws, meta);
    write_summary_csv((region_dir / "summary.csv").string(), summary, meta);
    man.outputs.push_back(fs::relative(region_dir / "draws.csv", out_dir).string());
    man.outputs.push_back(fs::relative(region_dir / "summary.csv", out_dir).string());

    std::printf("infer region=%s days=%d draws=%d out=%s\n", ds.region.c_str(),
                x.rows(), cli.samples, region_dir.string().c_str());
  }

  write_manifest(out_dir / "manifest.json", man);
  return 0;
}

int cmd_sbc(const Cli& cli) {
  if (cli.checkpoint_path.empty()) throw ConfigError("--checkpoint is required");
  if (cli.n_sims < 10) throw ConfigError("--n-sims must be >= 10");
  if (cli.m_sbc < 10) throw ConfigError("--m-sbc must be >= 10");

  const Checkpoint ckpt = load_checkpoint(cli.checkpoint_path);
  const Estimator<float> est = build_estimator(ckpt);
  const std::uint64_t seed = cli.seed_set ? cli.seed : 1;
  Rng rng = Rng(seed).split(21);

  const SbcResult sbc = run_sbc(est, ckpt.space, ckpt.sim, cli.n_sims, cli.m_sbc, rng);

  const fs::path out = cli.out.empty() ? fs::path("ranks.csv") : fs::path(cli.out);
  ensure_parent_dir(out);
  OutputMeta meta;
  meta.config_hash = ckpt.config_hash;
  meta.weight_hash = weight_fingerprint(est);
  meta.seed = seed;
  write_ranks_csv(out.string(), sbc, meta);

  Manifest man;
  man.command = "sbc";
  man.config_hash = ckpt.config_hash;
  man.weight_hash = meta.weight_hash;
  man.seed = seed;
  man.threads = cli.threads;
  man.inputs["checkpoint"] = cli.checkpoint_path;
  man.outputs = {out.filename().string()};
  write_manifest(out.string() + ".manifest.json", man);

  for (std::size_t j = 0; j < sbc.names.size(); ++j) {
    std::printf("sbc param=%s chi2=%.3f threshold=%.3f %s\n",
                sbc.names[j].c_str(), sbc.chi2[j], sbc.chi2_threshold,
                sbc.chi2[j] < sbc.chi2_threshold ? "ok" : "MISCALIBRATED");
  }
  std::printf("sbc n_sims=%d m_sbc=%d sim_failures=%lld out=%s\n", cli.n_sims,
              cli.m_sbc, sbc.sim_failures, out.string().c_str());
  return 0;
}

int cmd_forecast(const Cli& cli) {
  if (cli.checkpoint_path.empty()) throw ConfigError("--checkpoint is required");
  if (cli.data_path.empty()) throw ConfigError("--data is required");
  if (cli.horizon < 1) throw ConfigError("--horizon must be >= 1");
  if (cli.samples < 100) throw ConfigError("--samples must be >= 100");

  const Checkpoint ckpt = load_checkpoint(cli.checkpoint_path);
  const Estimator<float> est = build_estimator(ckpt);
  const std::uint64_t seed = cli.seed_set ? cli.seed : 1;
  Rng rng = Rng(seed).split(31);

  CaseSchema schema = schema_for(cli);
  const CaseDataset ds = load_cases(cli.data_path, schema);
  const TimeSeries x = align_channels(ds, ckpt.sim);

  const PosteriorDraws draws = sample_posterior(est, ckpt.space, x, cli.samples, rng);

  SimulatorSpec sim = ckpt.sim;  // window re-simulated at the observed length
  if (sim.model == SimulatorSpec::Model::kSir) sim.sir.t_days = x.rows();
  else sim.seir.t_days = x.rows();

  const ForecastEnvelope env = posterior_predictive(draws, sim, cli.horizon, rng);

  const fs::path out = cli.out.empty() ? fs::path("forecast.csv") : fs::path(cli.out);
  ensure_parent_dir(out);
  OutputMeta meta;
  meta.config_hash = ckpt.config_hash;
  meta.weight_hash = weight_fingerprint(est);
  meta.data_hash = draws.data_hash;
  meta.seed = seed;
  write_forecast_csv(out.string(), env, x.start_day, meta);

  Manifest man;
  man.command = "forecast";
  man.config_hash = ckpt.config_hash;
  man.weight_hash = meta.weight_hash;
  man.seed = seed;
  man.threads = cli.threads;
  man.inputs["checkpoint"] = cli.checkpoint_path;
  man.inputs["data"] = cli.data_path;
  man.outputs = {out.filename().string()};
  write_manifest(out.string() + ".manifest.json", man);

  if (env.misspecification_warning) {
    std::fprintf(stderr,
                 "epiflow: warning %lld/%lld re-simulations diverged; model or "
                 "data may be misspecified\n",
                 env.divergent, env.total);
  }
  std::printf("forecast days=%d horizon=%d divergent=%lld/%lld out=%s\n",
              env.t_obs, env.horizon, env.divergent, env.total,
              out.string().c_str());
  return 0;
}

int cmd_dummy_check(const Cli& cli) {
  if (cli.checkpoint_path.empty()) throw ConfigError("--checkpoint is required");
  if (cli.n_test < 1) throw ConfigError("--n-test must be >= 1");

  const Checkpoint ckpt = load_checkpoint(cli.checkpoint_path);
  if (ckpt.sim.dummy_dims < 1) {
    throw ConfigError("checkpoint was trained without dummy dimensions");
  }
  const Estimator<float> est = build_estimator(ckpt);
  const std::uint64_t seed = cli.seed_set ? cli.seed : 1;
  Rng rng = Rng(seed).split(41);

  const DummyCheckResult res =
      dummy_posterior_check(est, ckpt.space, ckpt.sim, cli.n_test, cli.samples, rng);

  const fs::path out = cli.out.empty() ? fs::path("dummy_ks.csv") : fs::path(cli.out);
  ensure_parent_dir(out);
  {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open for writing: " + out.string());
    f << "# checkpoint: " << hex64(ckpt.config_hash) << "\n# seed: " << seed << "\n";
    f << "dummy,ks\n";
    char buf[64];
    for (std::size_t i = 0; i < res.ks.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "u%zu,%.6f\n", i, res.ks[i]);
      f << buf;
    }
  }

  Manifest man;
  man.command = "dummy-check";
  man.config_hash = ckpt.config_hash;
  man.weight_hash = weight_fingerprint(est);
  man.seed = seed;
  man.threads = cli.threads;
  man.inputs["checkpoint"] = cli.checkpoint_path;
  man.outputs = {out.filename().string()};
  write_manifest(out.string() + ".manifest.json", man);

  double mean = 0.0, worst = 0.0;
  for (double k : res.ks) {
    mean += k / static_cast<double>(res.ks.size());
    worst = std::max(worst, k);
  }
  std::printf("dummy-check dummies=%d n_test=%d mean_ks=%.4f max_ks=%.4f out=%s\n",
              res.dummy_dims, res.n_test, mean, worst, out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amortized Bayesian inference for compartmental epidemic models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Cli cli;
  app.add_option("--config", cli.config_path,
                 "JSON run configuration (resolved against $EPIFLOW_CONFIG_DIR)");
  auto* seed_opt = app.add_option("--seed", cli.seed, "Override the config seed");
  app.add_option("--threads", cli.threads, "Worker threads (reserved; must be >= 1)")
      ->check(CLI::Range(1, 256));

  CLI::App* train = app.add_subcommand("train", "Train an estimator");
  train->fallthrough();
  train->add_option("--mode", cli.mode, "offline|online|hybrid");
  train->add_option("--iterations", cli.iterations, "Optimizer-step budget");
  train->add_option("--out", cli.out, "Checkpoint output path");
  train->add_option("--progress", cli.progress, "JSONL progress path");
  train->add_option("--checkpoint-every", cli.checkpoint_every,
                    "Save every N iterations (0 = only at the end)");

  CLI::App* simulate = app.add_subcommand("simulate", "Draw a synthetic dataset");
  simulate->fallthrough();
  simulate->add_option("--out", cli.out, "Output CSV path");
  simulate->add_option("--theta", cli.theta_path,
                       "JSON object fixing named parameters (rest drawn from the prior)");
  simulate->add_option("--theta-out", cli.theta_out, "Where to record the drawn parameters");
  simulate->add_option("--start-date", cli.start_date, "ISO date of the first observation");

  CLI::App* infer = app.add_subcommand("infer", "Sample a posterior for observed data");
  infer->fallthrough();
  infer->add_option("--checkpoint", cli.checkpoint_path, "Trained checkpoint")->required();
  infer->add_option("--data", cli.data_path, "Case CSV, or a directory of CSVs")->required();
  infer->add_option("--samples", cli.samples, "Posterior draws per dataset");
  infer->add_option("--out", cli.out, "Output directory");

  CLI::App* sbc = app.add_subcommand("sbc", "Simulation-based calibration check");
  sbc->fallthrough();
  sbc->add_option("--checkpoint", cli.checkpoint_path, "Trained checkpoint")->required();
  sbc->add_option("--n-sims", cli.n_sims, "Number of prior scenarios");
  sbc->add_option("--m-sbc", cli.m_sbc, "Posterior draws per scenario");
  sbc->add_option("--out", cli.out, "Rank CSV path");

  CLI::App* forecast = app.add_subcommand("forecast", "Posterior-predictive envelope");
  forecast->fallthrough();
  forecast->add_option("--checkpoint", cli.checkpoint_path, "Trained checkpoint")->required();
  forecast->add_option("--data", cli.data_path, "Case CSV")->required();
  forecast->add_option("--horizon", cli.horizon, "Forecast days past the window");
  forecast->add_option("--samples", cli.samples, "Posterior draws");
  forecast->add_option("--out", cli.out, "Forecast CSV path");

  CLI::App* dummy = app.add_subcommand("dummy-check", "Dummy-parameter recovery check");
  dummy->fallthrough();
  dummy->add_option("--checkpoint", cli.checkpoint_path, "Trained checkpoint")->required();
  dummy->add_option("--n-test", cli.n_test, "Test datasets");
  dummy->add_option("--samples", cli.samples, "Posterior draws per dataset");
  dummy->add_option("--out", cli.out, "KS CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail_line(1, "usage", e.what());
  }
  cli.seed_set = seed_opt->count() > 0;

  try {
    if (train->parsed()) return cmd_train(cli);
    if (simulate->parsed()) return cmd_simulate(cli);
    if (infer->parsed()) return cmd_infer(cli);
    if (sbc->parsed()) return cmd_sbc(cli);
    if (forecast->parsed()) return cmd_forecast(cli);
    if (dummy->parsed()) return cmd_dummy_check(cli);
    return fail_line(1, "usage", "no subcommand given");
  } catch (const ConfigError& e) {
    return fail_line(1, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail_line(1, "config", e.what());
  } catch (const DataError& e) {
    return fail_line(2, "data", e.what());
  } catch (const CheckpointError& e) {
    return fail_line(2, "checkpoint", e.what());
  } catch (const IntegrationError& e) {
    return fail_line(3, "numeric", e.what());
  } catch (const OptimAbort& e) {
    return fail_line(3, "numeric", e.what());
  } catch (const TrainAbort& e) {
    return fail_line(3, "numeric", e.what());
  } catch (const std::exception& e) {
    return fail_line(3, "numeric", e.what());
  }
}

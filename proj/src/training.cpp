#include "epiflow/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "epiflow/checkpoint.hpp"

namespace epiflow {

std::vector<std::string> SimulatorSpec::param_names() const {
  std::vector<std::string> names = model == Model::kSir
                                       ? sir_param_names()
                                       : seir_param_names(seir);
  for (int j = 0; j < dummy_dims; ++j) names.push_back("u" + std::to_string(j));
  return names;
}

int SimulatorSpec::model_param_count() const {
  return static_cast<int>(param_names().size()) - dummy_dims;
}

int SimulatorSpec::t_days() const {
  return model == Model::kSir ? sir.t_days : seir.t_days;
}

std::vector<std::string> SimulatorSpec::channels() const {
  return model == Model::kSir ? std::vector<std::string>{"new_infected"}
                              : seir.channels;
}

SimOutput SimulatorSpec::simulate(std::span<const double> theta, Rng& rng) const {
  return model == Model::kSir ? simulate_sir(sir, theta, rng)
                              : simulate_seir(seir, theta, rng);
}

ParameterSpace make_parameter_space(const SimulatorSpec& sim) {
  auto names = sim.param_names();
  ParameterSpace base;
  if (sim.model == SimulatorSpec::Model::kSir) {
    base = sir_parameter_space();
  } else {
    std::vector<std::string> model_names(names.begin(),
                                         names.end() - sim.dummy_dims);
    base = seir_parameter_space(model_names);
  }
  for (int j = 0; j < sim.dummy_dims; ++j) {
    ParamSpec s;
    s.name = "u" + std::to_string(j);
    s.support = Support::kUnitInterval;
    s.family = PriorFamily::kUniform;
    s.transform = Transform::kLogit;
    base.specs.push_back(std::move(s));
    base.mean.push_back(0.0);
    base.std_dev.push_back(1.0);
  }
  base.validate();
  return base;
}

namespace {

// One accepted (theta, series) pair; counts failed draws.
void draw_pair(const ParameterSpace& space, const SimulatorSpec& sim, Rng& rng,
               long long& failures, long long attempt_cap,
               std::vector<double>& theta_out, std::vector<double>& series_out) {
  for (long long attempt = 0; attempt < attempt_cap; ++attempt) {
    theta_out = space.sample_prior(rng);
    SimOutput out = sim.simulate(theta_out, rng);
    if (out.ok) {
      series_out = std::move(out.observed.values);
      return;
    }
    ++failures;
  }
  throw TrainAbort("simulation failure rate too high: " +
                   std::to_string(failures) + " failures");
}

}  // namespace

long long fill_reference_table(ReferenceTable& table, const ParameterSpace& space,
                               const SimulatorSpec& sim, long long n, Rng& rng) {
  table.t_len = sim.t_days();
  table.channels = static_cast<int>(sim.channels().size());
  long long failures = 0;
  std::vector<double> theta, series;
  for (long long i = 0; i < n; ++i) {
    draw_pair(space, sim, rng, failures, 10 * n, theta, series);
    table.theta.push_back(theta);
    table.series.push_back(series);
  }
  const long long attempts = n + failures;
  if (failures * 100 > attempts) {
    throw TrainAbort("reference table: " + std::to_string(failures) + " of " +
                     std::to_string(attempts) +
                     " simulations failed (> 1%); check priors");
  }
  return failures;
}

namespace {

// Moving-average bookkeeping that tolerates NaN entries from skipped steps.
struct LossTracker {
  std::vector<double> csum{0.0};
  std::vector<long long> cnt{0};

  void push(double loss) {
    const bool ok = std::isfinite(loss);
    csum.push_back(csum.back() + (ok ? loss : 0.0));
    cnt.push_back(cnt.back() + (ok ? 1 : 0));
  }

  long long size() const { return static_cast<long long>(cnt.size()) - 1; }

  // Mean over history[i-w, i); NaN when the window holds no finite entries.
  double ma(long long i, long long w) const {
    const long long n = cnt[i] - cnt[i - w];
    if (n <= 0) return std::nan("");
    return (csum[i] - csum[i - w]) / static_cast<double>(n);
  }
};

struct Stepper {
  Estimator<float>& est;
  const ParameterSpace& space;
  const TrainConfig& cfg;
  Adam<float> opt;
  TrainResult res;
  LossTracker tracker;
  std::ofstream progress;
  int consecutive_skips = 0;
  double last_lr = 0.0;

  Stepper(Estimator<float>& e, const ParameterSpace& s, const TrainConfig& c)
      : est(e), space(s), cfg(c), opt(make_adam(c)) {
    if (static_cast<int>(space.specs.size()) != est.config().param_dim) {
      throw TrainAbort("parameter space size does not match network param_dim");
    }
    if (!cfg.progress_path.empty()) {
      progress.open(cfg.progress_path);
      if (!progress) throw TrainAbort("cannot open progress file: " + cfg.progress_path);
    }
  }

  static AdamConfig make_adam(const TrainConfig& c) {
    AdamConfig a = c.adam;
    if (a.total_steps == 0) a.total_steps = c.iterations;
    return a;
  }

  void run_iteration(const std::vector<std::vector<double>>& theta_rows,
                     const std::vector<std::vector<double>>& series_rows,
                     int t_len, int n_ch) {
    const int b = static_cast<int>(theta_rows.size());
    const int p = est.config().param_dim;
    Tensor<float> th = Tensor<float>::zeros({b, p});
    for (int i = 0; i < b; ++i) {
      const auto u = space.to_unconstrained(theta_rows[static_cast<std::size_t>(i)]);
      for (int j = 0; j < p; ++j) th.at(i, j) = static_cast<float>(u[static_cast<std::size_t>(j)]);
    }
    Tensor<float> x = prepare_series_batch<float>(series_rows, t_len, n_ch,
                                                  est.config().log1p_input);

    Tape<float> tape;
    const auto w = est.bind(tape, true);
    const auto th_id = tape.leaf(std::move(th), false);
    const auto x_id = tape.leaf(std::move(x), false);
    const auto loss_id = est.nll(tape, w, th_id, x_id);
    const double loss = static_cast<double>(tape.value(loss_id).data[0]);

    ++res.iterations_run;
    res.loss_history.push_back(static_cast<float>(loss));
    tracker.push(loss);
    if (!std::isfinite(loss)) {
      ++res.skipped_steps;
      if (++consecutive_skips > cfg.adam.max_skips) {
        throw TrainAbort("loss non-finite for " +
                         std::to_string(consecutive_skips) + " consecutive steps");
      }
      log_line(loss);
      return;
    }
    consecutive_skips = 0;

    tape.backward(loss_id);
    est.weights().zero_grads();
    est.accumulate_grads(tape, w);
    const auto info = opt.step(est.weights());
    last_lr = info.lr;
    if (info.skipped) ++res.skipped_steps;
    log_line(loss);
    maybe_checkpoint();
  }

  void log_line(double loss) {
    const long long i = res.iterations_run;
    if (progress.is_open() &&
        (cfg.log_every <= 1 || i % cfg.log_every == 0 || i == 1)) {
      const long long w = std::min<long long>(cfg.ma_window, tracker.size());
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "{\"iter\":%lld,\"loss\":%.6g,\"ma\":%.6g,\"lr\":%.6g,"
                    "\"sim_failures\":%lld,\"skipped\":%lld}\n",
                    i, loss, tracker.ma(tracker.size(), std::max<long long>(w, 1)),
                    last_lr, res.sim_failures, res.skipped_steps);
      progress << buf;
      progress.flush();
    }
  }

  void maybe_checkpoint() {
    if (cfg.checkpoint_every > 0 && cfg.on_checkpoint &&
        res.iterations_run % cfg.checkpoint_every == 0) {
      cfg.on_checkpoint(res.iterations_run);
    }
  }

  // True when the moving average stopped improving.
  bool should_stop(long long steps_this_phase) const {
    if (!cfg.early_stop) return false;
    const long long w = cfg.ma_window;
    const long long n = tracker.size();
    if (steps_this_phase < w + cfg.patience || n < w + cfg.patience) return false;
    const double now = tracker.ma(n, w);
    const double then = tracker.ma(n - cfg.patience, w);
    if (!std::isfinite(now) || !std::isfinite(then)) return false;
    return then - now < cfg.min_improve;
  }

  void finish() {
    const long long w = std::min<long long>(cfg.ma_window, tracker.size());
    res.final_loss_ma = w > 0 ? tracker.ma(tracker.size(), w) : std::nan("");
  }
};

void batch_from_table(const ReferenceTable& table, int b, Rng& rng,
                      std::vector<std::vector<double>>& theta_rows,
                      std::vector<std::vector<double>>& series_rows) {
  theta_rows.clear();
  series_rows.clear();
  for (int i = 0; i < b; ++i) {
    const auto idx = static_cast<std::size_t>(
        rng.uniform(0.0, static_cast<double>(table.size())));
    theta_rows.push_back(table.theta[idx]);
    series_rows.push_back(table.series[idx]);
  }
}

}  // namespace

TrainResult train_offline(const TrainConfig& cfg, const ParameterSpace& space,
                          const SimulatorSpec& sim, Estimator<float>& est) {
  Rng root(cfg.seed);
  Rng rng_sim = root.split(1);
  Rng rng_batch = root.split(2);

  ReferenceTable table;
  table.config_hash = config_fingerprint(est.config(), space, sim);
  Stepper stepper(est, space, cfg);
  stepper.res.sim_failures =
      fill_reference_table(table, space, sim, cfg.table_size, rng_sim);

  std::vector<std::vector<double>> theta_rows, series_rows;
  for (long long it = 0; it < cfg.iterations; ++it) {
    batch_from_table(table, cfg.batch, rng_batch, theta_rows, series_rows);
    stepper.run_iteration(theta_rows, series_rows, table.t_len, table.channels);
    if (stepper.should_stop(stepper.res.iterations_run)) {
      stepper.res.early_stopped = true;
      break;
    }
  }
  stepper.finish();
  return std::move(stepper.res);
}

TrainResult train_table(const TrainConfig& cfg, const ParameterSpace& space,
                        const ReferenceTable& table, Estimator<float>& est) {
  if (table.size() == 0) throw TrainAbort("reference table is empty");
  Rng rng_batch = Rng(cfg.seed).split(2);

  Stepper stepper(est, space, cfg);
  std::vector<std::vector<double>> theta_rows, series_rows;
  for (long long it = 0; it < cfg.iterations; ++it) {
    batch_from_table(table, cfg.batch, rng_batch, theta_rows, series_rows);
    stepper.run_iteration(theta_rows, series_rows, table.t_len, table.channels);
    if (stepper.should_stop(stepper.res.iterations_run)) {
      stepper.res.early_stopped = true;
      break;
    }
  }
  stepper.finish();
  return std::move(stepper.res);
}

TrainResult train_online(const TrainConfig& cfg, const ParameterSpace& space,
                         const SimulatorSpec& sim, Estimator<float>& est) {
  Rng root(cfg.seed);
  Rng rng_sim = root.split(1);

  Stepper stepper(est, space, cfg);
  const int t_len = sim.t_days();
  const int n_ch = static_cast<int>(sim.channels().size());
  std::vector<std::vector<double>> theta_rows(cfg.batch), series_rows(cfg.batch);
  for (long long it = 0; it < cfg.iterations; ++it) {
    long long failures = 0;
    for (int b = 0; b < cfg.batch; ++b) {
      draw_pair(space, sim, rng_sim, failures, 10LL * cfg.batch,
                theta_rows[static_cast<std::size_t>(b)],
                series_rows[static_cast<std::size_t>(b)]);
    }
    stepper.res.sim_failures += failures;
    stepper.run_iteration(theta_rows, series_rows, t_len, n_ch);
    if (stepper.should_stop(stepper.res.iterations_run)) {
      stepper.res.early_stopped = true;
      break;
    }
  }
  stepper.finish();
  return std::move(stepper.res);
}

TrainResult train_hybrid(const TrainConfig& cfg, const ParameterSpace& space,
                         const SimulatorSpec& sim, Estimator<float>& est) {
  if (cfg.rounds < 1) throw TrainAbort("hybrid training needs rounds >= 1");
  Rng root(cfg.seed);
  Rng rng_sim = root.split(1);
  Rng rng_batch = root.split(2);

  ReferenceTable table;
  table.config_hash = config_fingerprint(est.config(), space, sim);
  Stepper stepper(est, space, cfg);
  const long long per_round =
      std::max<long long>(1, cfg.iterations / cfg.rounds);

  std::vector<std::vector<double>> theta_rows, series_rows;
  for (int r = 0; r < cfg.rounds; ++r) {
    stepper.res.sim_failures +=
        fill_reference_table(table, space, sim, cfg.table_size, rng_sim);
    long long steps_this_round = 0;
    for (long long it = 0; it < per_round; ++it) {
      batch_from_table(table, cfg.batch, rng_batch, theta_rows, series_rows);
      stepper.run_iteration(theta_rows, series_rows, table.t_len, table.channels);
      ++steps_this_round;
      if (stepper.should_stop(steps_this_round)) {
        stepper.res.early_stopped = true;
        break;
      }
    }
  }
  stepper.finish();
  return std::move(stepper.res);
}

TrainResult train(const TrainConfig& cfg, const ParameterSpace& space,
                  const SimulatorSpec& sim, Estimator<float>& est) {
  switch (cfg.mode) {
    case TrainConfig::Mode::kOffline:
      return train_offline(cfg, space, sim, est);
    case TrainConfig::Mode::kOnline:
      return train_online(cfg, space, sim, est);
    case TrainConfig::Mode::kHybrid:
      return train_hybrid(cfg, space, sim, est);
  }
  throw TrainAbort("unknown training mode");
}

}  // namespace epiflow

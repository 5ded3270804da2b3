#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiflow/networks.hpp"
#include "epiflow/priors.hpp"
#include "epiflow/rng.hpp"
#include "epiflow/seir_model.hpp"
#include "epiflow/sir_model.hpp"

namespace epiflow {

class TrainAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Forward model selection plus dummy dimensions appended to the parameter
// vector (the simulators ignore them; the estimator must learn to).
struct SimulatorSpec {
  enum class Model { kSir, kSeir };
  Model model = Model::kSir;
  SirOptions sir{};
  SeirOptions seir{};
  int dummy_dims = 0;

  std::vector<std::string> param_names() const;  // model params + dummies
  int model_param_count() const;
  int t_days() const;
  std::vector<std::string> channels() const;
  SimOutput simulate(std::span<const double> theta, Rng& rng) const;
};

// Default priors for every parameter of the spec'd model, dummies included.
ParameterSpace make_parameter_space(const SimulatorSpec& sim);

// Stored (theta, series) pairs for offline and hybrid training.
struct ReferenceTable {
  std::uint64_t config_hash = 0;
  int t_len = 0;
  int channels = 0;
  std::vector<std::vector<double>> theta;   // natural space
  std::vector<std::vector<double>> series;  // flattened t_len x channels

  std::size_t size() const { return theta.size(); }
};

// Appends n rows; aborts when failures exceed 1% of attempts or attempts
// exceed 10x the requested rows. Returns the number of failed simulations.
long long fill_reference_table(ReferenceTable& table, const ParameterSpace& space,
                               const SimulatorSpec& sim, long long n, Rng& rng);

struct TrainConfig {
  enum class Mode { kOffline, kOnline, kHybrid };
  Mode mode = Mode::kOnline;
  int batch = 32;
  long long iterations = 20000;  // optimizer-step budget (total across rounds)
  int rounds = 3;                // hybrid only
  long long table_size = 2000;   // offline total / hybrid per-round
  std::uint64_t seed = 1;
  AdamConfig adam{};             // adam.total_steps 0 = use iterations

  bool early_stop = true;
  int ma_window = 500;
  double min_improve = 1e-3;
  long long patience = 2000;

  long long log_every = 50;
  std::string progress_path;  // JSONL progress stream; empty = off

  // Invoked every checkpoint_every iterations (and not at the end; callers
  // save the final state themselves).
  long long checkpoint_every = 0;
  std::function<void(long long iter)> on_checkpoint;
};

struct TrainResult {
  long long iterations_run = 0;
  long long sim_failures = 0;
  long long skipped_steps = 0;
  bool early_stopped = false;
  std::vector<float> loss_history;  // one entry per iteration
  double final_loss_ma = 0.0;       // moving average over the last window
};

TrainResult train_offline(const TrainConfig& cfg, const ParameterSpace& space,
                          const SimulatorSpec& sim, Estimator<float>& est);
// Offline training on a caller-provided table; rows are already simulated.
TrainResult train_table(const TrainConfig& cfg, const ParameterSpace& space,
                        const ReferenceTable& table, Estimator<float>& est);
TrainResult train_online(const TrainConfig& cfg, const ParameterSpace& space,
                         const SimulatorSpec& sim, Estimator<float>& est);
TrainResult train_hybrid(const TrainConfig& cfg, const ParameterSpace& space,
                         const SimulatorSpec& sim, Estimator<float>& est);
// Dispatch on cfg.mode.
TrainResult train(const TrainConfig& cfg, const ParameterSpace& space,
                  const SimulatorSpec& sim, Estimator<float>& est);

}  // namespace epiflow

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "epiflow/training.hpp"

using namespace epiflow;

namespace {

SimulatorSpec tiny_sir(int dummy_dims = 0) {
  SimulatorSpec sim;
  sim.model = SimulatorSpec::Model::kSir;
  sim.sir.t_days = 8;
  sim.dummy_dims = dummy_dims;
  return sim;
}

NetworkConfig tiny_net(int param_dim) {
  NetworkConfig net;
  net.param_dim = param_dim;
  net.channels = 1;
  net.filter_blocks = 1;
  net.kernel_widths = {3};
  net.filters_per_width = 4;
  net.summary_dim = 8;
  net.flow_blocks = 3;
  net.coupling_hidden = 16;
  net.coupling_layers = 1;
  net.init_seed = 3;
  return net;
}

TrainConfig quick_config(long long iterations) {
  TrainConfig cfg;
  cfg.mode = TrainConfig::Mode::kOnline;
  cfg.batch = 16;
  cfg.iterations = iterations;
  cfg.seed = 5;
  cfg.early_stop = false;
  cfg.adam.lr0 = 3e-3;
  return cfg;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("same seed, same run: losses and weights agree bit for bit") {
  const auto sim = tiny_sir();
  const auto space = make_parameter_space(sim);
  const auto cfg = quick_config(30);

  Estimator<float> a(tiny_net(space.size())), b(tiny_net(space.size()));
  const auto ra = train(cfg, space, sim, a);
  const auto rb = train(cfg, space, sim, b);

  CHECK(ra.iterations_run == 30);
  CHECK(ra.loss_history == rb.loss_history);
  for (std::size_t i = 0; i < a.weights().params.size(); ++i) {
    CHECK(a.weights().params[i].value.data == b.weights().params[i].value.data);
  }

  auto different = quick_config(30);
  different.seed = 6;
  Estimator<float> c(tiny_net(space.size()));
  const auto rc = train(different, space, sim, c);
  CHECK(ra.loss_history != rc.loss_history);
}

TEST_CASE("training reduces the loss on a small run") {
  const auto sim = tiny_sir();
  const auto space = make_parameter_space(sim);
  Estimator<float> est(tiny_net(space.size()));
  const auto res = train(quick_config(300), space, sim, est);

  REQUIRE(res.loss_history.size() == 300);
  double head = 0.0, tail = 0.0;
  for (int i = 0; i < 50; ++i) {
    head += res.loss_history[i] / 50.0;
    tail += res.loss_history[250 + i] / 50.0;
  }
  CHECK(tail < head);
  CHECK(res.skipped_steps == 0);
  CHECK(std::isfinite(res.final_loss_ma));
}

TEST_CASE("offline and hybrid honor their iteration budgets") {
  const auto sim = tiny_sir();
  const auto space = make_parameter_space(sim);

  auto offline = quick_config(25);
  offline.mode = TrainConfig::Mode::kOffline;
  offline.table_size = 64;
  Estimator<float> a(tiny_net(space.size()));
  const auto ra = train(offline, space, sim, a);
  CHECK(ra.iterations_run == 25);
  CHECK(ra.loss_history.size() == 25);

  auto hybrid = quick_config(24);
  hybrid.mode = TrainConfig::Mode::kHybrid;
  hybrid.rounds = 3;
  hybrid.table_size = 32;
  Estimator<float> b(tiny_net(space.size()));
  const auto rb = train(hybrid, space, sim, b);
  CHECK(rb.iterations_run == 24);  // 3 rounds x 8
}

TEST_CASE("early stopping fires once the moving average stalls") {
  const auto sim = tiny_sir();
  const auto space = make_parameter_space(sim);
  auto cfg = quick_config(1000);
  cfg.early_stop = true;
  cfg.ma_window = 10;
  cfg.patience = 5;
  cfg.min_improve = 1e9;  // nothing can improve this much
  Estimator<float> est(tiny_net(space.size()));
  const auto res = train(cfg, space, sim, est);
  CHECK(res.early_stopped);
  CHECK(res.iterations_run == 15);  // window + patience
}

TEST_CASE("impossible priors abort instead of spinning") {
  const auto sim = tiny_sir();
  auto space = make_parameter_space(sim);
  space.specs[0].a = 1e200;  // lambda median overflows the trajectory
  space.specs[0].b = 0.01;

  auto cfg = quick_config(10);
  cfg.mode = TrainConfig::Mode::kOffline;
  cfg.table_size = 5;
  Estimator<float> est(tiny_net(space.size()));
  CHECK_THROWS_AS(train(cfg, space, sim, est), TrainAbort);
}

TEST_CASE("network and space must agree on the parameter count") {
  const auto sim = tiny_sir();
  const auto space = make_parameter_space(sim);
  Estimator<float> est(tiny_net(space.size() + 1));
  CHECK_THROWS_AS(train(quick_config(5), space, sim, est), TrainAbort);
}

TEST_CASE("progress stream is valid jsonl with the expected cadence") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "epiflow_progress_test.jsonl";
  const auto sim = tiny_sir();
  const auto space = make_parameter_space(sim);
  auto cfg = quick_config(12);
  cfg.log_every = 1;
  cfg.progress_path = path.string();
  Estimator<float> est(tiny_net(space.size()));
  train(cfg, space, sim, est);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int lines = 0;
  long long last_iter = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("iter"));
    CHECK(j.contains("loss"));
    CHECK(j.contains("ma"));
    CHECK(j.contains("lr"));
    last_iter = j.at("iter").get<long long>();
    ++lines;
  }
  in.close();
  fs::remove(path);
  CHECK(lines == 12);
  CHECK(last_iter == 12);
}

TEST_CASE("checkpoint callback fires on its cadence, not at the end") {
  const auto sim = tiny_sir();
  const auto space = make_parameter_space(sim);
  auto cfg = quick_config(20);
  cfg.checkpoint_every = 7;
  std::vector<long long> fired;
  cfg.on_checkpoint = [&](long long iter) { fired.push_back(iter); };
  Estimator<float> est(tiny_net(space.size()));
  train(cfg, space, sim, est);
  CHECK(fired == std::vector<long long>{7, 14});
}

TEST_CASE("dummy dimensions extend the space with unit uniforms") {
  const auto sim = tiny_sir(3);
  const auto names = sim.param_names();
  REQUIRE(names.size() == 8);
  CHECK(names[5] == "u0");
  CHECK(names[7] == "u2");
  CHECK(sim.model_param_count() == 5);

  const auto space = make_parameter_space(sim);
  CHECK(space.size() == 8);
  for (int j = 5; j < 8; ++j) {
    CHECK(space.specs[j].family == PriorFamily::kUniform);
    CHECK(space.specs[j].support == Support::kUnitInterval);
  }
}

TEST_CASE("reference table rejects high failure rates but tolerates none") {
  const auto sim = tiny_sir();
  const auto space = make_parameter_space(sim);
  ReferenceTable table;
  Rng rng(9);
  const auto failures = fill_reference_table(table, space, sim, 50, rng);
  CHECK(failures == 0);
  CHECK(table.size() == 50);
  CHECK(table.t_len == 8);
  CHECK(table.channels == 1);
  for (const auto& s : table.series) CHECK(s.size() == 8);
}

}  // TEST_SUITE

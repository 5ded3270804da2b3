#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "epiflow/run_config.hpp"

using namespace epiflow;

namespace {

RunConfig parse(const std::string& text) {
  return run_config_from_json_text(text, "test");
}

}  // namespace

TEST_SUITE("run_config") {

TEST_CASE("empty object yields the default sir run") {
  const auto cfg = parse("{}");
  CHECK(cfg.sim.model == SimulatorSpec::Model::kSir);
  CHECK(cfg.sim.t_days() == 14);
  CHECK(cfg.sim.dummy_dims == 0);
  CHECK(cfg.space.size() == 5);
  CHECK(cfg.net.param_dim == 5);
  CHECK(cfg.net.channels == 1);
  CHECK(cfg.train.mode == TrainConfig::Mode::kOnline);
  CHECK(cfg.seed == 1);
  CHECK(cfg.holdout_days == 0);
}

TEST_CASE("seir model with dummies sizes the network accordingly") {
  const auto cfg = parse(R"({
    "model": "seir",
    "t_days": 82,
    "burn_in_days": 16,
    "dummy_dims": 5,
    "training": {"mode": "hybrid"}
  })");
  CHECK(cfg.sim.model == SimulatorSpec::Model::kSeir);
  CHECK(cfg.sim.param_names().size() == 39);
  CHECK(cfg.space.size() == 39);
  CHECK(cfg.net.param_dim == 39);
  CHECK(cfg.net.channels == 3);
  CHECK(cfg.train.mode == TrainConfig::Mode::kHybrid);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_WITH_AS(parse(R"({"modle": "sir"})"),
                       doctest::Contains("unknown key 'modle'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse(R"({"integrator": {"step": 0.5}})"),
                       doctest::Contains("unknown key 'step' in integrator"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse(R"({"training": {"lr_max": 1}})"),
                       doctest::Contains("unknown key 'lr_max'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse(R"({"network": {"widht": 8}})"),
                       doctest::Contains("unknown key 'widht'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse(R"({"ablations": {"no_lstm": true}})"),
                       doctest::Contains("unknown key 'no_lstm'"), ConfigError);
}

TEST_CASE("bad enum values name the offender") {
  CHECK_THROWS_WITH_AS(parse(R"({"model": "sirs"})"),
                       doctest::Contains("unknown model 'sirs'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse(R"({"training": {"mode": "batch"}})"),
                       doctest::Contains("unknown training mode 'batch'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(
      parse(R"({"model": "seir", "channels": ["new_cases"]})"),
      doctest::Contains("unknown channel 'new_cases'"), ConfigError);
}

TEST_CASE("model ablations only apply to the seir model") {
  CHECK_THROWS_WITH_AS(
      parse(R"({"model": "sir", "ablations": {"no_observation_model": true}})"),
      doctest::Contains("apply only to the seir model"), ConfigError);
  // Network ablations are fine for either model.
  const auto cfg = parse(R"({"ablations": {"no_filter_net": true}})");
  CHECK(cfg.net.use_filter_net == false);

  const auto seir = parse(R"({
    "model": "seir",
    "ablations": {"no_carrier_compartment": true, "no_intervention_model": true}
  })");
  CHECK(seir.sim.seir.carrier_compartment == false);
  CHECK(seir.sim.seir.intervention_model == false);
  CHECK(seir.space.size() == 34 - 3 - 12);
}

TEST_CASE("prior overrides replace hyperparameters and re-validate") {
  const auto cfg = parse(R"({
    "priors": {"lambda": {"a": 0.9, "b": 0.2}}
  })");
  const int i = cfg.space.index_of("lambda");
  CHECK(cfg.space.specs[i].a == doctest::Approx(0.9));
  CHECK(cfg.space.specs[i].b == doctest::Approx(0.2));

  const auto swapped = parse(R"({
    "priors": {"lambda": {"family": "uniform", "support": "bounded",
                          "lo": 0.1, "hi": 2.0}}
  })");
  const auto& s = swapped.space.specs[swapped.space.index_of("lambda")];
  CHECK(s.family == PriorFamily::kUniform);
  CHECK(s.transform == Transform::kScaledLogit);

  CHECK_THROWS_WITH_AS(parse(R"({"priors": {"zeta": {"a": 1}}})"),
                       doctest::Contains("unknown parameter 'zeta'"),
                       ConfigError);
  CHECK_THROWS_AS(parse(R"({"priors": {"lambda": {"a": -1}}})"), ConfigError);
}

TEST_CASE("integrator and network shape constraints") {
  CHECK_THROWS_AS(parse(R"({"integrator": {"dt": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"integrator": {"dt": 0.4, "output_stride": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse(R"({"network": {"kernel_widths": [2, 4]}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse(R"({"standardization_draws": 10})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"training": {"batch": 0}})"), ConfigError);
}

TEST_CASE("seed propagates into training") {
  const auto cfg = parse(R"({"seed": 99})");
  CHECK(cfg.seed == 99);
  CHECK(cfg.train.seed == 99);
}

TEST_CASE("config path resolution honors EPIFLOW_CONFIG_DIR") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "epiflow_cfg_dir_test";
  fs::create_directories(dir);
  std::ofstream(dir / "tiny.json") << "{}";

  CHECK(resolve_config_path((dir / "tiny.json").string()) ==
        (dir / "tiny.json").string());

  setenv("EPIFLOW_CONFIG_DIR", dir.string().c_str(), 1);
  CHECK(resolve_config_path("tiny.json") == (dir / "tiny.json").string());
  unsetenv("EPIFLOW_CONFIG_DIR");
  CHECK(resolve_config_path("tiny.json") == "tiny.json");

  const auto cfg = [&] {
    setenv("EPIFLOW_CONFIG_DIR", dir.string().c_str(), 1);
    auto c = load_run_config(resolve_config_path("tiny.json"));
    unsetenv("EPIFLOW_CONFIG_DIR");
    return c;
  }();
  CHECK(cfg.sim.model == SimulatorSpec::Model::kSir);
  fs::remove_all(dir);

  CHECK_THROWS_AS(load_run_config("/nonexistent/nope.json"), ConfigError);
}

TEST_CASE("malformed json is a config error") {
  CHECK_THROWS_AS(parse("{"), ConfigError);
  CHECK_THROWS_AS(parse("[1,2]"), ConfigError);
}

}  // TEST_SUITE

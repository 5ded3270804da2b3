#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "epiflow/checkpoint.hpp"
#include "epiflow/training.hpp"

using namespace epiflow;

namespace {

namespace fs = std::filesystem;

struct Fixture {
  SimulatorSpec sim;
  ParameterSpace space;
  Estimator<float> est;
  fs::path dir;

  Fixture()
      : sim(make_sim()),
        space(make_parameter_space(sim)),
        est(make_net(space.size())),
        dir(fs::temp_directory_path() / "epiflow_ckpt_test") {
    fs::create_directories(dir);
    // A couple of training steps so moments and history are non-trivial.
    TrainConfig cfg;
    cfg.batch = 8;
    cfg.iterations = 5;
    cfg.seed = 2;
    cfg.early_stop = false;
    train(cfg, space, sim, est);
  }
  ~Fixture() { fs::remove_all(dir); }

  static SimulatorSpec make_sim() {
    SimulatorSpec s;
    s.model = SimulatorSpec::Model::kSir;
    s.sir.t_days = 8;
    s.dummy_dims = 1;
    return s;
  }

  static NetworkConfig make_net(int param_dim) {
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

  Checkpoint snapshot() const {
    return make_checkpoint(est, space, sim, 5, {3.0f, 2.5f, 2.0f, 1.8f, 1.7f}, 5);
  }
};

}  // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("checkpoint round trips through disk exactly") {
  Fixture fx;
  const auto path = (fx.dir / "net.ckpt").string();
  const auto ckpt = fx.snapshot();
  save_checkpoint(ckpt, path);

  const auto back = load_checkpoint(path, ckpt.config_hash);
  CHECK(back.config_hash == ckpt.config_hash);
  CHECK(back.iterations == 5);
  CHECK(back.optimizer_step == 5);
  CHECK(back.loss_history == ckpt.loss_history);
  CHECK(back.net.param_dim == fx.est.config().param_dim);
  CHECK(back.net.init_seed == fx.est.config().init_seed);
  CHECK(back.sim.model == SimulatorSpec::Model::kSir);
  CHECK(back.sim.dummy_dims == 1);
  CHECK(back.space.size() == fx.space.size());
  for (int i = 0; i < back.space.size(); ++i) {
    CHECK(back.space.specs[i].name == fx.space.specs[i].name);
    CHECK(back.space.mean[i] == doctest::Approx(fx.space.mean[i]).epsilon(1e-12));
    CHECK(back.space.std_dev[i] ==
          doctest::Approx(fx.space.std_dev[i]).epsilon(1e-12));
  }

  // Rebuilding must reproduce the exact weights, moments and permutations.
  auto rebuilt = build_estimator(back);
  CHECK(weight_fingerprint(rebuilt) == weight_fingerprint(fx.est));
  CHECK(rebuilt.permutations() == fx.est.permutations());
  const auto& a = rebuilt.weights().params;
  const auto& b = fx.est.weights().params;
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].value.data == b[i].value.data);
    // Moments travel as f32 blobs; compare at that precision.
    REQUIRE(a[i].m.data.size() == b[i].m.data.size());
    for (std::size_t j = 0; j < a[i].m.data.size(); ++j) {
      CHECK(static_cast<float>(a[i].m.data[j]) == static_cast<float>(b[i].m.data[j]));
      CHECK(static_cast<float>(a[i].v.data[j]) == static_cast<float>(b[i].v.data[j]));
    }
  }
}

TEST_CASE("truncated files are refused") {
  Fixture fx;
  const auto path = (fx.dir / "net.ckpt").string();
  save_checkpoint(fx.snapshot(), path);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto cut = (fx.dir / "cut.ckpt").string();
  std::ofstream(cut, std::ios::binary) << bytes.substr(0, bytes.size() - 37);
  CHECK_THROWS_WITH_AS(load_checkpoint(cut), doctest::Contains("CRC"),
                       CheckpointError);
}

TEST_CASE("bit flips are caught by the checksum") {
  Fixture fx;
  const auto path = (fx.dir / "net.ckpt").string();
  save_checkpoint(fx.snapshot(), path);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  bytes[bytes.size() / 2] ^= 0x40;
  const auto bad = (fx.dir / "bad.ckpt").string();
  std::ofstream(bad, std::ios::binary) << bytes;
  CHECK_THROWS_WITH_AS(load_checkpoint(bad),
                       doctest::Contains("corrupt or truncated"),
                       CheckpointError);
}

TEST_CASE("wrong file types are rejected up front") {
  Fixture fx;
  const auto path = (fx.dir / "not_a.ckpt").string();
  std::ofstream(path) << "date,new_infected\n2020-03-01,3\n";
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("bad magic"),
                       CheckpointError);
  CHECK_THROWS_AS(load_checkpoint((fx.dir / "missing.ckpt").string()),
                  CheckpointError);
}

TEST_CASE("config hash mismatches name both hashes") {
  Fixture fx;
  const auto path = (fx.dir / "net.ckpt").string();
  const auto ckpt = fx.snapshot();
  save_checkpoint(ckpt, path);
  try {
    load_checkpoint(path, ckpt.config_hash ^ 0xDEADBEEFull);
    FAIL("expected CheckpointError");
  } catch (const CheckpointError& e) {
    const std::string msg = e.what();
    char expect_a[32], expect_b[32];
    std::snprintf(expect_a, sizeof(expect_a), "%016llx",
                  static_cast<unsigned long long>(ckpt.config_hash));
    std::snprintf(expect_b, sizeof(expect_b), "%016llx",
                  static_cast<unsigned long long>(ckpt.config_hash ^ 0xDEADBEEFull));
    CHECK(msg.find(expect_a) != std::string::npos);
    CHECK(msg.find(expect_b) != std::string::npos);
  }
}

TEST_CASE("writes are atomic: no temp litter, failed dirs surface") {
  Fixture fx;
  const auto path = (fx.dir / "net.ckpt").string();
  save_checkpoint(fx.snapshot(), path);
  int entries = 0;
  for (const auto& e : fs::directory_iterator(fx.dir)) {
    ++entries;
    CHECK(e.path().filename() == "net.ckpt");
  }
  CHECK(entries == 1);
  CHECK_THROWS_AS(
      save_checkpoint(fx.snapshot(), (fx.dir / "no_dir" / "x.ckpt").string()),
      CheckpointError);
}

TEST_CASE("fingerprints isolate config from weights") {
  Fixture fx;
  const auto h0 = config_fingerprint(fx.est.config(), fx.space, fx.sim);
  CHECK(h0 == fx.snapshot().config_hash);

  // Weight changes move the weight fingerprint but not the config hash.
  const auto w0 = weight_fingerprint(fx.est);
  fx.est.weights().params[0].value.data[0] += 0.25f;
  CHECK(weight_fingerprint(fx.est) != w0);
  CHECK(config_fingerprint(fx.est.config(), fx.space, fx.sim) == h0);

  // Config changes move the config hash.
  auto sim2 = fx.sim;
  sim2.sir.t_days = 9;
  CHECK(config_fingerprint(fx.est.config(), fx.space, sim2) != h0);
  auto space2 = fx.space;
  space2.specs[0].a *= 2.0;
  CHECK(config_fingerprint(fx.est.config(), space2, fx.sim) != h0);
}

}  // TEST_SUITE

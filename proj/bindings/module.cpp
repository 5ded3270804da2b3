// Python bindings for the main operations: prior sampling, simulation,
// training, and amortized posterior sampling from a checkpoint.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "epiflow/checkpoint.hpp"
#include "epiflow/inference.hpp"
#include "epiflow/run_config.hpp"
#include "epiflow/training.hpp"

namespace py = pybind11;
using namespace epiflow;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

SimulatorSpec make_spec(const std::string& model, int t_days, int dummy_dims,
                        double population) {
  SimulatorSpec sim;
  if (model == "sir") {
    sim.model = SimulatorSpec::Model::kSir;
  } else if (model == "seir") {
    sim.model = SimulatorSpec::Model::kSeir;
  } else {
    throw std::invalid_argument("unknown model '" + model + "'");
  }
  if (t_days > 0) {
    sim.sir.t_days = t_days;
    sim.seir.t_days = t_days;
  }
  if (population > 0) {
    sim.sir.population = population;
    sim.seir.population = population;
  }
  if (dummy_dims < 0) throw std::invalid_argument("dummy_dims must be >= 0");
  sim.dummy_dims = dummy_dims;
  return sim;
}

std::vector<std::vector<double>> series_rows(const TimeSeries& ts) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(ts.rows()));
  for (int t = 0; t < ts.rows(); ++t) {
    rows[static_cast<std::size_t>(t)].resize(ts.channels.size());
    for (std::size_t c = 0; c < ts.channels.size(); ++c) {
      rows[static_cast<std::size_t>(t)][c] = ts.at(t, static_cast<int>(c));
    }
  }
  return rows;
}

// Checkpoint plus the estimator rebuilt from it once; sampling is read-only.
struct Posterior {
  Checkpoint ckpt;
  Estimator<float> est;

  explicit Posterior(const std::string& path)
      : ckpt(load_checkpoint(path)), est(build_estimator(ckpt)) {}

  PosteriorDraws sample(const std::vector<std::vector<double>>& rows, int m,
                        std::uint64_t seed, int start_day) {
    const auto names = ckpt.sim.channels();
    if (rows.empty()) throw std::invalid_argument("series must have at least one row");
    TimeSeries x = TimeSeries::zeros(names, static_cast<int>(rows.size()));
    x.start_day = start_day;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].size() != names.size()) {
        throw std::invalid_argument("series row " + std::to_string(t) + " has " +
                                    std::to_string(rows[t].size()) +
                                    " channels, expected " +
                                    std::to_string(names.size()));
      }
      for (std::size_t c = 0; c < names.size(); ++c) {
        x.at(static_cast<int>(t), static_cast<int>(c)) = rows[t][c];
      }
    }
    Rng rng(seed);
    PosteriorDraws d = sample_posterior(est, ckpt.space, x, m, rng);
    d.config_hash = ckpt.config_hash;
    d.weight_hash = weight_fingerprint(est);
    return d;
  }
};

py::dict draws_dict(const PosteriorDraws& d) {
  py::dict out;
  out["names"] = d.names;
  out["samples"] = d.samples;
  out["config_hash"] = hex64(d.config_hash);
  out["data_hash"] = hex64(d.data_hash);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Amortized Bayesian inference for compartmental epidemic models";
  m.attr("__version__") = "0.1.0";

  m.def(
      "param_names",
      [](const std::string& model, int dummy_dims) {
        return make_spec(model, 0, dummy_dims, 0.0).param_names();
      },
      py::arg("model"), py::arg("dummy_dims") = 0,
      "Parameter names for a model, dummy dimensions appended.");

  m.def(
      "sample_prior",
      [](const std::string& model, std::uint64_t seed, int t_days,
         int dummy_dims, double population) {
        const SimulatorSpec sim = make_spec(model, t_days, dummy_dims, population);
        Rng rng(seed);
        py::dict out;
        out["names"] = sim.param_names();
        out["theta"] = make_parameter_space(sim).sample_prior(rng);
        return out;
      },
      py::arg("model"), py::arg("seed"), py::arg("t_days") = 0,
      py::arg("dummy_dims") = 0, py::arg("population") = 0.0,
      "Draw one parameter vector from the model's prior.");

  m.def(
      "simulate",
      [](const std::string& model, const std::vector<double>& theta,
         std::uint64_t seed, int t_days, int dummy_dims, double population) {
        const SimulatorSpec sim = make_spec(model, t_days, dummy_dims, population);
        Rng rng(seed);
        const SimOutput out = sim.simulate(theta, rng);
        py::dict d;
        d["ok"] = out.ok;
        if (out.ok) {
          d["channels"] = out.observed.channels;
          d["start_day"] = out.observed.start_day;
          d["values"] = series_rows(out.observed);
        }
        return d;
      },
      py::arg("model"), py::arg("theta"), py::arg("seed"), py::arg("t_days") = 0,
      py::arg("dummy_dims") = 0, py::arg("population") = 0.0,
      "Run the forward model once; ok=False marks a failed integration.");

  m.def(
      "train",
      [](const std::string& config, const std::string& out,
         const std::string& progress) {
        TrainResult res;
        std::uint64_t chash = 0;
        {
          py::gil_scoped_release release;
          RunConfig cfg = load_run_config(resolve_config_path(config));
          cfg.train.progress_path = progress;
          Rng std_rng = Rng(cfg.seed).split(3);
          cfg.space = fit_standardization(std::move(cfg.space),
                                          cfg.standardization_draws, std_rng);
          Estimator<float> est(cfg.net);
          res = epiflow::train(cfg.train, cfg.space, cfg.sim, est);
          save_checkpoint(make_checkpoint(est, cfg.space, cfg.sim,
                                          res.iterations_run, res.loss_history,
                                          res.iterations_run),
                          out);
          chash = config_fingerprint(cfg.net, cfg.space, cfg.sim);
        }
        py::dict d;
        d["iterations_run"] = res.iterations_run;
        d["sim_failures"] = res.sim_failures;
        d["skipped_steps"] = res.skipped_steps;
        d["early_stopped"] = res.early_stopped;
        d["final_loss_ma"] = res.final_loss_ma;
        d["config_hash"] = hex64(chash);
        return d;
      },
      py::arg("config"), py::arg("out"), py::arg("progress") = std::string(),
      "Train per a JSON run config and save a checkpoint; returns a summary.");

  py::class_<Posterior>(m, "Posterior",
                        "Amortized posterior loaded from a checkpoint file.")
      .def(py::init<const std::string&>(), py::arg("path"))
      .def_property_readonly(
          "param_names", [](const Posterior& p) { return p.ckpt.sim.param_names(); })
      .def_property_readonly(
          "channels", [](const Posterior& p) { return p.ckpt.sim.channels(); })
      .def_property_readonly(
          "iterations", [](const Posterior& p) { return p.ckpt.iterations; })
      .def_property_readonly(
          "config_hash", [](const Posterior& p) { return hex64(p.ckpt.config_hash); })
      .def(
          "sample",
          [](Posterior& p, const std::vector<std::vector<double>>& rows, int m,
             std::uint64_t seed, int start_day) {
            PosteriorDraws d;
            {
              py::gil_scoped_release release;
              d = p.sample(rows, m, seed, start_day);
            }
            return draws_dict(d);
          },
          py::arg("series"), py::arg("m"), py::arg("seed"),
          py::arg("start_day") = 0,
          "Draw m posterior samples conditioned on a [t][channel] series.");
}

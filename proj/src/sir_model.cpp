#include "epiflow/sir_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace epiflow {

std::vector<std::string> sir_param_names() {
  return {"lambda", "mu", "lag", "psi", "i0"};
}

SimOutput simulate_sir(const SirOptions& opt, std::span<const double> theta,
                       Rng& rng) {
  opt.integrator.validate();
  if (opt.t_days < 1) throw std::invalid_argument("simulate_sir: t_days must be >= 1");
  if (!(opt.population > 0)) throw std::invalid_argument("simulate_sir: population must be > 0");
  if (theta.size() < 5) throw std::invalid_argument("simulate_sir: parameter vector too short");

  const double n_pop = opt.population;
  const double lambda = theta[0];
  const double mu = theta[1];
  const double lag = theta[2];
  const double psi = theta[3];
  const double i0 = std::min(theta[4], n_pop);

  SimOutput out;
  std::array<double, 3> y{n_pop - i0, i0, 0.0};  // S, I, R
  auto derivs = [&](double, const std::array<double, 3>& s,
                    std::array<double, 3>& ds) {
    const double force = lambda * s[0] * s[1] / n_pop;
    ds[0] = -force;
    ds[1] = force - mu * s[1];
    ds[2] = mu * s[1];
  };

  // inflow[g] = new-infection rate at day g, g = 0 .. t_days-1.
  std::vector<double> inflow(opt.t_days);
  std::vector<std::array<double, 3>> daily;
  if (opt.keep_latent) daily.reserve(opt.t_days);
  double clamp_mass = 0.0;
  double t = 0.0;
  for (int day = 0; day < opt.t_days; ++day) {
    inflow[day] = lambda * y[0] * y[1] / n_pop;
    if (!std::isfinite(inflow[day])) {
      out.ok = false;
      return out;
    }
    if (opt.keep_latent) daily.push_back(y);
    if (day + 1 == opt.t_days) break;
    for (int s = 0; s < opt.integrator.output_stride; ++s) {
      try {
        y = rk4_step(y, derivs, t, opt.integrator.dt, &clamp_mass);
      } catch (const IntegrationError&) {
        out.ok = false;
        return out;
      }
      t += opt.integrator.dt;
    }
  }

  out.observed = TimeSeries::zeros({"new_infected"}, opt.t_days);
  for (int k = 0; k < opt.t_days; ++k) {
    // Lagged inflow, linearly interpolated; the epidemic history before day 0
    // is unobserved, so pre-start inflow counts as 0.
    const double u = static_cast<double>(k) - lag;
    double mean = 0.0;
    if (u >= 0.0) {
      const auto g0 = static_cast<std::size_t>(u);
      const double w = u - static_cast<double>(g0);
      mean = (g0 + 1 < inflow.size())
                 ? (1.0 - w) * inflow[g0] + w * inflow[g0 + 1]
                 : inflow.back();
    }
    out.observed.at(k, 0) = static_cast<double>(rng.neg_binomial(mean, psi));
  }

  if (opt.keep_latent) {
    out.latent.reserve(daily.size());
    for (const auto& st : daily) {
      out.latent.push_back(EpiState{st[0], 0.0, 0.0, st[1], st[2], 0.0, n_pop});
    }
    out.latent_offset_days = 0;
  }
  out.clamp_mass = clamp_mass;
  return out;
}

}  // namespace epiflow

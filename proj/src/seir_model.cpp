#include "epiflow/seir_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace epiflow {

namespace {

struct ObsIndex {
  int lag = -1;
  int sigma = -1;
  int amp = -1;
  int phase = -1;
};

struct SeirIndex {
  int lambda0 = -1;
  std::array<int, 4> lambda_post{-1, -1, -1, -1};
  int t1 = -1;
  std::array<int, 3> gap{-1, -1, -1};
  std::array<int, 4> dur{-1, -1, -1, -1};
  int beta = -1, gamma = -1, eta = -1, mu = -1;
  int theta_rec = -1, d_rate = -1, alpha = -1, delta = -1, e0 = -1;
  std::vector<ObsIndex> obs;  // aligned with opt.channels
  int count = 0;
};

std::string channel_suffix(const std::string& channel) {
  if (channel == "new_infected") return "i";
  if (channel == "new_recovered") return "r";
  if (channel == "new_dead") return "d";
  throw std::invalid_argument("unknown channel: " + channel);
}

SeirIndex build_index(const SeirOptions& opt,
                      std::vector<std::string>* names_out) {
  SeirIndex ix;
  int n = 0;
  auto add = [&](int& slot, const std::string& name) {
    slot = n++;
    if (names_out) names_out->push_back(name);
  };

  add(ix.lambda0, "lambda0");
  if (opt.intervention_model) {
    for (int k = 0; k < 4; ++k) add(ix.lambda_post[k], "lambda" + std::to_string(k + 1));
    add(ix.t1, "t1");
    for (int k = 0; k < 3; ++k) add(ix.gap[k], "t" + std::to_string(k + 2) + "_gap");
    for (int k = 0; k < 4; ++k) add(ix.dur[k], "dt" + std::to_string(k + 1));
  }
  add(ix.beta, "beta");
  add(ix.gamma, "gamma");
  if (opt.carrier_compartment) {
    add(ix.eta, "eta");
  }
  add(ix.mu, "mu");
  if (opt.carrier_compartment) {
    add(ix.theta_rec, "theta_rec");
    add(ix.alpha, "alpha");
  }
  add(ix.d_rate, "d_rate");
  add(ix.delta, "delta");
  add(ix.e0, "e0");
  if (opt.observation_model) {
    ix.obs.resize(opt.channels.size());
    for (std::size_t c = 0; c < opt.channels.size(); ++c) {
      const std::string sfx = channel_suffix(opt.channels[c]);
      add(ix.obs[c].lag, "lag_" + sfx);
      add(ix.obs[c].sigma, "sigma_" + sfx);
      add(ix.obs[c].amp, "amp_" + sfx);
      add(ix.obs[c].phase, "phase_" + sfx);
    }
  } else {
    for (const auto& ch : opt.channels) channel_suffix(ch);  // validate names
  }
  ix.count = n;
  return ix;
}

// Daily inflow into a reported compartment, linearly interpolated at a
// fractional day; zero before the simulation start.
double interp_inflow(const std::vector<double>& inflow, int burn_in, double u) {
  const double lo = -static_cast<double>(burn_in);
  if (u <= lo) return 0.0;
  const double pos = u - lo;  // grid offset
  const auto g0 = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(g0);
  if (g0 + 1 >= inflow.size()) return inflow.back();
  return (1.0 - w) * inflow[g0] + w * inflow[g0 + 1];
}

}  // namespace

std::vector<std::string> seir_param_names(const SeirOptions& opt) {
  std::vector<std::string> names;
  build_index(opt, &names);
  return names;
}

SimOutput simulate_seir(const SeirOptions& opt, std::span<const double> theta,
                        Rng& rng) {
  opt.integrator.validate();
  if (opt.t_days < 1) throw std::invalid_argument("simulate_seir: t_days must be >= 1");
  if (!(opt.population > 0)) throw std::invalid_argument("simulate_seir: population must be > 0");

  const SeirIndex ix = build_index(opt, nullptr);
  if (static_cast<int>(theta.size()) < ix.count) {
    throw std::invalid_argument("simulate_seir: parameter vector too short");
  }

  const double n_pop = opt.population;
  const double gamma = theta[ix.gamma];
  const double beta = theta[ix.beta];
  const double mu = theta[ix.mu];
  const double d_rate = theta[ix.d_rate];
  const double delta = theta[ix.delta];
  const bool carrier = opt.carrier_compartment;
  const double eta = carrier ? theta[ix.eta] : 0.0;
  const double theta_rec = carrier ? theta[ix.theta_rec] : 0.0;
  const double alpha = carrier ? theta[ix.alpha] : 0.0;

  InterventionParams iv{};
  iv.lambda[0] = theta[ix.lambda0];
  if (opt.intervention_model) {
    for (int k = 0; k < 4; ++k) iv.lambda[k + 1] = theta[ix.lambda_post[k]];
    iv.onset[0] = theta[ix.t1];
    for (int k = 0; k < 3; ++k) iv.onset[k + 1] = iv.onset[k] + theta[ix.gap[k]];
    for (int k = 0; k < 4; ++k) iv.duration[k] = theta[ix.dur[k]];
  } else {
    for (int k = 0; k < 4; ++k) {
      iv.lambda[k + 1] = iv.lambda[0];
      iv.onset[k] = 0.0;
      iv.duration[k] = 1.0;
    }
  }

  auto derivs = [&](double t, const std::array<double, 6>& y,
                    std::array<double, 6>& dy) {
    const double s = y[0], e = y[1], c = y[2], i = y[3];
    const double pressure =
        iv.at(t) * ((carrier ? c : 0.0) + beta * i) / n_pop;
    const double exposure = pressure * s;
    const double detect = carrier ? (1.0 - alpha) * eta * c : gamma * e;
    const double silent_rec = carrier ? alpha * theta_rec * c : 0.0;
    dy[0] = -exposure;
    dy[1] = exposure - gamma * e;
    dy[2] = carrier ? gamma * e - detect - silent_rec : 0.0;
    dy[3] = detect - (1.0 - delta) * mu * i - delta * d_rate * i;
    dy[4] = silent_rec + (1.0 - delta) * mu * i;
    dy[5] = delta * d_rate * i;
  };

  const int burn = opt.burn_in_days;
  const int n_days = burn + opt.t_days;  // grid covers day -burn .. t_days-1
  const double e0 = std::min(theta[ix.e0], n_pop);

  SimOutput out;
  std::array<double, 6> y{n_pop - e0, e0, 0.0, 0.0, 0.0, 0.0};
  std::vector<std::array<double, 6>> daily(n_days);
  daily[0] = y;
  double clamp_mass = 0.0;
  double t = -static_cast<double>(burn);
  for (int day = 1; day < n_days; ++day) {
    for (int s = 0; s < opt.integrator.output_stride; ++s) {
      try {
        y = rk4_step(y, derivs, t, opt.integrator.dt, &clamp_mass);
      } catch (const IntegrationError&) {
        out.ok = false;
        return out;
      }
      t += opt.integrator.dt;
    }
    for (double v : y) {
      if (!std::isfinite(v)) {
        out.ok = false;
        return out;
      }
    }
    daily[day] = y;
  }

  // Daily inflows into each reported compartment.
  const int n_ch = static_cast<int>(opt.channels.size());
  std::vector<std::vector<double>> inflow(n_ch, std::vector<double>(n_days));
  for (int c = 0; c < n_ch; ++c) {
    const std::string sfx = channel_suffix(opt.channels[c]);
    for (int g = 0; g < n_days; ++g) {
      const auto& st = daily[g];
      if (sfx == "i") {
        inflow[c][g] = carrier ? (1.0 - alpha) * eta * st[2] : gamma * st[1];
      } else if (sfx == "r") {
        inflow[c][g] = (1.0 - delta) * mu * st[3];
      } else {
        inflow[c][g] = delta * d_rate * st[3];
      }
    }
  }

  out.observed = TimeSeries::zeros(opt.channels, opt.t_days);
  if (opt.observation_model) {
    std::vector<double> cum(n_ch, 0.0);
    for (int k = 0; k < opt.t_days; ++k) {
      for (int c = 0; c < n_ch; ++c) {
        const double lag = theta[ix.obs[c].lag];
        const double sigma = theta[ix.obs[c].sigma];
        const double amp = theta[ix.obs[c].amp];
        const double phase = theta[ix.obs[c].phase];
        const double base = interp_inflow(inflow[c], burn, k - lag);
        const double f = weekly_modulation(amp, phase, k);
        const double noise = std::sqrt(cum[c]) * sigma * rng.student_t4();
        const double inc = std::max(0.0, (1.0 - f) * base + noise);
        cum[c] += inc;
        out.observed.at(k, c) = inc;
      }
    }
  } else {
    for (int k = 0; k < opt.t_days; ++k) {
      for (int c = 0; c < n_ch; ++c) {
        out.observed.at(k, c) = inflow[c][static_cast<std::size_t>(burn + k)];
      }
    }
  }
  for (double v : out.observed.values) {
    if (!std::isfinite(v)) {
      out.ok = false;
      return out;
    }
  }

  if (opt.keep_latent) {
    out.latent.reserve(n_days);
    for (const auto& st : daily) {
      out.latent.push_back(EpiState::from_array(st, n_pop));
    }
    out.latent_offset_days = -burn;
  }
  out.clamp_mass = clamp_mass;
  return out;
}

void append_dummies(std::vector<double>& theta, int k, Rng& rng) {
  if (k < 0) throw std::invalid_argument("append_dummies: k must be >= 0");
  theta.reserve(theta.size() + static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) theta.push_back(rng.uniform());
}

}  // namespace epiflow

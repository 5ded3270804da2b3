#pragma once

#include <span>
#include <string>
#include <vector>

#include "epiflow/integrate.hpp"
#include "epiflow/rng.hpp"
#include "epiflow/sim_output.hpp"

namespace epiflow {

// Three-compartment model for the first weeks of an outbreak. Reported daily
// counts are negative-binomial around the lagged new-infection inflow.
struct SirOptions {
  double population = 83e6;
  int t_days = 14;
  IntegratorConfig integrator{};
  bool keep_latent = false;
};

// theta = (lambda, mu, lag, psi, i0); trailing dummy entries are ignored.
std::vector<std::string> sir_param_names();

SimOutput simulate_sir(const SirOptions& opt, std::span<const double> theta,
                       Rng& rng);

}  // namespace epiflow

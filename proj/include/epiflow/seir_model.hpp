#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "epiflow/integrate.hpp"
#include "epiflow/intervention.hpp"
#include "epiflow/rng.hpp"
#include "epiflow/sim_output.hpp"

namespace epiflow {

// Reporting coverage lost to the weekly cycle:
//   f(t) = (1 - amp) * (1 - |sin(pi*t/7 - 0.5*phase)|)
// amp = 1 means full reporting every day (f == 0).
inline double weekly_modulation(double amp, double phase, double t) {
  const double pi = 3.14159265358979323846;
  return (1.0 - amp) * (1.0 - std::fabs(std::sin(pi * t / 7.0 - 0.5 * phase)));
}

// Six-compartment carrier model with intervention and observation layers.
// Toggles reduce the model for ablation runs; each toggle also removes the
// corresponding parameters from the vector layout (see seir_param_names).
struct SeirOptions {
  double population = 83e6;
  int t_days = 82;
  int burn_in_days = 16;  // simulation starts this many days before day 0
  std::vector<std::string> channels = {"new_infected", "new_recovered",
                                       "new_dead"};
  bool intervention_model = true;
  bool observation_model = true;
  bool carrier_compartment = true;
  IntegratorConfig integrator{};
  bool keep_latent = false;
};

// Parameter names in vector order for the configured model. Change-point
// onsets are parameterized as (t1, gap2, gap3, gap4) with positive gaps so
// ordering holds by construction.
std::vector<std::string> seir_param_names(const SeirOptions& opt);

// Simulate daily reported increments for the configured channels. theta may
// carry extra trailing entries (dummy dimensions); they are ignored.
SimOutput simulate_seir(const SeirOptions& opt, std::span<const double> theta,
                        Rng& rng);

// Extend a parameter vector with k Uniform(0,1) draws the simulator ignores.
void append_dummies(std::vector<double>& theta, int k, Rng& rng);

}  // namespace epiflow

#pragma once

// Internal JSON conversions shared by checkpoint and config-file code.

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "epiflow/networks.hpp"
#include "epiflow/priors.hpp"
#include "epiflow/training.hpp"

namespace epiflow::jsonutil {

using nlohmann::json;

inline std::string support_name(Support s) {
  switch (s) {
    case Support::kPositive: return "positive";
    case Support::kUnitInterval: return "unit_interval";
    case Support::kBounded: return "bounded";
    case Support::kUnbounded: return "unbounded";
  }
  throw std::invalid_argument("bad support enum");
}

inline Support support_from(const std::string& s) {
  if (s == "positive") return Support::kPositive;
  if (s == "unit_interval") return Support::kUnitInterval;
  if (s == "bounded") return Support::kBounded;
  if (s == "unbounded") return Support::kUnbounded;
  throw std::invalid_argument("unknown support: " + s);
}

inline std::string transform_name(Transform t) {
  switch (t) {
    case Transform::kLog: return "log";
    case Transform::kLogit: return "logit";
    case Transform::kScaledLogit: return "scaled_logit";
    case Transform::kIdentity: return "identity";
  }
  throw std::invalid_argument("bad transform enum");
}

inline Transform transform_from(const std::string& s) {
  if (s == "log") return Transform::kLog;
  if (s == "logit") return Transform::kLogit;
  if (s == "scaled_logit") return Transform::kScaledLogit;
  if (s == "identity") return Transform::kIdentity;
  throw std::invalid_argument("unknown transform: " + s);
}

inline std::string family_name(PriorFamily f) {
  switch (f) {
    case PriorFamily::kLogNormal: return "lognormal";
    case PriorFamily::kNormal: return "normal";
    case PriorFamily::kUniform: return "uniform";
    case PriorFamily::kLogitNormal: return "logitnormal";
  }
  throw std::invalid_argument("bad family enum");
}

inline PriorFamily family_from(const std::string& s) {
  if (s == "lognormal") return PriorFamily::kLogNormal;
  if (s == "normal") return PriorFamily::kNormal;
  if (s == "uniform") return PriorFamily::kUniform;
  if (s == "logitnormal") return PriorFamily::kLogitNormal;
  throw std::invalid_argument("unknown prior family: " + s);
}

inline json spec_to_json(const ParamSpec& s) {
  return json{{"name", s.name},         {"support", support_name(s.support)},
              {"lo", s.lo},             {"hi", s.hi},
              {"family", family_name(s.family)},
              {"a", s.a},               {"b", s.b},
              {"transform", transform_name(s.transform)}};
}

inline ParamSpec spec_from_json(const json& j) {
  ParamSpec s;
  s.name = j.at("name").get<std::string>();
  s.support = support_from(j.at("support").get<std::string>());
  s.lo = j.at("lo").get<double>();
  s.hi = j.at("hi").get<double>();
  s.family = family_from(j.at("family").get<std::string>());
  s.a = j.at("a").get<double>();
  s.b = j.at("b").get<double>();
  s.transform = transform_from(j.at("transform").get<std::string>());
  return s;
}

inline json space_to_json(const ParameterSpace& sp) {
  json specs = json::array();
  for (const auto& s : sp.specs) specs.push_back(spec_to_json(s));
  return json{{"specs", specs}, {"mean", sp.mean}, {"std", sp.std_dev}};
}

inline ParameterSpace space_from_json(const json& j) {
  ParameterSpace sp;
  for (const auto& js : j.at("specs")) sp.specs.push_back(spec_from_json(js));
  sp.mean = j.at("mean").get<std::vector<double>>();
  sp.std_dev = j.at("std").get<std::vector<double>>();
  sp.validate();
  return sp;
}

inline json net_to_json(const NetworkConfig& n) {
  return json{{"param_dim", n.param_dim},
              {"channels", n.channels},
              {"use_filter_net", n.use_filter_net},
              {"filter_blocks", n.filter_blocks},
              {"kernel_widths", n.kernel_widths},
              {"filters_per_width", n.filters_per_width},
              {"use_summary_net", n.use_summary_net},
              {"summary_dim", n.summary_dim},
              {"flow_blocks", n.flow_blocks},
              {"coupling_hidden", n.coupling_hidden},
              {"coupling_layers", n.coupling_layers},
              {"scale_clamp", n.scale_clamp},
              {"log1p_input", n.log1p_input},
              {"init_seed", n.init_seed}};
}

inline NetworkConfig net_from_json(const json& j) {
  NetworkConfig n;
  n.param_dim = j.at("param_dim").get<int>();
  n.channels = j.at("channels").get<int>();
  n.use_filter_net = j.at("use_filter_net").get<bool>();
  n.filter_blocks = j.at("filter_blocks").get<int>();
  n.kernel_widths = j.at("kernel_widths").get<std::vector<int>>();
  n.filters_per_width = j.at("filters_per_width").get<int>();
  n.use_summary_net = j.at("use_summary_net").get<bool>();
  n.summary_dim = j.at("summary_dim").get<int>();
  n.flow_blocks = j.at("flow_blocks").get<int>();
  n.coupling_hidden = j.at("coupling_hidden").get<int>();
  n.coupling_layers = j.at("coupling_layers").get<int>();
  n.scale_clamp = j.at("scale_clamp").get<double>();
  n.log1p_input = j.at("log1p_input").get<bool>();
  n.init_seed = j.at("init_seed").get<std::uint64_t>();
  n.validate();
  return n;
}

inline json sim_to_json(const SimulatorSpec& s) {
  json j{{"dummy_dims", s.dummy_dims}};
  if (s.model == SimulatorSpec::Model::kSir) {
    j["model"] = "sir";
    j["sir"] = json{{"population", s.sir.population},
                    {"t_days", s.sir.t_days},
                    {"dt", s.sir.integrator.dt},
                    {"output_stride", s.sir.integrator.output_stride}};
  } else {
    j["model"] = "seir";
    j["seir"] = json{{"population", s.seir.population},
                     {"t_days", s.seir.t_days},
                     {"burn_in_days", s.seir.burn_in_days},
                     {"channels", s.seir.channels},
                     {"intervention_model", s.seir.intervention_model},
                     {"observation_model", s.seir.observation_model},
                     {"carrier_compartment", s.seir.carrier_compartment},
                     {"dt", s.seir.integrator.dt},
                     {"output_stride", s.seir.integrator.output_stride}};
  }
  return j;
}

inline SimulatorSpec sim_from_json(const json& j) {
  SimulatorSpec s;
  s.dummy_dims = j.at("dummy_dims").get<int>();
  const auto model = j.at("model").get<std::string>();
  if (model == "sir") {
    s.model = SimulatorSpec::Model::kSir;
    const auto& js = j.at("sir");
    s.sir.population = js.at("population").get<double>();
    s.sir.t_days = js.at("t_days").get<int>();
    s.sir.integrator.dt = js.at("dt").get<double>();
    s.sir.integrator.output_stride = js.at("output_stride").get<int>();
  } else if (model == "seir") {
    s.model = SimulatorSpec::Model::kSeir;
    const auto& js = j.at("seir");
    s.seir.population = js.at("population").get<double>();
    s.seir.t_days = js.at("t_days").get<int>();
    s.seir.burn_in_days = js.at("burn_in_days").get<int>();
    s.seir.channels = js.at("channels").get<std::vector<std::string>>();
    s.seir.intervention_model = js.at("intervention_model").get<bool>();
    s.seir.observation_model = js.at("observation_model").get<bool>();
    s.seir.carrier_compartment = js.at("carrier_compartment").get<bool>();
    s.seir.integrator.dt = js.at("dt").get<double>();
    s.seir.integrator.output_stride = js.at("output_stride").get<int>();
  } else {
    throw std::invalid_argument("unknown model: " + model);
  }
  return s;
}

}  // namespace epiflow::jsonutil

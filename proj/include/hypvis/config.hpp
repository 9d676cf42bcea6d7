#pragma once

// Experiment configuration: one flat struct covering model, probe, Monte
// Carlo, fractal-ladder, and output settings, plus JSON loading with strict
// key checking and dotted-path --set overrides.
//
// Resolution order: built-in defaults -> HYPVIS_OUTPUT_DIR (output.dir only)
// -> --config file -> --set overrides.  Unknown keys are rejected so typos
// fail loudly instead of silently running the default.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypvis/errors.hpp"
#include "hypvis/geometry.hpp"
#include "hypvis/model.hpp"
#include "hypvis/radius_law.hpp"

namespace hypvis {

struct ExperimentConfig {
  // model.*
  double lambda = 0.2;
  RadiusLaw law = RadiusLaw::constant(0.8);
  Phase phase = Phase::vacant;
  // probe.*
  std::vector<double> depths = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> separations = {0.025, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6, pi};
  int grid_m = 1 << 14;
  // mc.*
  std::uint64_t replicates = 1000;
  std::uint64_t seed = 42;
  int workers = 1;
  // fractal.*
  double delta0 = 0.25;
  int rungs = 8;
  // output.*
  std::string out_dir = ".";
  std::string format = "csv";

  // Sampling window: deepest probe plus the largest grain that could still
  // touch it, plus slack so boundary effects stay outside every query.
  double window_rho() const {
    double dmax = 0.0;
    for (double d : depths) dmax = std::max(dmax, d);
    return dmax + law.r_max() + 2.0;
  }

  void validate() const {
    if (!(lambda >= 0.0)) throw validation_error("model.lambda must be >= 0");
    law.validate();
    if (depths.empty()) throw validation_error("probe.depths must be nonempty");
    for (double d : depths)
      if (!(d > 0.0)) throw validation_error("probe.depths entries must be > 0");
    for (double s : separations)
      if (!(s > 0.0 && s <= two_pi)) throw validation_error("probe.separations entries must be in (0, 2pi]");
    if (grid_m < (1 << 10)) throw validation_error("probe.grid must be >= 1024");
    if (replicates < 100) throw validation_error("mc.replicates must be >= 100");
    if (workers < 1) throw validation_error("mc.workers must be >= 1");
    if (!(delta0 > 0.0)) throw validation_error("fractal.delta0 must be > 0");
    if (rungs < 4) throw validation_error("fractal.rungs must be >= 4");
    if (format != "csv") throw validation_error("output.format: only \"csv\" is supported");
  }
};

namespace detail {

inline double cfg_number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw validation_error("config key " + key + " must be a number");
  return v.get<double>();
}

inline std::vector<double> cfg_number_list(const nlohmann::json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
    return out;
  }
  if (!v.is_array() || v.empty()) throw validation_error("config key " + key + " must be a number or nonempty array");
  for (const auto& e : v) {
    if (!e.is_number()) throw validation_error("config key " + key + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline std::uint64_t cfg_uint(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw validation_error("config key " + key + " must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline std::string cfg_string(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string()) throw validation_error("config key " + key + " must be a string");
  return v.get<std::string>();
}

// Radius-law params live in one object keyed by the law's parameter names.
inline RadiusLaw cfg_radius_law(const std::string& name, const nlohmann::json& params) {
  auto need = [&](const char* field) -> double {
    if (!params.contains(field))
      throw validation_error(std::string("model.radius.params: missing field \"") + field + "\" for law " + name);
    return cfg_number(params.at(field), std::string("model.radius.params.") + field);
  };
  auto allow_only = [&](std::initializer_list<const char*> fields) {
    for (auto it = params.begin(); it != params.end(); ++it) {
      bool ok = false;
      for (const char* f : fields)
        if (it.key() == f) ok = true;
      if (!ok) throw validation_error("model.radius.params: unknown field \"" + it.key() + "\" for law " + name);
    }
  };
  if (!params.is_object()) throw validation_error("model.radius.params must be an object");
  if (name == "constant") {
    allow_only({"R"});
    return RadiusLaw::constant(need("R"));
  }
  if (name == "two_point") {
    allow_only({"r1", "p", "r2"});
    return RadiusLaw::two_point(need("r1"), need("p"), need("r2"));
  }
  if (name == "exponential") {
    allow_only({"beta", "q"});
    double beta = need("beta");
    double q = params.contains("q") ? cfg_number(params.at("q"), "model.radius.params.q") : 1.0 - 1e-6;
    return RadiusLaw::exponential(beta, q);
  }
  throw validation_error("model.radius.law must be one of constant, two_point, exponential");
}

// Applies one dotted-path key to the config.  Radius-law keys need context
// (law and params arrive separately), so they stage through *law_name /
// *law_params and bind at the end of load.
struct ConfigBinder {
  ExperimentConfig* cfg;
  std::string law_name;
  nlohmann::json law_params;
  bool law_touched = false;

  void apply(const std::string& key, const nlohmann::json& v) {
    if (key == "model.lambda") {
      cfg->lambda = cfg_number(v, key);
    } else if (key == "model.radius.law") {
      law_name = cfg_string(v, key);
      law_touched = true;
    } else if (key == "model.radius.params") {
      law_params = v;
      law_touched = true;
    } else if (key == "model.phase") {
      std::string p = cfg_string(v, key);
      if (p == "vacant") cfg->phase = Phase::vacant;
      else if (p == "occupied") cfg->phase = Phase::occupied;
      else throw validation_error("model.phase must be \"vacant\" or \"occupied\"");
    } else if (key == "probe.depths") {
      cfg->depths = cfg_number_list(v, key);
    } else if (key == "probe.separations") {
      cfg->separations = cfg_number_list(v, key);
    } else if (key == "probe.grid") {
      cfg->grid_m = static_cast<int>(cfg_uint(v, key));
    } else if (key == "mc.replicates") {
      cfg->replicates = cfg_uint(v, key);
    } else if (key == "mc.seed") {
      cfg->seed = cfg_uint(v, key);
    } else if (key == "mc.workers") {
      cfg->workers = static_cast<int>(cfg_uint(v, key));
    } else if (key == "fractal.delta0") {
      cfg->delta0 = cfg_number(v, key);
    } else if (key == "fractal.rungs") {
      cfg->rungs = static_cast<int>(cfg_uint(v, key));
    } else if (key == "output.dir") {
      cfg->out_dir = cfg_string(v, key);
    } else if (key == "output.format") {
      cfg->format = cfg_string(v, key);
    } else {
      throw validation_error("unknown config key \"" + key + "\"");
    }
  }

  void finish() {
    if (!law_touched) return;
    if (law_name.empty()) law_name = cfg->law.name();
    if (law_params.is_null())
      throw validation_error("model.radius.law requires model.radius.params");
    cfg->law = cfg_radius_law(law_name, law_params);
  }
};

// Recursively flattens nested JSON objects into dotted keys, stopping at
// model.radius.params (its fields belong to the law, not the key space).
inline void cfg_flatten(const nlohmann::json& node, const std::string& prefix, ConfigBinder& b) {
  if (prefix == "model.radius.params" || !node.is_object()) {
    b.apply(prefix, node);
    return;
  }
  for (auto it = node.begin(); it != node.end(); ++it)
    cfg_flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), b);
}

}  // namespace detail

// --set values try JSON first (numbers, arrays, booleans), falling back to a
// bare string so paths need no extra quoting.
inline nlohmann::json parse_set_value(const std::string& text) {
  auto parsed = nlohmann::json::parse(text, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  return nlohmann::json(text);
}

inline ExperimentConfig load_config(const std::string& config_path,
                                    const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  if (const char* env = std::getenv("HYPVIS_OUTPUT_DIR"); env && *env) cfg.out_dir = env;

  detail::ConfigBinder binder{&cfg, {}, {}, false};
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw validation_error("cannot open config file " + config_path);
    nlohmann::json doc = nlohmann::json::parse(is, nullptr, false);
    if (doc.is_discarded()) throw validation_error("config file " + config_path + " is not valid JSON");
    if (!doc.is_object()) throw validation_error("config file must contain a JSON object");
    detail::cfg_flatten(doc, "", binder);
  }
  for (const std::string& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      throw validation_error("--set expects key=value, got \"" + ov + "\"");
    binder.apply(ov.substr(0, eq), parse_set_value(ov.substr(eq + 1)));
  }
  binder.finish();
  cfg.validate();
  return cfg;
}

// Resolved-config snapshot for the JSON sidecar.
inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"]["lambda"] = cfg.lambda;
  j["model"]["radius"]["law"] = cfg.law.name();
  nlohmann::ordered_json p;
  switch (cfg.law.kind) {
    case RadiusLaw::Kind::constant:
      p["R"] = cfg.law.R;
      break;
    case RadiusLaw::Kind::two_point:
      p["r1"] = cfg.law.r1;
      p["p"] = cfg.law.p;
      p["r2"] = cfg.law.r2;
      break;
    case RadiusLaw::Kind::exponential:
      p["beta"] = cfg.law.beta;
      p["q"] = cfg.law.q;
      break;
  }
  j["model"]["radius"]["params"] = p;
  j["model"]["phase"] = cfg.phase == Phase::vacant ? "vacant" : "occupied";
  j["probe"]["depths"] = cfg.depths;
  j["probe"]["separations"] = cfg.separations;
  j["probe"]["grid"] = cfg.grid_m;
  j["mc"]["replicates"] = cfg.replicates;
  j["mc"]["seed"] = cfg.seed;
  j["mc"]["workers"] = cfg.workers;
  j["fractal"]["delta0"] = cfg.delta0;
  j["fractal"]["rungs"] = cfg.rungs;
  j["output"]["dir"] = cfg.out_dir;
  j["output"]["format"] = cfg.format;
  return j;
}

}  // namespace hypvis

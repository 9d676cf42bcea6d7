#pragma once

// CSV and JSON-sidecar rendering for experiment results.  Renderers are pure
// (result in, string/json out): the CLI owns paths and the tests can compare
// outputs byte for byte without touching the filesystem.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypvis/config.hpp"
#include "hypvis/experiments.hpp"
#include "hypvis/io.hpp"
#include "hypvis/selftest.hpp"

namespace hypvis {

// Blank cell for not-applicable values (e.g. analytic reference in a phase
// without one); keeps the CSV grammar stable without inventing sentinels.
inline std::string fmt_cell(double x) { return std::isnan(x) ? std::string() : fmt17(x); }

inline const char* provenance_name(AlphaProvenance p) {
  switch (p) {
    case AlphaProvenance::closed_form_vacant: return "closed_form_vacant";
    case AlphaProvenance::integral_equation_occupied: return "integral_equation_occupied";
    case AlphaProvenance::monte_carlo_fit: return "monte_carlo_fit";
  }
  return "unknown";
}

inline nlohmann::ordered_json alpha_to_json(const AlphaValue& a) {
  nlohmann::ordered_json j;
  j["value"] = a.value;
  j["provenance"] = provenance_name(a.provenance);
  j["tolerance"] = a.tolerance;
  return j;
}

// Shared sidecar skeleton: tool version, resolved config (minus the worker
// count, which must not influence any output byte), window, and seed.
inline nlohmann::ordered_json sidecar_base(const ExperimentConfig& cfg, const char* experiment,
                                           double window, std::uint64_t stream) {
  nlohmann::ordered_json j;
  j["tool"] = version_string;
  j["experiment"] = experiment;
  nlohmann::ordered_json c = config_to_json(cfg);
  c["mc"].erase("workers");
  j["config"] = c;
  j["window_rho"] = window;
  j["seed"]["base"] = cfg.seed;
  j["seed"]["stream"] = stream;
  j["radius_law_tail_mass"] = cfg.law.tail_mass();
  return j;
}

// ---- containment rate ----

inline std::string render_frate_csv(const FrateResult& r) {
  CsvBuilder csv({"depth", "n", "contained", "fhat", "stderr", "f_ref", "fm_diff_mean",
                  "fm_diff_stderr"});
  for (const FrateRow& row : r.rows)
    csv.line({fmt17(row.depth), std::to_string(row.n), std::to_string(row.contained),
              fmt17(row.fhat), fmt17(row.se), fmt_cell(row.f_ref), fmt_cell(row.fm_mean),
              fmt_cell(row.fm_se)});
  return csv.str();
}

inline nlohmann::ordered_json frate_sidecar(const FrateResult& r) {
  nlohmann::ordered_json j = sidecar_base(r.cfg, "frate", r.window, streams::frate);
  if (r.cfg.phase == Phase::vacant) {
    j["analytic"]["alpha"] = alpha_to_json(alpha_vacant(r.cfg.lambda, r.cfg.law));
    j["first_moment_identity_ok"] = r.fm_ok;
  }
  return j;
}

// ---- exponent fit ----

inline nlohmann::ordered_json alpha_fit_sidecar(const AlphaFitResult& r) {
  nlohmann::ordered_json j =
      sidecar_base(r.base.cfg, "alpha-fit", r.base.window, streams::frate);
  j["fit"]["alpha"] = alpha_to_json(r.fit.alpha);
  j["fit"]["slope"] = r.fit.slope;
  j["fit"]["intercept"] = r.fit.intercept;
  j["fit"]["slope_stderr"] = r.fit.slope_stderr;
  if (r.have_reference) j["analytic"]["alpha"] = alpha_to_json(r.reference);
  if (r.base.cfg.phase == Phase::vacant)
    j["first_moment_identity_ok"] = r.base.fm_ok;
  return j;
}

// ---- dimension experiments ----

inline std::string render_dim_csv(const DimResult& r) {
  CsvBuilder csv({"L", "n", "survived", "survival", "dim_mean", "dim_stderr",
                  "delta_min_mean", "target_dim"});
  for (const DimRow& row : r.rows)
    csv.line({fmt17(row.L), std::to_string(row.n), std::to_string(row.survived),
              fmt17(row.survival), fmt_cell(row.dim_mean), fmt_cell(row.dim_se),
              fmt_cell(row.dmin_mean), fmt_cell(r.target_dim)});
  return csv.str();
}

inline std::string render_arcs_csv(const std::vector<Interval>& arcs) {
  CsvBuilder csv({"arc_lo", "arc_hi"});
  for (const Interval& a : arcs) csv.line({fmt17(a.lo), fmt17(a.hi)});
  return csv.str();
}

inline nlohmann::ordered_json dim_sidecar(const DimResult& r, const char* experiment,
                                          std::uint64_t stream) {
  nlohmann::ordered_json j = sidecar_base(r.cfg, experiment, r.window, stream);
  if (r.have_alpha) {
    j["analytic"]["alpha_model"] = r.alpha_model;
    j["analytic"]["target_dim"] = r.target_dim;
  }
  j["sample"]["present"] = r.have_sample;
  if (r.have_sample) {
    j["sample"]["replicate"] = r.sample_rep;
    j["sample"]["L"] = r.sample_L;
  }
  return j;
}

// ---- pair correlation ----

inline std::string render_pair_csv(const PairResult& r) {
  CsvBuilder csv({"psi", "rho", "n", "both", "p2hat", "p2_stderr", "ratio", "ratio_stderr"});
  for (const PairRow& row : r.rows)
    csv.line({fmt17(row.psi), fmt17(row.rho), std::to_string(row.n),
              std::to_string(row.both), fmt17(row.p2), fmt17(row.p2_se),
              fmt_cell(row.ratio), fmt_cell(row.ratio_se)});
  return csv.str();
}

inline nlohmann::ordered_json pair_sidecar(const PairResult& r) {
  nlohmann::ordered_json j = sidecar_base(r.cfg, "pairs", r.window, streams::pairs);
  j["depth"] = r.depth;
  j["n1"] = r.n1;
  j["fhat"] = r.fhat;
  j["f_stderr"] = r.f_se;
  j["analytic"]["f_vacant"] = r.f_ref;
  j["fit"]["log_log_slope"] = r.slope;
  j["fit"]["slope_stderr"] = r.slope_se;
  return j;
}

// ---- selftest ----

inline std::string render_selftest(const SelfTestReport& r) {
  std::string out;
  for (const SelfTestCheck& c : r.checks) {
    out += c.pass ? "[PASS] " : "[FAIL] ";
    out += c.name + ": " + c.detail + "\n";
  }
  out += r.all_pass() ? "selftest: all checks passed\n" : "selftest: FAILURES PRESENT\n";
  return out;
}

}  // namespace hypvis

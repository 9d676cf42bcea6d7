// hypvis: visibility experiments in the hyperbolic Boolean model.
//
// Subcommands: alpha (analytic exponent), frate, alpha-fit, visibility,
// lines, pairs (Monte Carlo experiments writing CSV + JSON sidecars), and
// selftest.  Exit codes: 0 ok, 1 validation error, 2 numerical failure,
// 3 selftest failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hypvis/analytic.hpp"
#include "hypvis/config.hpp"
#include "hypvis/experiments.hpp"
#include "hypvis/io.hpp"
#include "hypvis/reports.hpp"
#include "hypvis/selftest.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  bool quiet = false;
};

void attach_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--set", o.sets, "override a config key, e.g. --set model.lambda=0.3");
  cmd->add_flag("--quiet", o.quiet, "suppress the run summary");
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::filesystem::path out_path(const hypvis::ExperimentConfig& cfg, const char* name) {
  return std::filesystem::path(cfg.out_dir) / name;
}

void write_outputs(const hypvis::ExperimentConfig& cfg, bool quiet,
                   const std::vector<std::pair<const char*, std::string>>& files) {
  for (const auto& [name, content] : files) {
    auto p = out_path(cfg, name);
    hypvis::write_text_file(p, content);
    if (!quiet) std::printf("wrote %s\n", p.string().c_str());
  }
}

int run_alpha(const hypvis::ExperimentConfig& cfg, bool quiet) {
  hypvis::AlphaValue a;
  if (cfg.phase == hypvis::Phase::vacant) {
    a = hypvis::alpha_vacant(cfg.lambda, cfg.law);
  } else {
    if (cfg.law.kind != hypvis::RadiusLaw::Kind::constant)
      throw hypvis::validation_error(
          "analytic alpha for the occupied phase requires the constant radius law");
    a = hypvis::alpha_occupied(cfg.lambda, cfg.law.R);
  }
  if (quiet) {
    std::printf("%s\n", hypvis::fmt17(a.value).c_str());
  } else {
    std::printf("alpha = %s\nprovenance = %s\ntolerance = %s\n", hypvis::fmt17(a.value).c_str(),
                hypvis::provenance_name(a.provenance), hypvis::fmt17(a.tolerance).c_str());
  }
  return 0;
}

int run_frate(const hypvis::ExperimentConfig& cfg, bool quiet) {
  Timer t;
  hypvis::FrateResult r = hypvis::exp_frate(cfg);
  write_outputs(cfg, quiet,
                {{"frate.csv", hypvis::render_frate_csv(r)},
                 {"frate.meta.json", hypvis::frate_sidecar(r).dump(2) + "\n"}});
  if (!quiet) {
    for (const auto& row : r.rows) {
      std::printf("f(%.6g) = %.6g +/- %.6g", row.depth, row.fhat, row.se);
      if (!std::isnan(row.f_ref)) std::printf("  [analytic %.6g]", row.f_ref);
      std::printf("\n");
    }
    if (cfg.phase == hypvis::Phase::vacant)
      std::printf("first-moment identity: %s\n", r.fm_ok ? "ok (within 3 stderr)" : "VIOLATED");
    std::printf("elapsed %.2f s\n", t.seconds());
  }
  return 0;
}

int run_alpha_fit(const hypvis::ExperimentConfig& cfg, bool quiet) {
  Timer t;
  hypvis::AlphaFitResult r = hypvis::exp_alpha_fit(cfg);
  write_outputs(cfg, quiet,
                {{"alpha_fit.csv", hypvis::render_frate_csv(r.base)},
                 {"alpha_fit.meta.json", hypvis::alpha_fit_sidecar(r).dump(2) + "\n"}});
  if (!quiet) {
    std::printf("alpha_fit = %.6g +/- %.6g (intercept %.6g)\n", r.fit.alpha.value,
                r.fit.slope_stderr, r.fit.intercept);
    if (r.have_reference) std::printf("analytic alpha = %.6g\n", r.reference.value);
    std::printf("elapsed %.2f s\n", t.seconds());
  }
  return 0;
}

int run_dim(const hypvis::ExperimentConfig& cfg, bool quiet, bool lines) {
  Timer t;
  hypvis::DimResult r = lines ? hypvis::exp_lines_dim(cfg) : hypvis::exp_visibility_dim(cfg);
  const char* csv_name = lines ? "lines.csv" : "visibility.csv";
  const char* meta_name = lines ? "lines.meta.json" : "visibility.meta.json";
  const char* arcs_name = lines ? "lines_arcs.csv" : "visibility_arcs.csv";
  auto sidecar = hypvis::dim_sidecar(r, lines ? "lines" : "visibility",
                                     lines ? hypvis::streams::lines
                                           : hypvis::streams::visibility);
  std::vector<std::pair<const char*, std::string>> files{
      {csv_name, hypvis::render_dim_csv(r)}};
  if (r.have_sample) {
    sidecar["sample"]["file"] = arcs_name;
    files.push_back({arcs_name, hypvis::render_arcs_csv(r.sample_arcs)});
  }
  files.push_back({meta_name, sidecar.dump(2) + "\n"});
  write_outputs(cfg, quiet, files);
  if (!quiet) {
    for (const auto& row : r.rows) {
      std::printf("L=%.6g: survival %.4g (%llu/%llu)", row.L, row.survival,
                  (unsigned long long)row.survived, (unsigned long long)row.n);
      if (row.survived > 0)
        std::printf(", dim %.4g +/- %.4g, delta_min %.4g", row.dim_mean, row.dim_se,
                    row.dmin_mean);
      std::printf("\n");
    }
    if (r.have_alpha)
      std::printf("model alpha = %.6g, predicted dimension = %.6g\n", r.alpha_model,
                  r.target_dim);
    std::printf("elapsed %.2f s\n", t.seconds());
  }
  return 0;
}

int run_pairs(const hypvis::ExperimentConfig& cfg, bool quiet) {
  Timer t;
  hypvis::PairResult r = hypvis::exp_pair_correlation(cfg);
  write_outputs(cfg, quiet,
                {{"pairs.csv", hypvis::render_pair_csv(r)},
                 {"pairs.meta.json", hypvis::pair_sidecar(r).dump(2) + "\n"}});
  if (!quiet) {
    std::printf("f(%.6g) = %.6g +/- %.6g [analytic %.6g]\n", r.depth, r.fhat, r.f_se, r.f_ref);
    for (const auto& row : r.rows)
      std::printf("psi=%.6g (rho %.4g): ratio %.5g +/- %.5g\n", row.psi, row.rho, row.ratio,
                  row.ratio_se);
    std::printf("log-log slope = %.5g +/- %.5g\n", r.slope, r.slope_se);
    std::printf("elapsed %.2f s\n", t.seconds());
  }
  return 0;
}

int run_selftest(const hypvis::ExperimentConfig& cfg, bool quiet) {
  hypvis::SelfTestReport rep = hypvis::run_selftest(cfg.seed);
  if (quiet) {
    for (const auto& c : rep.checks)
      if (!c.pass) std::printf("[FAIL] %s: %s\n", c.name.c_str(), c.detail.c_str());
    if (!rep.all_pass()) std::printf("selftest: FAILURES PRESENT\n");
  } else {
    std::fputs(hypvis::render_selftest(rep).c_str(), stdout);
  }
  return rep.all_pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"visibility experiments in the hyperbolic Boolean model"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd;
    CommonOpts opt;
  };
  std::vector<std::pair<std::string, Sub>> subs;
  for (const char* name : {"alpha", "frate", "alpha-fit", "visibility", "lines", "pairs",
                           "selftest"}) {
    Sub s;
    s.cmd = app.add_subcommand(name, "");
    subs.emplace_back(name, s);
  }
  subs[0].second.cmd->description("print the analytic exponent of the configured model");
  subs[1].second.cmd->description("containment rate f(r) per probe depth");
  subs[2].second.cmd->description("fit the decay exponent from containment rates");
  subs[3].second.cmd->description("dimension of the visible direction set");
  subs[4].second.cmd->description("dimension of the fully visible line set");
  subs[5].second.cmd->description("pair correlation of direction visibility");
  subs[6].second.cmd->description("run the built-in check suite");
  for (auto& [name, s] : subs) attach_common(s.cmd, s.opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.cmd->parsed()) continue;
      hypvis::ExperimentConfig cfg = hypvis::load_config(s.opt.config_path, s.opt.sets);
      if (name == "alpha") return run_alpha(cfg, s.opt.quiet);
      if (name == "frate") return run_frate(cfg, s.opt.quiet);
      if (name == "alpha-fit") return run_alpha_fit(cfg, s.opt.quiet);
      if (name == "visibility") return run_dim(cfg, s.opt.quiet, false);
      if (name == "lines") return run_dim(cfg, s.opt.quiet, true);
      if (name == "pairs") return run_pairs(cfg, s.opt.quiet);
      if (name == "selftest") return run_selftest(cfg, s.opt.quiet);
    }
    std::fprintf(stderr, "error: no subcommand selected\n");
    return 1;
  } catch (const hypvis::validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const hypvis::numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

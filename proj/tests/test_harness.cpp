#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hypvis/config.hpp"
#include "hypvis/experiments.hpp"
#include "hypvis/reports.hpp"
#include "hypvis/selftest.hpp"

using namespace hypvis;

TEST_CASE("config: defaults and window formula") {
  ExperimentConfig cfg;
  REQUIRE(cfg.lambda == 0.2);
  REQUIRE(cfg.law.kind == RadiusLaw::Kind::constant);
  REQUIRE(cfg.law.R == 0.8);
  REQUIRE(cfg.phase == Phase::vacant);
  REQUIRE(cfg.depths == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  REQUIRE(cfg.separations.size() == 8);
  REQUIRE(cfg.grid_m == (1 << 14));
  REQUIRE(cfg.replicates == 1000);
  REQUIRE(cfg.seed == 42);
  REQUIRE(cfg.workers == 1);
  REQUIRE(cfg.delta0 == 0.25);
  REQUIRE(cfg.rungs == 8);
  REQUIRE(cfg.format == "csv");
  REQUIRE(cfg.window_rho() == Catch::Approx(4.0 + 0.8 + 2.0));
  REQUIRE_NOTHROW(cfg.validate());

  cfg.depths = {1.0, 4.0, 2.0};
  cfg.law = RadiusLaw::exponential(2.0);
  REQUIRE(cfg.window_rho() == Catch::Approx(4.0 + cfg.law.r_max() + 2.0));
}

TEST_CASE("config: validation rejects bad values") {
  auto bad = [](auto&& mutate) {
    ExperimentConfig cfg;
    mutate(cfg);
    REQUIRE_THROWS_AS(cfg.validate(), validation_error);
  };
  bad([](ExperimentConfig& c) { c.lambda = -0.1; });
  bad([](ExperimentConfig& c) { c.depths.clear(); });
  bad([](ExperimentConfig& c) { c.depths = {1.0, 0.0}; });
  bad([](ExperimentConfig& c) { c.separations = {-0.1}; });
  bad([](ExperimentConfig& c) { c.grid_m = 512; });
  bad([](ExperimentConfig& c) { c.replicates = 99; });
  bad([](ExperimentConfig& c) { c.workers = 0; });
  bad([](ExperimentConfig& c) { c.delta0 = 0.0; });
  bad([](ExperimentConfig& c) { c.rungs = 3; });
  bad([](ExperimentConfig& c) { c.format = "parquet"; });
}

TEST_CASE("config: file load plus --set overrides") {
  auto path = std::filesystem::temp_directory_path() / "hypvis_cfg_test.json";
  {
    std::ofstream os(path);
    os << R"({"model":{"lambda":0.5,
                       "radius":{"law":"two_point","params":{"r1":0.4,"p":0.5,"r2":1.0}},
                       "phase":"occupied"},
              "probe":{"depths":2.5},
              "mc":{"replicates":500,"seed":7}})";
  }
  ExperimentConfig cfg = load_config(path.string(), {"mc.workers=3", "fractal.rungs=6"});
  REQUIRE(cfg.lambda == 0.5);
  REQUIRE(cfg.law.kind == RadiusLaw::Kind::two_point);
  REQUIRE(cfg.law.r1 == 0.4);
  REQUIRE(cfg.law.p == 0.5);
  REQUIRE(cfg.law.r2 == 1.0);
  REQUIRE(cfg.phase == Phase::occupied);
  REQUIRE(cfg.depths == std::vector<double>{2.5});  // scalar promotes to one depth
  REQUIRE(cfg.replicates == 500);
  REQUIRE(cfg.seed == 7);
  REQUIRE(cfg.workers == 3);
  REQUIRE(cfg.rungs == 6);

  // overrides win over the file
  ExperimentConfig cfg2 = load_config(path.string(), {"model.lambda=0.75", "probe.depths=[1,2,3,4]"});
  REQUIRE(cfg2.lambda == 0.75);
  REQUIRE(cfg2.depths == std::vector<double>{1.0, 2.0, 3.0, 4.0});

  std::filesystem::remove(path);
}

TEST_CASE("config: strict keys and malformed input") {
  REQUIRE_THROWS_AS(load_config("", {"bogus.key=1"}), validation_error);
  REQUIRE_THROWS_AS(load_config("", {"model.lambdaa=1"}), validation_error);
  REQUIRE_THROWS_AS(load_config("", {"no_equals"}), validation_error);
  REQUIRE_THROWS_AS(load_config("", {"model.lambda=abc"}), validation_error);
  REQUIRE_THROWS_AS(load_config("/nonexistent/nope.json", {}), validation_error);
  // a new law name requires its params in the same resolution pass
  REQUIRE_THROWS_AS(load_config("", {"model.radius.law=exponential"}), validation_error);
  REQUIRE_THROWS_AS(load_config("", {"model.radius.params={\"R\":1,\"junk\":2}"}),
                    validation_error);

  auto path = std::filesystem::temp_directory_path() / "hypvis_cfg_bad.json";
  std::ofstream(path) << "{not json";
  REQUIRE_THROWS_AS(load_config(path.string(), {}), validation_error);
  std::filesystem::remove(path);
}

TEST_CASE("config: radius params alone rebind the current law") {
  ExperimentConfig cfg = load_config("", {"model.radius.params={\"R\":1.5}"});
  REQUIRE(cfg.law.kind == RadiusLaw::Kind::constant);
  REQUIRE(cfg.law.R == 1.5);

  ExperimentConfig cfg2 = load_config(
      "", {"model.radius.law=exponential", "model.radius.params={\"beta\":2.5}"});
  REQUIRE(cfg2.law.kind == RadiusLaw::Kind::exponential);
  REQUIRE(cfg2.law.beta == 2.5);
  REQUIRE(cfg2.law.q == 1.0 - 1e-6);  // default truncation quantile
}

TEST_CASE("config: output dir from the environment") {
  setenv("HYPVIS_OUTPUT_DIR", "/tmp/hypvis_env_dir", 1);
  REQUIRE(load_config("", {}).out_dir == "/tmp/hypvis_env_dir");
  REQUIRE(load_config("", {"output.dir=elsewhere"}).out_dir == "elsewhere");
  unsetenv("HYPVIS_OUTPUT_DIR");
  REQUIRE(load_config("", {}).out_dir == ".");
}

TEST_CASE("config: json snapshot") {
  ExperimentConfig cfg;
  cfg.law = RadiusLaw::exponential(3.0, 0.999);
  auto j = config_to_json(cfg);
  REQUIRE(j["model"]["lambda"] == 0.2);
  REQUIRE(j["model"]["radius"]["law"] == "exponential");
  REQUIRE(j["model"]["radius"]["params"]["beta"] == 3.0);
  REQUIRE(j["model"]["radius"]["params"]["q"] == 0.999);
  REQUIRE(j["model"]["phase"] == "vacant");
  REQUIRE(j["mc"]["workers"] == 1);
}

TEST_CASE("run_batches: deterministic merge order and error propagation") {
  auto run = [](int workers) {
    auto slots = run_batches<Accum>(1000, workers, [](std::uint64_t rep, Accum& a) {
      a.add(std::sin(double(rep)) * 1e-3);
    });
    Accum total;
    for (const Accum& s : slots) total.merge(s);
    return total;
  };
  Accum a1 = run(1), a3 = run(3), a8 = run(8);
  REQUIRE(a1.n == 1000);
  REQUIRE(a1.s == a3.s);  // bitwise: merge order is batch order, not thread order
  REQUIRE(a1.s2 == a3.s2);
  REQUIRE(a1.s == a8.s);
  REQUIRE(a1.s2 == a8.s2);

  REQUIRE_THROWS_AS(run_batches<int>(600, 2,
                                     [](std::uint64_t rep, int&) {
                                       if (rep == 300)
                                         throw validation_error("boom at replicate 300");
                                     }),
                    validation_error);
}

TEST_CASE("pruned_configuration matches the full sample on in-range queries") {
  ExperimentConfig cfg;
  cfg.lambda = 0.3;
  cfg.law = RadiusLaw::two_point(0.4, 0.5, 1.0);
  cfg.depths = {1.0, 3.0};
  Seed seed{11, streams::frate};
  const double keep = 3.0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    Configuration pruned = pruned_configuration(cfg, seed, rep, keep);
    Configuration full =
        sample_configuration(cfg.lambda, Window{cfg.window_rho()}, cfg.law, seed, rep);
    REQUIRE(pruned.grains.size() <= full.grains.size());
    for (double L : cfg.depths) {
      RaySegment seg{0.7, L};
      REQUIRE(segment_in_vacant(pruned, seg) == segment_in_vacant(full, seg));
      REQUIRE(segment_in_occupied(pruned, seg) == segment_in_occupied(full, seg));
      ArcSet a = visible_arcs_vacant(pruned, L), b = visible_arcs_vacant(full, L);
      REQUIRE(a.arcs().size() == b.arcs().size());
      REQUIRE(total_length(a) == total_length(b));  // bitwise equal construction
    }
  }
}

TEST_CASE("exp_frate: empty model degenerates exactly") {
  ExperimentConfig cfg;
  cfg.lambda = 0.0;
  cfg.replicates = 200;
  FrateResult vac = exp_frate(cfg);
  for (const FrateRow& row : vac.rows) {
    REQUIRE(row.contained == 200);
    REQUIRE(row.fhat == 1.0);
    REQUIRE(row.se == 0.0);
    REQUIRE(row.f_ref == 1.0);
    REQUIRE(row.fm_mean == 0.0);
    REQUIRE(row.fm_se == 0.0);
  }
  REQUIRE(vac.fm_ok);

  cfg.phase = Phase::occupied;
  FrateResult occ = exp_frate(cfg);
  for (const FrateRow& row : occ.rows) {
    REQUIRE(row.contained == 0);
    REQUIRE(std::isnan(row.f_ref));
    REQUIRE(std::isnan(row.fm_mean));
  }
}

TEST_CASE("exp_frate: tracks the analytic rate and is monotone in depth") {
  ExperimentConfig cfg;
  cfg.replicates = 2000;
  FrateResult r = exp_frate(cfg);
  REQUIRE(r.rows.size() == 4);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const FrateRow& row = r.rows[i];
    REQUIRE(row.n == 2000);
    REQUIRE(std::abs(row.fhat - row.f_ref) <= 5.0 * row.se);
    // same configurations at every depth: deeper containment implies shallower
    if (i) REQUIRE(row.contained <= r.rows[i - 1].contained);
  }
  REQUIRE(r.fm_ok);
  REQUIRE(r.window == Catch::Approx(6.8));
}

TEST_CASE("exp_frate: worker count never changes an output byte") {
  ExperimentConfig cfg;
  cfg.replicates = 400;
  cfg.workers = 1;
  FrateResult r1 = exp_frate(cfg);
  cfg.workers = 3;
  FrateResult r3 = exp_frate(cfg);
  cfg.workers = 8;
  FrateResult r8 = exp_frate(cfg);
  REQUIRE(render_frate_csv(r1) == render_frate_csv(r3));
  REQUIRE(render_frate_csv(r1) == render_frate_csv(r8));
  REQUIRE(frate_sidecar(r1).dump() == frate_sidecar(r3).dump());
}

TEST_CASE("exp_alpha_fit: recovers the closed-form exponent") {
  ExperimentConfig cfg;
  cfg.replicates = 2000;
  AlphaFitResult r = exp_alpha_fit(cfg);
  REQUIRE(r.have_reference);
  REQUIRE(r.reference.provenance == AlphaProvenance::closed_form_vacant);
  REQUIRE(r.fit.alpha.provenance == AlphaProvenance::monte_carlo_fit);
  REQUIRE(r.fit.slope_stderr > 0.0);
  REQUIRE(std::abs(r.fit.alpha.value - r.reference.value) <= 4.0 * r.fit.slope_stderr);

  cfg.depths = {1.0, 2.0, 3.0};
  REQUIRE_THROWS_AS(exp_alpha_fit(cfg), validation_error);
}

TEST_CASE("exp_alpha_fit: zero-count depth is rejected with guidance") {
  ExperimentConfig cfg;
  cfg.lambda = 2.0;
  cfg.depths = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  cfg.replicates = 100;
  try {
    exp_alpha_fit(cfg);
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    REQUIRE(std::string(e.what()).find("no containment events") != std::string::npos);
    REQUIRE(std::string(e.what()).find("depth") != std::string::npos);
  }
}

TEST_CASE("exp_visibility_dim: empty model gives the full circle") {
  ExperimentConfig cfg;
  cfg.lambda = 0.0;
  cfg.replicates = 100;
  cfg.depths = {2.0};
  DimResult r = exp_visibility_dim(cfg);
  REQUIRE(r.rows.size() == 1);
  REQUIRE(r.rows[0].survived == 100);
  REQUIRE(r.rows[0].survival == 1.0);
  REQUIRE(r.rows[0].dim_mean >= 0.98);
  REQUIRE(r.have_alpha);
  REQUIRE(r.alpha_model == 0.0);
  REQUIRE(r.target_dim == 1.0);
  REQUIRE(r.have_sample);
  REQUIRE(r.sample_rep == 0);
  REQUIRE(r.sample_arcs.size() == 1);
}

TEST_CASE("exp_visibility_dim: desk-scale slope lands near 1 - alpha") {
  ExperimentConfig cfg;
  cfg.lambda = 0.12764;  // alpha ~ 0.3 with unit disks
  cfg.law = RadiusLaw::constant(1.0);
  cfg.depths = {6.0};
  cfg.replicates = 300;
  cfg.rungs = 12;
  DimResult r = exp_visibility_dim(cfg);
  REQUIRE(r.have_alpha);
  REQUIRE(r.alpha_model == Catch::Approx(0.3).margin(1e-4));
  REQUIRE(r.target_dim == Catch::Approx(0.7).margin(1e-4));
  const DimRow& row = r.rows[0];
  REQUIRE(row.survived > 100);
  REQUIRE(row.survived < 300);
  REQUIRE(row.dim_mean > 0.6);
  REQUIRE(row.dim_mean < 0.9);
  REQUIRE(row.dim_se > 0.0);
  REQUIRE(row.dmin_mean > 0.0);
  REQUIRE(r.have_sample);
  REQUIRE(!r.sample_arcs.empty());
}

TEST_CASE("exp_lines_dim: empty model and the doubling contract") {
  ExperimentConfig cfg;
  cfg.lambda = 0.0;
  cfg.replicates = 100;
  cfg.depths = {2.0};
  DimResult r = exp_lines_dim(cfg);
  REQUIRE(r.rows[0].survival == 1.0);
  REQUIRE(r.rows[0].dim_mean >= 0.98);  // all lines visible -> full circle after doubling
  REQUIRE(r.target_dim == 1.0);
}

TEST_CASE("exp_lines_dim: desk-scale slope lands near 1 - 2 alpha") {
  ExperimentConfig cfg;
  cfg.lambda = 0.08509;  // alpha ~ 0.2 with unit disks
  cfg.law = RadiusLaw::constant(1.0);
  cfg.depths = {10.0};
  cfg.replicates = 200;
  cfg.rungs = 12;
  DimResult r = exp_lines_dim(cfg);
  REQUIRE(r.target_dim == Catch::Approx(0.6).margin(1e-4));
  const DimRow& row = r.rows[0];
  REQUIRE(row.survived > 50);
  REQUIRE(row.dim_mean > 0.5);
  REQUIRE(row.dim_mean < 0.7);
}

TEST_CASE("exp_pair_correlation: conventions and structure") {
  ExperimentConfig cfg;
  cfg.phase = Phase::occupied;
  REQUIRE_THROWS_AS(exp_pair_correlation(cfg), validation_error);

  cfg.phase = Phase::vacant;
  cfg.lambda = 0.0;
  cfg.replicates = 100;
  cfg.depths = {2.0};
  PairResult empty = exp_pair_correlation(cfg);
  REQUIRE(empty.fhat == 1.0);
  REQUIRE(empty.n1 == 100);
  for (const PairRow& row : empty.rows) {
    REQUIRE(row.both == 100);
    REQUIRE(row.ratio == 1.0);
    REQUIRE(row.ratio_se == 0.0);
  }
  REQUIRE(std::isnan(empty.slope));  // zero-variance points carry no slope information
}

TEST_CASE("exp_pair_correlation: short-range enhancement at desk scale") {
  ExperimentConfig cfg;
  cfg.lambda = 2.99875;
  cfg.law = RadiusLaw::constant(0.05);
  cfg.depths = {6.0};
  cfg.replicates = 2000;
  PairResult r = exp_pair_correlation(cfg);
  REQUIRE(std::abs(r.fhat - r.f_ref) <= 5.0 * r.f_se);
  REQUIRE(r.rows.size() == cfg.separations.size());
  REQUIRE(r.rows.front().psi == 0.025);
  REQUIRE(r.rows.front().rho == Catch::Approx(dist(HPoint{1.0, 0.0}, HPoint{1.0, 0.025})));
  // nested events: both-visible can never beat single-visible
  for (const PairRow& row : r.rows) REQUIRE(row.both <= r.n1);
  // coinciding directions inflate the ratio; antipodal ones do not
  REQUIRE(r.rows.front().ratio > r.rows.back().ratio);
  REQUIRE(r.slope < 0.05);
  REQUIRE(r.slope_se > 0.0);
}

TEST_CASE("renderers: headers, blank cells, and sidecar shape") {
  ExperimentConfig cfg;
  cfg.lambda = 0.0;
  cfg.replicates = 100;
  cfg.depths = {1.0};

  FrateResult fr = exp_frate(cfg);
  std::string csv = render_frate_csv(fr);
  REQUIRE(csv.rfind("depth,n,contained,fhat,stderr,f_ref,fm_diff_mean,fm_diff_stderr\n", 0) ==
          0);
  REQUIRE(csv.find("1,100,100,1,0,1,0,0\n") != std::string::npos);

  cfg.phase = Phase::occupied;
  FrateResult occ = exp_frate(cfg);
  std::string occ_csv = render_frate_csv(occ);
  // occupied rows leave the vacant-only columns blank
  REQUIRE(occ_csv.find("1,100,0,0,0,,,\n") != std::string::npos);

  auto j = frate_sidecar(fr);
  REQUIRE(j["tool"] == version_string);
  REQUIRE(j["experiment"] == "frate");
  REQUIRE(!j["config"]["mc"].contains("workers"));
  REQUIRE(j["config"]["mc"]["seed"] == 42);
  REQUIRE(j["seed"]["stream"] == streams::frate);
  REQUIRE(j["first_moment_identity_ok"] == true);
  REQUIRE(j["analytic"]["alpha"]["provenance"] == "closed_form_vacant");

  cfg.phase = Phase::vacant;
  DimResult dr = exp_visibility_dim(cfg);
  std::string dcsv = render_dim_csv(dr);
  REQUIRE(dcsv.rfind("L,n,survived,survival,dim_mean,dim_stderr,delta_min_mean,target_dim\n",
                     0) == 0);
  std::string arcs = render_arcs_csv(dr.sample_arcs);
  REQUIRE(arcs.rfind("arc_lo,arc_hi\n", 0) == 0);
  REQUIRE(arcs.find("0,6.2831853071795862\n") != std::string::npos);
  auto dj = dim_sidecar(dr, "visibility", streams::visibility);
  REQUIRE(dj["analytic"]["target_dim"] == 1.0);
  REQUIRE(dj["sample"]["present"] == true);
  REQUIRE(dj["sample"]["replicate"] == 0);

  PairResult pr = exp_pair_correlation(cfg);
  std::string pcsv = render_pair_csv(pr);
  REQUIRE(pcsv.rfind("psi,rho,n,both,p2hat,p2_stderr,ratio,ratio_stderr\n", 0) == 0);
  auto pj = pair_sidecar(pr);
  REQUIRE(pj["depth"] == 1.0);
  REQUIRE(pj["n1"] == 100);

  AlphaFitResult ar;  // rendered sidecar shape only; fields filled by hand
  ar.base = fr;
  ar.fit.alpha = AlphaValue{0.25, AlphaProvenance::monte_carlo_fit, 0.01};
  ar.fit.slope = 0.25;
  ar.fit.intercept = 0.1;
  ar.fit.slope_stderr = 0.01;
  ar.reference = alpha_vacant(0.2, RadiusLaw::constant(0.8));
  ar.have_reference = true;
  auto aj = alpha_fit_sidecar(ar);
  REQUIRE(aj["experiment"] == "alpha-fit");
  REQUIRE(aj["fit"]["alpha"]["provenance"] == "monte_carlo_fit");
  REQUIRE(aj["analytic"]["alpha"]["value"] == ar.reference.value);
}

TEST_CASE("occupied dimension rows render blank when nothing survives") {
  ExperimentConfig cfg;
  cfg.phase = Phase::occupied;
  cfg.lambda = 0.02;  // sparse: the probe segment is essentially never covered
  cfg.law = RadiusLaw::two_point(0.3, 0.5, 0.6);
  cfg.depths = {1.0};
  cfg.replicates = 100;
  cfg.grid_m = 1 << 10;
  DimResult r = exp_visibility_dim(cfg);
  REQUIRE(!r.have_alpha);  // no analytic exponent for the two-point occupied model
  REQUIRE(std::isnan(r.target_dim));
  REQUIRE(r.rows[0].survived == 0);
  REQUIRE(std::isnan(r.rows[0].dim_mean));
  std::string csv = render_dim_csv(r);
  REQUIRE(csv.find("1,100,0,0,,,,\n") != std::string::npos);
}

TEST_CASE("selftest: clean build passes every check") {
  SelfTestReport rep = run_selftest(42);
  REQUIRE(rep.checks.size() >= 10);
  for (const SelfTestCheck& c : rep.checks) {
    INFO(c.name << ": " << c.detail);
    REQUIRE(c.pass);
  }
  REQUIRE(rep.all_pass());
  std::string rendered = render_selftest(rep);
  REQUIRE(rendered.find("[PASS]") != std::string::npos);
  REQUIRE(rendered.find("all checks passed") != std::string::npos);
}

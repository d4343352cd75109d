#include "liplab/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "liplab/comparison.hpp"
#include "liplab/friedrichs.hpp"
#include "liplab/report.hpp"

namespace liplab {

namespace {

double param(const RunConfig& cfg, const std::string& key, double dflt) {
  auto it = cfg.model_params.find(key);
  return it == cfg.model_params.end() ? dflt : it->second;
}

SpacetimeModel model_from(const RunConfig& cfg) {
  std::map<std::string, double> p = cfg.model_params;
  if (!p.count("dim")) p["dim"] = 4;
  return catalog(cfg.model_name, p);
}

std::vector<double> schedule_from(const RunConfig& cfg) {
  return cfg.schedule.empty() ? default_schedule() : cfg.schedule;
}

void echo_config(TextReport& rep, const RunConfig& cfg) {
  rep.section("config");
  for (const auto& [k, v] : cfg.raw) rep.kv(k, v);
  rep.kv("seed", g17(static_cast<double>(cfg.seed)));
}

struct Outcome {
  bool pass = false;
  std::string message;
};

Outcome run_constants(const RunConfig& cfg, const std::string& out, TextReport& rep) {
  Csv csv(out + "/constants_sweep.csv", {"beta", "rho", "n", "alpha", "K_at_alpha"});
  bool ok = true;
  int rows = 0;
  double worst = 0;
  for (int nn : {3, 4})
    for (double rho : {-2.0, -1.0, 0.0, 0.5, 1.0})
      for (int ib = 0; ib < 10; ++ib) {
        double beta = -8.0 + 7.0 * ib / 9.0;
        if (rho < 0 && !(std::abs(beta) > (nn - 1) * std::sqrt(-rho))) continue;
        double alpha = const_alpha(beta, rho, nn);
        ComparisonParams p;
        p.n = nn;
        p.beta = beta;
        p.rho = rho;
        p.T = alpha;
        double K = const_K(p);
        worst = std::max(worst, std::abs(K));
        if (std::abs(K) > 1e-10) ok = false;
        csv.row({g17(beta), g17(rho), g17(nn), g17(alpha), g17(K)});
        ++rows;
      }
  // C^{A-} sweep: in (0,1], strictly decreasing in T
  Csv ca(out + "/ca_minus.csv", {"T", "value"});
  double prev = 2.0;
  for (int i = 0; i <= 40; ++i) {
    ComparisonParams p;
    p.n = 4;
    p.kappa = -1.0;
    p.eta = 0.5;
    p.T = 0.1 * i;
    double v = const_CA_minus(p);
    ca.row({g17(p.T), g17(v)});
    if (!(v > 0 && v <= 1.0 + 1e-15)) ok = false;
    if (i > 0 && !(v < prev)) ok = false;
    prev = v;
  }
  rep.section("results");
  rep.kv("rows", static_cast<double>(rows));
  rep.kv("max_K_at_alpha", worst);
  return {ok, ok ? "constants identities hold" : "constants identities violated"};
}

Outcome run_friedrichs(const RunConfig& cfg, const std::string& out, TextReport& rep) {
  int res = cfg.grid_resolution.empty() ? 3201 : cfg.grid_resolution[0];
  std::vector<double> sched = schedule_from(cfg);
  FriedrichsCase c = cfg.friedrichs_case == "two_slope"
                         ? two_slope_case(param(cfg, "m1", 0.5), param(cfg, "m2", 1.0), res, sched)
                         : kink_case(res, sched);
  NormReport nr = commutator1_sweep(c);

  Csv csv(out + "/friedrichs_norms.csv", {"epsilon", "p", "norm", "trend_flag"});
  for (size_t k = 0; k < nr.schedule.size(); ++k) {
    for (size_t ip = 0; ip < nr.p_list.size(); ++ip)
      csv.row({g17(nr.schedule[k]), g17(nr.p_list[ip]), g17(nr.lp[k][ip]),
               nr.monotone_decreasing(static_cast<int>(ip)) ? "decreasing" : "flat"});
    csv.row({g17(nr.schedule[k]), "inf", g17(nr.linf[k]),
             nr.linf_bounded() ? "bounded" : "unbounded"});
  }
  for (size_t ip = 0; ip < nr.p_list.size(); ++ip) {
    std::vector<double> ys;
    for (size_t k = 0; k < nr.schedule.size(); ++k) ys.push_back(nr.lp[k][ip]);
    write_plot(out + "/plot_p" + std::to_string(static_cast<int>(nr.p_list[ip])) + ".dat",
               nr.schedule, ys);
  }
  write_plot(out + "/plot_pinf.dat", nr.schedule, nr.linf);

  Csv km(out + "/kernel_mass.csv", {"epsilon", "mass_x", "mass_y", "bound"});
  double bound = kernel_mass_bound(c);
  double mmin = std::numeric_limits<double>::infinity(), mmax = 0;
  for (double eps : c.schedule) {
    auto [mx, my] = kernel_mass(c, eps);
    km.row({g17(eps), g17(mx), g17(my), g17(bound)});
    mmin = std::min(mmin, std::max(mx, my));
    mmax = std::max(mmax, std::max(mx, my));
  }
  bool ok = nr.final_over_initial(0) <= 0.25 && nr.final_over_initial(1) <= 0.35 &&
            nr.linf_bounded(3.0) && mmax <= mmin * 1.1 && mmax <= bound * 1.1;
  rep.section("results");
  rep.kv("L1_final_over_initial", nr.final_over_initial(0));
  rep.kv("L2_final_over_initial", nr.final_over_initial(1));
  rep.kv("Linf_median", nr.linf_median());
  rep.kv("kernel_mass_max", mmax);
  rep.kv("kernel_mass_bound", bound);
  return {ok, ok ? "friedrichs trends hold" : "friedrichs trends violated"};
}

Outcome run_ricci_commutator(const RunConfig& cfg, const std::string& out, TextReport& rep) {
  SpacetimeModel model =
      cfg.model_name == "minkowski" && cfg.model_params.empty()
          ? make_grw_two_slope(4, 0.5, 1.0)
          : model_from(cfg);
  std::vector<double> sched = schedule_from(cfg);
  const int n = model.dim;
  std::vector<std::pair<double, double>> gb = {{-0.75, 0.72}};
  std::vector<int> gr = {513};
  for (int a = 1; a < n; ++a) {
    gb.push_back({-0.6, 0.6});
    gr.push_back(3);
  }
  Grid grid = make_grid(gb, gr);
  Box audit;
  for (int a = 0; a < n; ++a) {
    audit.lo[a] = gb[a].first + 0.05;
    audit.hi[a] = gb[a].second - 0.05;
  }
  AuditConfig acfg;
  acfg.seed = cfg.seed;
  RegularizedFamily fam =
      build_family(model, sched, profile_from_name(cfg.mollifier_profile), grid, audit, acfg);
  Box K;
  for (int a = 0; a < n; ++a) {
    K.lo[a] = a == 0 ? -0.45 : -0.5;
    K.hi[a] = a == 0 ? 0.45 : 0.5;
  }
  NormReport nr = ricci_commutator(model, fam, {1, 2, 4}, K);
  Csv csv(out + "/ricci_commutator.csv", {"epsilon", "p", "norm", "trend_flag"});
  for (size_t k = 0; k < nr.schedule.size(); ++k) {
    for (size_t ip = 0; ip < nr.p_list.size(); ++ip)
      csv.row({g17(nr.schedule[k]), g17(nr.p_list[ip]), g17(nr.lp[k][ip]),
               nr.monotone_decreasing(static_cast<int>(ip)) ? "decreasing" : "flat"});
    csv.row({g17(nr.schedule[k]), "inf", g17(nr.linf[k]), "bounded"});
  }
  bool rough = model.known.ricci_delta_coeff.has_value();
  bool ok = rough ? (nr.final_over_initial(0) <= 0.25 && nr.linf_bounded(3.0))
                  : nr.lp.back()[0] <= 1e-6;
  rep.section("results");
  rep.kv("L1_final_over_initial", nr.final_over_initial(0));
  rep.kv("Linf_median", nr.linf_median());
  return {ok, ok ? "ricci commutator trends hold" : "ricci commutator trends violated"};
}

Outcome run_mean_curvature(const RunConfig& cfg, const std::string& out, TextReport& rep) {
  SpacetimeModel model = model_from(cfg);
  const int n = model.dim;
  double t0 = param(cfg, "t0", -0.5);
  HypersurfaceSpec sigma = const_slice(
      t0, std::vector<std::pair<double, double>>(n - 1, {-0.5, 0.5}), std::vector<int>(n - 1, 5));
  double h_oracle = model.known.mean_curvature_of_t ? model.known.mean_curvature_of_t(t0) : 0.0;
  double b = cfg.beta != 0 ? cfg.beta : h_oracle * (1.0 - cfg.beta_slack);
  std::vector<FlowField> fields = {coordinate_time_flow(n), [n](const Vec& x) {
                                     Vec v(n);
                                     v[0] = 1.0;
                                     v[1] = 0.3 * std::cos(x[1]);
                                     return v;
                                   }};
  MeanBoundReport mb = mean_bound_check(model.metric, sigma, b, fields);
  Csv mcsv(out + "/mean_bound.csv", {"halfwidth", "discrepancy"});
  for (size_t i = 0; i < mb.halfwidths.size(); ++i)
    mcsv.row({g17(mb.halfwidths[i]), g17(mb.discrepancy[i])});

  std::vector<double> sched = schedule_from(cfg);
  std::vector<std::pair<double, double>> gb = {{t0 - 0.5, t0 + 0.5}};
  std::vector<int> gr = {513};
  for (int a = 1; a < n; ++a) {
    gb.push_back({-0.6, 0.6});
    gr.push_back(3);
  }
  Grid grid = make_grid(gb, gr);
  Box audit;
  for (int a = 0; a < n; ++a) {
    audit.lo[a] = gb[a].first + 0.05;
    audit.hi[a] = gb[a].second - 0.05;
  }
  AuditConfig acfg;
  acfg.seed = cfg.seed;
  RegularizedFamily fam =
      build_family(model, sched, profile_from_name(cfg.mollifier_profile), grid, audit, acfg);
  MeanConvergenceReport mc = mean_curvature_convergence(model, fam, sigma);
  Csv ccsv(out + "/mean_convergence.csv", {"epsilon", "sup_diff", "esssup"});
  for (size_t k = 0; k < mc.eps.size(); ++k)
    ccsv.row({g17(mc.eps[k]), g17(mc.sup_diff[k]), g17(mc.esssup_k[k])});

  bool conv_ok = mc.sup_diff.front() < 1e-8 ||
                 (mc.decreasing && mc.final_over_initial <= 0.1);
  bool ok = mb.pass && conv_ok;
  rep.section("results");
  rep.kv("H_oracle_at_t0", h_oracle);
  rep.kv("b", b);
  rep.kv("bound_pass", mb.pass);
  rep.kv("convergence_final_over_initial", mc.final_over_initial);
  return {ok, ok ? "mean curvature checks hold" : "mean curvature checks failed"};
}

Outcome run_tau_convergence(const RunConfig& cfg, const std::string& out, TextReport& rep) {
  SpacetimeModel model = cfg.model_name == "grw_two_slope" || cfg.model_name == "minkowski"
                             ? model_from(cfg)
                             : make_grw_two_slope(4, param(cfg, "m1", 0.5), param(cfg, "m2", 1.0));
  const int n = model.dim;
  std::vector<double> sched = schedule_from(cfg);
  std::vector<std::pair<double, double>> gb = {{-1.0, 0.72}};
  std::vector<int> gr = {513};
  for (int a = 1; a < n; ++a) {
    gb.push_back({-0.8, 0.8});
    gr.push_back(3);
  }
  Grid grid = make_grid(gb, gr);
  Box audit;
  for (int a = 0; a < n; ++a) {
    audit.lo[a] = gb[a].first + 0.05;
    audit.hi[a] = gb[a].second - 0.05;
  }
  AuditConfig acfg;
  acfg.seed = cfg.seed;
  RegularizedFamily fam =
      build_family(model, sched, profile_from_name(cfg.mollifier_profile), grid, audit, acfg);
  TauChainReport tc = tau_monotonicity_check(model, fam, cfg.pairs, cfg.seed);
  Csv csv(out + "/tau_chain.csv", {"pair", "level", "epsilon", "tau"});
  for (size_t i = 0; i < tc.rows.size(); ++i) {
    for (size_t k = 0; k < tc.rows[i].tau_k.size(); ++k)
      csv.row({g17(static_cast<double>(i)), g17(static_cast<double>(k)), g17(sched[k]),
               g17(tc.rows[i].tau_k[k])});
    csv.row({g17(static_cast<double>(i)), "raw", "0", g17(tc.rows[i].tau_g)});
  }
  bool ok = tc.all_chains_ok && tc.max_final_gap_rel <= 0.02;
  rep.section("results");
  rep.kv("pairs", static_cast<double>(tc.rows.size()));
  rep.kv("all_chains_ok", tc.all_chains_ok);
  rep.kv("max_final_gap_rel", tc.max_final_gap_rel);
  return {ok, ok ? "tau chains monotone within tolerance" : "tau chain violation"};
}

Outcome run_segment(const RunConfig& cfg, const std::string& out, TextReport& rep) {
  SpacetimeModel model = model_from(cfg);
  const int n = model.dim;
  SegmentSetup s;
  s.metric = model.metric;
  double t0 = param(cfg, "t0", 0.0);
  s.sigma = const_slice(t0, std::vector<std::pair<double, double>>(n - 1, {0.0, 1.0}),
                        std::vector<int>(n - 1, 5));
  s.f = [](const Vec&) { return 1.0; };
  s.T = cfg.T;
  s.eta = cfg.eta;
  SegmentReport sr = segment_check(s);

  // closed-form Omega volume for warped products: area(B) int (a/a0)^{n-1} dt
  double omega_expected = 0;
  if (model.known.scale_a) {
    double a0 = model.known.scale_a(t0);
    int panels = 2000;
    double acc = 0;
    for (int i = 0; i <= panels; ++i) {
      double t = s.T * i / panels;
      double w = (i == 0 || i == panels) ? 0.5 : 1.0;
      acc += w * std::pow(model.known.scale_a(t0 + t) / a0, n - 1);
    }
    omega_expected = std::pow(a0, n - 1) * acc * s.T / panels;
  }
  Csv csv(out + "/segment.csv",
          {"lhs", "rhs", "slack_rel", "kappa", "ca_minus", "sigma_b", "omega", "omega_expected"});
  csv.row({g17(sr.lhs), g17(sr.rhs), g17(sr.slack_rel), g17(sr.kappa), g17(sr.ca_minus),
           g17(sr.sigma_b), g17(sr.omega_integral), g17(omega_expected)});
  bool omega_ok = omega_expected == 0 ||
                  std::abs(sr.omega_integral - omega_expected) <= 0.01 * omega_expected;
  bool ok = sr.pass && sr.precondition_ok && omega_ok;
  rep.section("results");
  rep.kv("lhs", sr.lhs);
  rep.kv("rhs", sr.rhs);
  rep.kv("slack_rel", sr.slack_rel);
  rep.kv("omega_measured", sr.omega_integral);
  rep.kv("omega_expected", omega_expected);
  rep.kv("near_cut_points", static_cast<double>(sr.near_cut.size()));
  return {ok, ok ? "segment inequality holds with slack" : "segment inequality failed: " + sr.note};
}

Outcome run_hawking(const RunConfig& cfg, const std::string& out, TextReport& rep) {
  HawkingSetup s;
  s.model = model_from(cfg);
  s.t0 = param(cfg, "t0", -0.5);
  s.beta = cfg.beta;
  s.beta_slack = cfg.beta_slack;
  s.rho = cfg.rho;
  s.schedule = schedule_from(cfg);
  s.profile = profile_from_name(cfg.mollifier_profile);
  s.seed = cfg.seed;
  const int n = s.model.dim;
  s.patch_bounds.assign(n - 1, {-0.5, 0.5});
  s.patch_res.assign(n - 1, 3);
  HawkingReport hr = hawking_experiment(s);

  Csv fcsv(out + "/curvature_floors.csv", {"epsilon", "floor", "negpart_l1", "lambda_inner"});
  for (size_t k = 0; k < hr.schedule.size(); ++k)
    fcsv.row({g17(hr.schedule[k]),
              g17(k < hr.curvature_floor.size() ? hr.curvature_floor[k] : 0),
              g17(k < hr.negpart_l1.size() ? hr.negpart_l1[k] : 0),
              g17(k < hr.lambda_inner.size() ? hr.lambda_inner[k] : 0)});
  Csv tcsv(out + "/tau_probes.csv", {"t", "tau_sigma"});
  for (size_t i = 0; i < hr.probe_t.size(); ++i)
    tcsv.row({g17(hr.probe_t[i]), g17(hr.tau_sigma_probe[i])});
  Csv mcsv(out + "/mean_convergence.csv", {"epsilon", "sup_diff", "esssup"});
  for (size_t k = 0; k < hr.mean_conv.eps.size(); ++k)
    mcsv.row({g17(hr.mean_conv.eps[k]), g17(hr.mean_conv.sup_diff[k]),
              g17(hr.mean_conv.esssup_k[k])});

  rep.section("results");
  rep.kv("preconditions_ok", hr.preconditions_ok);
  rep.kv("beta", hr.beta);
  rep.kv("alpha", hr.alpha);
  rep.kv("H_oracle", hr.h_oracle);
  rep.kv("delta_coeff_min", hr.delta_coeff_min);
  rep.kv("sup_tau_sigma", hr.sup_tau_sigma);
  rep.kv("oracle_sup_tau", hr.oracle_sup_tau);
  rep.kv("saturation_expected", hr.saturation_expected);
  rep.kv("saturated", hr.saturated);
  rep.kv("note", hr.note.empty() ? "-" : hr.note);
  return {hr.verdict, hr.verdict ? "hawking bound verified" : "hawking verdict FAIL: " + hr.note};
}

Outcome run_geodesic(const RunConfig& cfg, const std::string& out, TextReport& rep) {
  SpacetimeModel model = model_from(cfg);
  const int n = model.dim;
  double t0 = param(cfg, "t0", -0.5);
  Vec x0(n);
  x0[0] = t0;
  Vec v0(n);
  v0[0] = 1.0;
  GeodesicOptions opts;
  GeodesicResult res = geodesic(model.metric, x0, v0, cfg.T, opts);
  std::vector<std::string> cols = {"param"};
  for (int a = 0; a < n; ++a) cols.push_back("x" + std::to_string(a));
  Csv csv(out + "/geodesic.csv", cols);
  double worst = 0;
  for (size_t i = 0; i < res.params.size(); ++i) {
    std::vector<std::string> row = {g17(res.params[i])};
    for (int a = 0; a < n; ++a) row.push_back(g17(res.points[i][a]));
    csv.row(row);
    double q = qform(model.metric.g_at(res.points[i]), res.velocities[i]);
    worst = std::max(worst, std::abs(q + 1.0));
  }
  bool ok = worst <= 1e-6;
  rep.section("results");
  rep.kv("status", res.status == GeodesicStatus::reached_T
                       ? "reached_T"
                       : res.status == GeodesicStatus::left_domain ? "left_domain"
                                                                   : "hit_singularity");
  rep.kv("length", res.length);
  rep.kv("max_energy_drift", worst);
  return {ok, ok ? "geodesic energy conserved" : "geodesic energy drift above tolerance"};
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  RunResult rr;
  auto diags = validate(cfg);
  if (!diags.empty()) {
    rr.exit_code = 2;
    rr.message = "config invalid: " + diags.front();
    return rr;
  }
  ensure_dir(cfg.output_dir);
  TextReport rep;
  rep.section("liplab report");
  rep.kv("version", version_string());
  rep.kv("experiment", cfg.experiment);
  echo_config(rep, cfg);

  auto t0 = std::chrono::steady_clock::now();
  Outcome oc;
  try {
    if (cfg.experiment == "constants") oc = run_constants(cfg, cfg.output_dir, rep);
    else if (cfg.experiment == "friedrichs_sweep") oc = run_friedrichs(cfg, cfg.output_dir, rep);
    else if (cfg.experiment == "ricci_commutator")
      oc = run_ricci_commutator(cfg, cfg.output_dir, rep);
    else if (cfg.experiment == "mean_curvature") oc = run_mean_curvature(cfg, cfg.output_dir, rep);
    else if (cfg.experiment == "tau_convergence")
      oc = run_tau_convergence(cfg, cfg.output_dir, rep);
    else if (cfg.experiment == "segment") oc = run_segment(cfg, cfg.output_dir, rep);
    else if (cfg.experiment == "hawking") oc = run_hawking(cfg, cfg.output_dir, rep);
    else if (cfg.experiment == "geodesic") oc = run_geodesic(cfg, cfg.output_dir, rep);
    else {
      rr.exit_code = 2;
      rr.message = "unknown experiment " + cfg.experiment;
      return rr;
    }
  } catch (const Error& e) {
    oc.pass = false;
    oc.message = std::string("error: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.section("verdict");
  rep.kv("pass", oc.pass);
  rep.kv("message", oc.message);
  rep.kv("runtime_s", secs);
  rr.report_path = cfg.output_dir + "/report.txt";
  rep.save(rr.report_path);
  rr.pass = oc.pass;
  rr.exit_code = oc.pass ? 0 : 1;
  rr.message = oc.message;
  return rr;
}

std::string catalog_listing() {
  return "minkowski            dim in [2,4]    flat space, tau closed form\n"
         "grw_smooth           dim, kind in {cosh, exp, linear(a0, slope)}\n"
         "grw_eds_collapse     dim in [3,4], ts  collapsing a=(ts-t)^(2/3), SEC rho=0\n"
         "grw_two_slope        dim, 0 < m1 <= m2  Lipschitz kink at t=0, singular at 1/m2\n"
         "pp_impulsive_rosen   dim 4 fixed      impulsive wave, Lipschitz, Ricci-flat a.e.\n";
}

std::string summarize_reports(const std::string& dir) {
  std::string out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.path().filename() != "report.txt") continue;
    std::ifstream is(entry.path());
    std::string line, experiment, pass, message;
    while (std::getline(is, line)) {
      auto grab = [&](const std::string& key, std::string* dst) {
        auto pos = line.find(key + " = ");
        if (pos != std::string::npos) *dst = line.substr(pos + key.size() + 3);
      };
      grab("experiment", &experiment);
      grab("pass", &pass);
      grab("message", &message);
    }
    out += entry.path().string() + ": " + experiment + " " +
           (pass == "true" ? "PASS" : "FAIL") + " (" + message + ")\n";
  }
  if (out.empty()) out = "no report.txt found under " + dir + "\n";
  return out;
}

}  // namespace liplab

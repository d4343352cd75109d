#include "liplab/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liplab {

double const_CA_minus(const ComparisonParams& p) {
  if (!(p.kappa < 0)) throw Error("const_CA_minus: kappa must be negative");
  if (!(p.eta > 0)) throw Error("const_CA_minus: eta must be positive");
  if (p.T < 0) throw Error("const_CA_minus: T must be >= 0");
  double sk = std::sqrt(std::abs(p.kappa));
  return std::pow(std::sinh(p.eta * sk) / std::sinh((p.T + p.eta) * sk), p.n - 1);
}

double const_K(const ComparisonParams& p) {
  if (!(p.T > 0)) throw Error("const_K: T must be positive");
  double ab = std::abs(p.beta);
  if (p.rho == 0) return ab - (p.n - 1) / p.T;
  if (p.rho < 0) {
    double s = std::sqrt(-p.rho);
    return ab - (p.n - 1) * s / std::tanh(s * p.T);
  }
  double s = std::sqrt(p.rho);
  if (s * p.T > M_PI / 2 + 1e-15)
    throw Error("const_K: sqrt(rho) T must be <= pi/2 for rho > 0");
  return ab - (p.n - 1) * s / std::tan(s * p.T);
}

double const_alpha(double beta, double rho, int n) {
  if (!(beta < 0)) throw Error("const_alpha: beta must be negative");
  double ab = std::abs(beta);
  if (rho == 0) return (n - 1) / ab;
  if (rho < 0) {
    double s = std::sqrt(-rho);
    double arg = ab / ((n - 1) * s);
    if (!(arg > 1))
      throw Error("const_alpha: rho<0 requires |beta| > (n-1) sqrt|rho|");
    return std::atanh(1.0 / arg) / s;  // coth^-1(y) = atanh(1/y) for y > 1
  }
  double s = std::sqrt(rho);
  double alpha = (M_PI / 2 - std::atan(ab / ((n - 1) * s))) / s;  // cot^-1
  if (!(alpha < M_PI / (2 * s) + 1e-12))
    throw Error("const_alpha: rho>0 result out of the cot^-1 principal range");
  return alpha;
}

double index_form(const IndexFormInput& input, const ComparisonParams& p,
                  const std::function<double(double)>& ricci_profile) {
  std::function<double(double)> h, hdot;
  const double T = p.T;
  switch (input.kind) {
    case IndexFormInput::H::affine:
      h = [T](double t) { return 1.0 - t / T; };
      hdot = [T](double) { return -1.0 / T; };
      break;
    case IndexFormInput::H::sinh_h: {
      if (!(p.rho < 0)) throw Error("index_form: sinh choice needs rho < 0");
      double s = std::sqrt(-p.rho);
      h = [s, T](double t) { return std::sinh(s * (T - t)) / std::sinh(s * T); };
      hdot = [s, T](double t) { return -s * std::cosh(s * (T - t)) / std::sinh(s * T); };
      break;
    }
    case IndexFormInput::H::sin_h: {
      if (!(p.rho > 0)) throw Error("index_form: sin choice needs rho > 0");
      double s = std::sqrt(p.rho);
      if (s * T > M_PI / 2 + 1e-15) throw Error("index_form: sqrt(rho) T must be <= pi/2");
      h = [s, T](double t) { return std::sin(s * (T - t)) / std::sin(s * T); };
      hdot = [s, T](double t) { return -s * std::cos(s * (T - t)) / std::sin(s * T); };
      break;
    }
    case IndexFormInput::H::custom: {
      if (!input.h || !input.hdot) throw Error("index_form: custom h needs h and hdot");
      h = input.h;
      hdot = input.hdot;
      if (std::abs(h(0.0) - 1.0) > 1e-9 || std::abs(h(T)) > 1e-9)
        throw Error("index_form: custom h must satisfy h(0)=1, h(T)=0");
      for (int i = 0; i <= 256; ++i)
        if (std::abs(h(T * i / 256.0)) > 1.0 + 1e-9)
          throw Error("index_form: custom h must satisfy |h| <= 1");
      break;
    }
  }
  // composite Simpson
  int panels = input.panels + (input.panels % 2);
  double dt = T / panels;
  auto integrand = [&](double t) {
    double hd = hdot(t), hv = h(t);
    return -(p.n - 1) * hd * hd + hv * hv * ricci_profile(t);
  };
  double acc = integrand(0.0) + integrand(T);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(i * dt);
  double integral = acc * dt / 3.0;
  return std::abs(p.beta) + integral - const_K(p);
}

SegmentReport segment_check(const SegmentSetup& s) {
  SegmentReport rep;
  const MetricField& g = s.metric;
  const int n = g.dim;

  NormalCongruence cong = normal_congruence(g, s.sigma, s.T + s.eta, s.tsteps);
  const Grid& bg = cong.base_grid;

  // Reg_eta^+(T) audit: the normal geodesic still maximizes at T + eta
  rep.precondition_ok = true;
  double tau_tol = 0.005;
  for_each_index(bg, IndexBox::full(bg), [&](const std::array<int, kMaxDim>& idx) {
    if (!rep.precondition_ok) return;
    std::int64_t fp = bg.flat(idx);
    if (!cong.alive[fp][s.tsteps]) {
      rep.precondition_ok = false;
      rep.note = "normal geodesic leaves the domain before T+eta";
      return;
    }
    Vec xs(n - 1);
    for (int a = 0; a < n - 1; ++a) xs[a] = bg.coord(a, idx[a]);
    Vec p = cong.pos[fp][s.tsteps];
    TauEstimate est = tau_sigma(g, s.sigma, p, s.tau_cfg);
    double target = s.T + s.eta;
    if (est.value > target * (1.0 + tau_tol)) {
      rep.precondition_ok = false;
      rep.note = "base point fails the Reg_eta^+(T) audit";
      rep.near_cut.push_back(xs);
      return;
    }
    if (est.value > target * (1.0 - 2 * tau_tol)) {
      // maximizing but close to the audit band edge: flag as near-cut
      if (est.value > target) rep.near_cut.push_back(xs);
    }
  });
  if (!rep.precondition_ok) return rep;

  // kappa from the measured curvature floor minus a 10% margin (cap at -0.01)
  std::vector<Vec> floor_pts;
  for_each_index(bg, IndexBox::full(bg), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = bg.flat(idx);
    for (int it = 0; it <= s.tsteps; it += std::max(1, s.tsteps / 8))
      if (cong.alive[fp][it]) floor_pts.push_back(cong.pos[fp][it]);
  });
  rep.ricci_floor = ricci_timelike_min(g, floor_pts, s.ricci_cfg);
  double floor_over_n = rep.ricci_floor / n;
  rep.kappa = std::min(std::min(floor_over_n, 0.0) * 1.1 - 0.01, -0.01);

  ComparisonParams cp;
  cp.n = n;
  cp.kappa = rep.kappa;
  cp.eta = s.eta;
  cp.T = s.T;
  cp.beta = -1;  // unused by CA-
  rep.ca_minus = const_CA_minus(cp);
  rep.sigma_b = sigma_area(cong);

  // LHS: inf over the patch of the line integral of f up to T
  double dt = (s.T + s.eta) / s.tsteps;
  int itT = static_cast<int>(std::floor(s.T / dt));
  rep.lhs = std::numeric_limits<double>::infinity();
  for_each_index(bg, IndexBox::full(bg), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = bg.flat(idx);
    double acc = 0;
    for (int it = 0; it < itT; ++it) {
      double f0 = s.f(cong.pos[fp][it]), f1 = s.f(cong.pos[fp][it + 1]);
      acc += 0.5 * (f0 + f1) * dt;
    }
    double trem = s.T - itT * dt;
    if (trem > 0 && cong.alive[fp][itT]) acc += s.f(cong.pos[fp][itT]) * trem;
    rep.lhs = std::min(rep.lhs, acc);
  });

  // RHS: (1/(CA- sigma(B))) int_Omega f dvol
  double cellvol = 1;
  for (int a = 0; a < bg.dim; ++a) cellvol *= bg.spacing(a);
  double omega = 0;
  for_each_index(bg, IndexBox::full(bg), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = bg.flat(idx);
    double w = 1;
    for (int a = 0; a < bg.dim; ++a)
      w *= (idx[a] == 0 || idx[a] == bg.res[a] - 1) ? 0.5 : 1.0;
    double line = 0;
    for (int it = 0; it < itT; ++it) {
      double v0 = s.f(cong.pos[fp][it]) * cong.area[fp][it];
      double v1 = s.f(cong.pos[fp][it + 1]) * cong.area[fp][it + 1];
      line += 0.5 * (v0 + v1) * dt;
    }
    double trem = s.T - itT * dt;
    if (trem > 0 && cong.alive[fp][itT])
      line += s.f(cong.pos[fp][itT]) * cong.area[fp][itT] * trem;
    omega += w * cong.sigma_density[fp] * line;
  });
  rep.omega_integral = omega * cellvol;
  rep.rhs = rep.omega_integral / (rep.ca_minus * rep.sigma_b);

  rep.pass = rep.lhs <= rep.rhs * (1.0 + s.tol);
  rep.slack_rel = rep.rhs > 0 ? (rep.rhs - rep.lhs) / rep.rhs : (rep.lhs <= 0 ? 0.0 : -1.0);
  if (rep.rhs == 0 && rep.lhs <= 0) rep.pass = true;  // degenerate 0 <= 0
  return rep;
}

HawkingReport hawking_experiment(const HawkingSetup& s) {
  HawkingReport rep;
  rep.seed = s.seed;
  rep.schedule = s.schedule;
  const SpacetimeModel& model = s.model;
  const int n = model.dim;

  // --- preconditions: certified distributional SEC and the slab mean bound ---
  if (!model.known.sec_rho || *model.known.sec_rho != s.rho) {
    rep.note = "model carries no SEC certificate for the requested rho";
    return rep;
  }
  // smooth-part scan of the certified regular Ricci over audited unit timelike
  // directions along Sigma..singular locus (quadratic-form route)
  double tsing = model.known.singularity_time ? *model.known.singularity_time
                                              : s.t0 + 2.0;
  double scan_hi = model.known.singularity_time ? tsing - 0.05 * (tsing - s.t0) : s.t0 + 1.0;
  RicciMinConfig rmc;
  rmc.unit_bound = s.unit_bound;
  double sec_min = std::numeric_limits<double>::infinity();
  if (model.known.ricci_regular) {
    for (int i = 0; i <= 40; ++i) {
      double t = s.t0 + (scan_hi - s.t0) * i / 40.0;
      if (model.metric.kink && std::abs(t - model.metric.kink->value) < 1e-9) continue;
      Vec x(n);
      x[0] = t;
      Mat ric = model.known.ricci_regular->g(x);
      Mat gm = model.metric.g_at(x);
      Vec T = model.metric.time_orientation(x);
      double m = ricci_quadratic_min(ric, gm, T, rmc);
      // SEC with shift: Ric(X,X) >= -(n-1) rho g(X,X) = (n-1) rho on unit X
      sec_min = std::min(sec_min, m - (n - 1) * s.rho * (-1.0));
    }
    if (sec_min < -1e-10) {
      rep.note = "certified regular Ricci violates the distributional SEC scan";
      return rep;
    }
  }
  // delta part: min audited contraction on unit timelike vectors at the kink
  rep.delta_coeff_min = 0;
  if (model.known.ricci_delta_coeff && model.metric.kink) {
    Vec x(n);
    x[0] = model.metric.kink->value;
    Mat gm = model.metric.g_at(x);
    Vec T = model.metric.time_orientation(x);
    rep.delta_coeff_min = ricci_quadratic_min(*model.known.ricci_delta_coeff, gm, T, rmc);
    if (rep.delta_coeff_min < -1e-10) {
      rep.note = "kink delta part fails the SEC sign audit";
      return rep;
    }
  }

  rep.h_oracle = model.known.mean_curvature_of_t ? model.known.mean_curvature_of_t(s.t0) : 0.0;
  rep.beta = s.beta != 0 ? s.beta : rep.h_oracle * (1.0 - s.beta_slack);
  if (!(rep.beta < 0)) {
    rep.note = "beta must be negative (Sigma not contracting?)";
    return rep;
  }
  HypersurfaceSpec sigma = const_slice(s.t0, s.patch_bounds, s.patch_res);
  std::vector<FlowField> fields = {coordinate_time_flow(n), [n](const Vec&) {
                                     Vec v(n);
                                     v[0] = 1.0;
                                     v[1] = 0.3;
                                     return v;
                                   }};
  MeanBoundReport mb = mean_bound_check(model.metric, sigma, rep.beta, fields);
  if (!mb.pass) {
    rep.note = "slab mean curvature check fails for beta";
    return rep;
  }
  rep.preconditions_ok = true;
  rep.alpha = const_alpha(rep.beta, s.rho, n);

  // --- family + per-eps diagnostics ---
  double grid_lo = s.t0 - 1.2 * s.schedule.front();
  double grid_hi = std::min(scan_hi, tsing - 0.02);
  std::vector<std::pair<double, double>> gb = {{grid_lo - 0.3, grid_hi + 0.02}};
  std::vector<int> gr = {513};
  for (int a = 1; a < n; ++a) {
    gb.push_back({-0.6, 0.6});
    gr.push_back(3);
  }
  Grid fam_grid = make_grid(gb, gr);
  Box audit;
  for (int a = 0; a < n; ++a) {
    audit.lo[a] = gb[a].first + 0.05;
    audit.hi[a] = gb[a].second - 0.05;
  }
  AuditConfig acfg;
  acfg.seed = s.seed;
  RegularizedFamily fam = build_family(model, s.schedule, s.profile, fam_grid, audit, acfg);
  rep.lambda_inner = fam.lambda_inner;

  // congruence region: comoving band above Sigma, probed on a t-lattice
  for (size_t k = 0; k < s.schedule.size(); ++k) {
    const MetricField& gk = fam.inner[k];
    std::vector<Vec> pts;
    for (int i = 0; i < s.floor_samples; ++i) {
      Vec x(n);
      x[0] = s.t0 + (grid_hi - s.t0) * i / (s.floor_samples - 1);
      pts.push_back(x);
    }
    rep.curvature_floor.push_back(ricci_timelike_min(gk, pts, rmc));

    // Lemma 5.7: L1 of (Ric[g_k](U,U) - (n-1) rho)_- over Omega
    NormalCongruence cong = normal_congruence(gk, sigma, grid_hi - s.t0, 96);
    const Grid& bg = cong.base_grid;
    double dt = (grid_hi - s.t0) / 96.0;
    double cellvol = 1;
    for (int a = 0; a < bg.dim; ++a) cellvol *= bg.spacing(a);
    double acc = 0;
    for_each_index(bg, IndexBox::full(bg), [&](const std::array<int, kMaxDim>& idx) {
      std::int64_t fp = bg.flat(idx);
      double w = 1;
      for (int a = 0; a < bg.dim; ++a)
        w *= (idx[a] == 0 || idx[a] == bg.res[a] - 1) ? 0.5 : 1.0;
      double line = 0;
      for (int it = 0; it <= 96; ++it) {
        if (!cong.alive[fp][it]) break;
        const Vec& x = cong.pos[fp][it];
        const Vec& uu = cong.vel[fp][it];
        double val = qform(ricci_at(gk, x), uu) - (n - 1) * s.rho;
        double neg = val < 0 ? -val : 0.0;
        double tw = (it == 0 || it == 96) ? 0.5 : 1.0;
        line += tw * neg * cong.area[fp][it] * dt;
      }
      acc += w * cong.sigma_density[fp] * line;
    });
    rep.negpart_l1.push_back(acc * cellvol);
  }

  rep.mean_conv = mean_curvature_convergence(model, fam, sigma, 0.08);

  // --- tau_Sigma probes approaching the singular locus ---
  rep.oracle_sup_tau = model.known.singularity_time ? (tsing - s.t0) : 0.0;
  double probe_hi = tsing - 0.03 * (tsing - s.t0);
  double probe_lo = s.t0 + 0.5 * (tsing - s.t0);
  TauSearchConfig tcfg;
  tcfg.seed = s.seed;
  for (int i = 0; i < s.probes; ++i) {
    double tp = probe_lo + (probe_hi - probe_lo) * i / std::max(1, s.probes - 1);
    Vec p(n);
    p[0] = tp;
    TauEstimate est = tau_sigma(model.metric, sigma, p, tcfg);
    rep.probe_t.push_back(tp);
    rep.tau_sigma_probe.push_back(est.value);
    rep.sup_tau_sigma = std::max(rep.sup_tau_sigma, est.value);
  }

  // --- verdict ---
  bool tau_bounded = true;
  for (double v : rep.tau_sigma_probe)
    if (v > rep.alpha * 1.02) tau_bounded = false;
  bool floors_ok = !rep.curvature_floor.empty() && rep.curvature_floor.back() >= -0.05;
  bool floors_trend = true;
  for (size_t k = 0; k + 1 < rep.curvature_floor.size(); ++k)
    if (std::min(rep.curvature_floor[k + 1], 0.0) <
        std::min(rep.curvature_floor[k], 0.0) * 1.05 - 1e-12)
      floors_trend = false;
  bool negpart_trend = rep.negpart_l1.empty() ||
                       rep.negpart_l1.back() <= rep.negpart_l1.front() * 0.5 + 1e-12;
  rep.saturation_expected = rep.oracle_sup_tau >= 0.95 * rep.alpha;
  rep.saturated = rep.sup_tau_sigma >= 0.95 * rep.alpha;
  bool satur_ok = !rep.saturation_expected || rep.saturated;
  rep.verdict = rep.preconditions_ok && tau_bounded && floors_ok && floors_trend &&
                negpart_trend && rep.mean_conv.decreasing && satur_ok;
  if (!rep.verdict && rep.note.empty()) {
    rep.note = std::string("failed: ") + (!tau_bounded ? "tau bound; " : "") +
               (!floors_ok ? "floor level; " : "") + (!floors_trend ? "floor trend; " : "") +
               (!negpart_trend ? "negpart trend; " : "") +
               (!rep.mean_conv.decreasing ? "mean curvature transfer; " : "") +
               (!satur_ok ? "saturation; " : "");
  }
  return rep;
}

}  // namespace liplab

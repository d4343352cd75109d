#include "liplab/causal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "liplab/curvature.hpp"

namespace liplab {

namespace {

const double kGx3[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
const double kGw3[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// quadrature sub-ranges of [0,1] split at a kink crossing
int segment_ranges(const MetricField& g, const Vec& a, const Vec& b, double* cuts) {
  cuts[0] = 0.0;
  cuts[1] = 1.0;
  if (g.kink) {
    double ka = a[g.kink->axis] - g.kink->value;
    double kb = b[g.kink->axis] - g.kink->value;
    if ((ka < 0.0) != (kb < 0.0)) {
      double sc = ka / (ka - kb);
      if (sc > 1e-14 && sc < 1.0 - 1e-14) {
        cuts[1] = sc;
        cuts[2] = 1.0;
        return 2;
      }
    }
  }
  return 1;
}

double segment_len(const MetricField& g, const Vec& a, const Vec& b) {
  Vec d = b - a;
  double cuts[3];
  int nr = segment_ranges(g, a, b, cuts);
  double acc = 0;
  for (int r = 0; r < nr; ++r) {
    double mid = 0.5 * (cuts[r] + cuts[r + 1]), half = 0.5 * (cuts[r + 1] - cuts[r]);
    double s = 0;
    for (int i = 0; i < 3; ++i) {
      Vec x = a + (mid + half * kGx3[i]) * d;
      double q = qform(g.g_at(x), d);
      s += kGw3[i] * std::sqrt(std::max(0.0, -q));
    }
    acc += s * half;
  }
  return acc;
}

}  // namespace

double path_length(const MetricField& g, const std::vector<Vec>& nodes) {
  double acc = 0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) acc += segment_len(g, nodes[i], nodes[i + 1]);
  return acc;
}

bool segment_causal(const MetricField& g, const Vec& a, const Vec& b, double margin,
                    double* min_char) {
  Vec d = b - a;
  double dd = dot_euclid(d, d);
  if (dd == 0) return false;
  double cuts[3];
  int nr = segment_ranges(g, a, b, cuts);
  double mc = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (int r = 0; r < nr && ok; ++r) {
    double mid = 0.5 * (cuts[r] + cuts[r + 1]), half = 0.5 * (cuts[r + 1] - cuts[r]);
    for (int i = 0; i < 3; ++i) {
      Vec x = a + (mid + half * kGx3[i]) * d;
      Mat gm = g.g_at(x);
      double q = qform(gm, d);
      mc = std::min(mc, -q / dd);
      if (q > -margin * dd) ok = false;
      Vec T = g.time_orientation ? g.time_orientation(x) : Vec(g.dim);
      if (norm_euclid(T) == 0) T[0] = 1.0, T.n = g.dim;
      if (qform(gm, d, T) >= 0) ok = false;
    }
  }
  if (min_char) *min_char = mc;
  return ok;
}

// ---- geodesics ----

namespace {

struct GeoState {
  Vec x, v;
};

GeoState rk4_step(const MetricField& g, const GeoState& y, double h, int side) {
  auto rhs = [&](const GeoState& s) {
    Ten3 gam = christoffel_at(g, s.x, side);
    GeoState d;
    d.x = s.v;
    d.v = Vec(g.dim);
    for (int i = 0; i < g.dim; ++i) {
      double acc = 0;
      for (int j = 0; j < g.dim; ++j)
        for (int k = 0; k < g.dim; ++k) acc += gam(i, j, k) * s.v[j] * s.v[k];
      d.v[i] = -acc;
    }
    return d;
  };
  GeoState k1 = rhs(y);
  GeoState y2{y.x + (0.5 * h) * k1.x, y.v + (0.5 * h) * k1.v};
  GeoState k2 = rhs(y2);
  GeoState y3{y.x + (0.5 * h) * k2.x, y.v + (0.5 * h) * k2.v};
  GeoState k3 = rhs(y3);
  GeoState y4{y.x + h * k3.x, y.v + h * k3.v};
  GeoState k4 = rhs(y4);
  GeoState out;
  out.x = y.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  out.v = y.v + (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
  return out;
}

bool in_box(const Box& b, const Vec& x) {
  for (int a = 0; a < x.n; ++a)
    if (x[a] < b.lo[a] || x[a] > b.hi[a]) return false;
  return true;
}

}  // namespace

GeodesicResult geodesic(const MetricField& g, const Vec& x0, const Vec& v0, double T,
                        const GeodesicOptions& opts) {
  if (norm_euclid(v0) == 0) throw Error("geodesic: zero initial velocity");
  GeodesicResult res;
  res.metric_tag = g.name;
  GeoState y{x0, v0};
  if (opts.normalize_unit) {
    double q = qform(g.g_at(x0), v0);
    if (q < 0) {
      y.v = (1.0 / std::sqrt(-q)) * v0;
      res.unit_speed = true;
    }
  }
  int side = 1;
  if (g.kink) {
    double d0 = x0[g.kink->axis] - g.kink->value;
    side = d0 < 0 ? -1 : 1;
  }
  double s = 0;
  res.params.push_back(0);
  res.points.push_back(y.x);
  res.velocities.push_back(y.v);
  int steps = 0;
  while (s < T && steps++ < opts.max_steps) {
    double h = std::min(opts.step, T - s);
    GeoState next = rk4_step(g, y, h, side);
    if (g.kink) {
      double cur = y.x[g.kink->axis] - g.kink->value;
      double nxt = next.x[g.kink->axis] - g.kink->value;
      if (cur != 0.0 && (cur < 0) != (nxt < 0)) {
        // bisection on the step length: land on the kink to 1e-10
        double lo = 0, hi = h;
        GeoState hit = next;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          GeoState trial = rk4_step(g, y, mid, side);
          double val = trial.x[g.kink->axis] - g.kink->value;
          if ((cur < 0) == (val < 0))
            lo = mid;
          else
            hi = mid;
          hit = trial;
          if (std::abs(val) < 1e-10) {
            hi = mid;
            break;
          }
        }
        next = rk4_step(g, y, hi, side);
        next.x[g.kink->axis] = g.kink->value;  // snap; position+velocity continue
        h = hi;
        side = -side;
      }
    }
    y = next;
    s += h;
    res.params.push_back(s);
    res.points.push_back(y.x);
    res.velocities.push_back(y.v);
    if (opts.domain && !in_box(*opts.domain, y.x)) {
      res.status = GeodesicStatus::left_domain;
      res.length = s;
      return res;
    }
    if (g.singular_guard && g.singular_guard(y.x) < opts.singular_floor) {
      res.status = GeodesicStatus::hit_singularity;
      res.length = s;
      return res;
    }
  }
  res.status = GeodesicStatus::reached_T;
  res.length = s;
  return res;
}

Vec sigma_unit_normal(const MetricField& g, const HypersurfaceSpec& sigma, const Vec& xs) {
  const int n = g.dim;
  Vec grad(n - 1);
  if (sigma.dphi) {
    grad = sigma.dphi(xs);
  } else {
    const double h = 1e-6;
    for (int i = 0; i < n - 1; ++i) {
      Vec xp = xs, xm = xs;
      xp[i] += h;
      xm[i] -= h;
      grad[i] = (sigma.phi(xp) - sigma.phi(xm)) / (2 * h);
    }
  }
  Vec p(n);
  p[0] = sigma.phi(xs);
  for (int a = 1; a < n; ++a) p[a] = xs[a - 1];
  std::vector<Vec> frame(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    Vec t(n);
    t[0] = grad[i];
    t[i + 1] = 1.0;
    frame[i] = t;
  }
  return future_unit_normal(g, p, frame, 0);
}

Vec normal_exponential(const MetricField& g, const HypersurfaceSpec& sigma, const Vec& xs,
                       double t, const GeodesicOptions& opts) {
  if (t < 0) throw Error("normal_exponential: t must be >= 0");
  const int n = g.dim;
  Vec p(n);
  p[0] = sigma.phi(xs);
  for (int a = 1; a < n; ++a) p[a] = xs[a - 1];
  if (t == 0) return p;
  Vec N = sigma_unit_normal(g, sigma, xs);
  GeodesicResult res = geodesic(g, p, N, t, opts);
  if (res.status != GeodesicStatus::reached_T)
    throw Error("normal_exponential: geodesic left the domain before t");
  return res.points.back();
}

// ---- tau search ----

namespace {

std::vector<Vec> resample_polyline(const std::vector<Vec>& nodes, int segments) {
  std::vector<double> cum{0};
  for (size_t i = 0; i + 1 < nodes.size(); ++i)
    cum.push_back(cum.back() + norm_euclid(nodes[i + 1] - nodes[i]));
  double total = cum.back();
  std::vector<Vec> out;
  for (int k = 0; k <= segments; ++k) {
    double target = total * k / segments;
    size_t i = 0;
    while (i + 2 < cum.size() && cum[i + 1] < target) ++i;
    double denom = cum[i + 1] - cum[i];
    double f = denom > 0 ? (target - cum[i]) / denom : 0.0;
    out.push_back(nodes[i] + f * (nodes[i + 1] - nodes[i]));
  }
  out.front() = nodes.front();
  out.back() = nodes.back();
  return out;
}

struct Optimizer {
  const MetricField& g;
  const TauSearchConfig& cfg;
  std::vector<Vec> nodes;
  std::vector<double> seglen;
  double total = 0;

  Optimizer(const MetricField& gm, const TauSearchConfig& c) : g(gm), cfg(c) {}

  void set_nodes(std::vector<Vec> ns) {
    nodes = std::move(ns);
    seglen.assign(nodes.size() - 1, 0.0);
    total = 0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
      seglen[i] = segment_len(g, nodes[i], nodes[i + 1]);
      total += seglen[i];
    }
  }

  bool move_ok(size_t i, const Vec& candidate) const {
    if (i > 0 && !segment_causal(g, nodes[i - 1], candidate, cfg.causal_margin)) return false;
    if (i + 1 < nodes.size() && !segment_causal(g, candidate, nodes[i + 1], cfg.causal_margin))
      return false;
    return true;
  }

  // returns the new total if the candidate improves, else -inf
  double try_move(size_t i, const Vec& candidate) {
    double old_part = (i > 0 ? seglen[i - 1] : 0.0) + (i + 1 < nodes.size() ? seglen[i] : 0.0);
    double nl = i > 0 ? segment_len(g, nodes[i - 1], candidate) : 0.0;
    double nr = i + 1 < nodes.size() ? segment_len(g, candidate, nodes[i + 1]) : 0.0;
    double gain = nl + nr - old_part;
    if (gain <= 0) return -std::numeric_limits<double>::infinity();
    if (!move_ok(i, candidate)) return -std::numeric_limits<double>::infinity();
    nodes[i] = candidate;
    if (i > 0) seglen[i - 1] = nl;
    if (i + 1 < nodes.size()) seglen[i] = nr;
    total += gain;
    return total;
  }

  // one ascent sweep; returns true if anything improved
  bool sweep(const std::array<double, kMaxDim>& scale, double step) {
    bool improved = false;
    const int n = g.dim;
    size_t first = cfg.base_on_sigma ? 0 : 1;
    for (size_t i = first; i + 1 < nodes.size(); ++i) {
      if (i == 0) {
        // base node slides along Sigma: spatial moves, t follows the graph
        for (int a = 1; a < n; ++a)
          for (double sgn : {1.0, -1.0}) {
            Vec cand = nodes[0];
            cand[a] += sgn * step * scale[a];
            Vec xs(n - 1);
            for (int b = 1; b < n; ++b) xs[b - 1] = cand[b];
            cand[0] = cfg.sigma->phi(xs);
            if (try_move(0, cand) > 0) improved = true;
          }
        continue;
      }
      for (int a = 0; a < n; ++a)
        for (double sgn : {1.0, -1.0}) {
          Vec cand = nodes[i];
          cand[a] += sgn * step * scale[a];
          if (try_move(i, cand) > 0) improved = true;
        }
    }
    return improved;
  }
};

}  // namespace

TauEstimate tau(const MetricField& g, const Vec& p, const Vec& q, const TauSearchConfig& cfg) {
  TauEstimate est;
  est.seed = cfg.seed;
  const int n = g.dim;

  std::vector<Vec> seed;
  if (!cfg.seed_path.empty()) {
    seed = cfg.seed_path;
  } else if (segment_causal(g, p, q, cfg.causal_margin)) {
    seed = {p, q};
  } else {
    Vec T = g.time_orientation ? g.time_orientation(p) : Vec(n);
    if (norm_euclid(T) == 0) T[0] = 1.0, T.n = n;
    for (double lift : {0.05, 0.1, 0.2, 0.4, 0.8}) {
      Vec mid = 0.5 * (p + q) + lift * T;
      if (segment_causal(g, p, mid, cfg.causal_margin) &&
          segment_causal(g, mid, q, cfg.causal_margin)) {
        seed = {p, mid, q};
        break;
      }
    }
  }
  if (seed.empty()) return est;  // tau = 0, empty witness (the sup includes {0})

  Optimizer opt(g, cfg);
  std::array<double, kMaxDim> scale{};
  for (int a = 0; a < n; ++a) {
    double ext = 0;
    for (const Vec& x : seed) ext = std::max(ext, std::abs(x[a] - seed.front()[a]));
    scale[a] = std::max(ext, 0.05);
  }

  int iter = 0;
  double prev_level_total = -1;
  for (int m = cfg.m0; m <= cfg.m_max; m *= 2) {
    opt.set_nodes(resample_polyline(seed, m));
    double step = 0.25;
    for (int pass = 0; pass < cfg.passes_per_level && step > 1e-7; ++pass) {
      if (!opt.sweep(scale, step)) step *= 0.5;
      est.refinement_log.push_back({iter++, opt.total});
    }
    seed = opt.nodes;
    if (prev_level_total > 0 &&
        (opt.total - prev_level_total) < cfg.gain_tol * std::max(opt.total, 1e-12))
      break;
    prev_level_total = opt.total;
  }

  est.value = opt.total;
  est.witness.nodes = opt.nodes;
  double mc = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < opt.nodes.size(); ++i) {
    double c;
    segment_causal(g, opt.nodes[i], opt.nodes[i + 1], cfg.causal_margin, &c);
    mc = std::min(mc, c);
  }
  est.witness.min_character = mc;
  est.base_point = opt.nodes.front();
  return est;
}

TauEstimate tau_sigma(const MetricField& g, const HypersurfaceSpec& sigma, const Vec& p,
                      const TauSearchConfig& cfg) {
  const int n = g.dim;
  // coarse scan over the Sigma patch for the best straight seed
  std::vector<std::pair<double, double>> bounds1d = sigma.spatial_bounds;
  Grid base = make_grid(bounds1d, sigma.spatial_resolution);
  double best_len = -1;
  Vec best_xs(n - 1);
  for_each_index(base, IndexBox::full(base), [&](const std::array<int, kMaxDim>& idx) {
    Vec xs(n - 1);
    for (int a = 0; a < n - 1; ++a) xs[a] = base.coord(a, idx[a]);
    Vec q(n);
    q[0] = sigma.phi(xs);
    for (int a = 1; a < n; ++a) q[a] = xs[a - 1];
    if (!segment_causal(g, q, p, cfg.causal_margin)) return;
    double len = segment_len(g, q, p);
    if (len > best_len) {
      best_len = len;
      best_xs = xs;
    }
  });
  if (best_len < 0) {
    TauEstimate zero;
    zero.seed = cfg.seed;
    return zero;  // Sigma cap J^-(p) empty on the grid
  }
  Vec q0(n);
  q0[0] = sigma.phi(best_xs);
  for (int a = 1; a < n; ++a) q0[a] = best_xs[a - 1];
  TauSearchConfig c2 = cfg;
  c2.base_on_sigma = true;
  c2.sigma = &sigma;
  if (c2.seed_path.empty()) c2.seed_path = {q0, p};
  TauEstimate est = tau(g, q0, p, c2);
  return est;
}

TauChainReport tau_monotonicity_check(const SpacetimeModel& model,
                                      const RegularizedFamily& family, int num_pairs,
                                      std::uint64_t seed, double noise_tol) {
  TauChainReport rep;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = model.dim;
  const MetricField& narrowest = family.inner.front();

  for (int k = 0; k < num_pairs; ++k) {
    double ta = -0.6 + 0.5 * u(rng);
    double dt = 0.3 + 0.5 * u(rng);
    Vec p(n), q(n);
    p[0] = ta;
    q[0] = ta + dt;
    for (int a = 1; a < n; ++a) {
      double base = -0.2 + 0.4 * u(rng);
      p[a] = base;
      q[a] = base;
    }
    double off = 0.4 * dt * u(rng);
    q[1] += off;
    // shrink the offset until the chord is causal for the narrowest metric
    for (int tries = 0; tries < 40 && !segment_causal(narrowest, p, q, 1e-9); ++tries)
      q[1] = p[1] + 0.5 * (q[1] - p[1]);

    TauChainRow row;
    row.p = p;
    row.q = q;
    TauSearchConfig cfg;
    cfg.seed = seed + k;
    cfg.m0 = 8;
    cfg.m_max = 32;
    std::vector<Vec> warm;
    for (size_t j = 0; j < family.schedule.size(); ++j) {
      TauSearchConfig c = cfg;
      if (!warm.empty()) c.seed_path = warm;
      TauEstimate est = tau(family.inner[j], p, q, c);
      // the previous witness stays causal for wider cones: keep the better value
      if (!warm.empty()) {
        double carried = path_length(family.inner[j], warm);
        if (carried > est.value) {
          est.value = carried;
          est.witness.nodes = warm;
        }
      }
      row.tau_k.push_back(est.value);
      if (!est.witness.nodes.empty()) warm = est.witness.nodes;
    }
    TauSearchConfig cg = cfg;
    if (!warm.empty()) cg.seed_path = warm;
    TauEstimate eg = tau(model.metric, p, q, cg);
    double carried = warm.empty() ? 0.0 : path_length(model.metric, warm);
    row.tau_g = std::max(eg.value, carried);

    row.chain_ok = true;
    for (size_t j = 0; j + 1 < row.tau_k.size(); ++j)
      if (row.tau_k[j] > row.tau_k[j + 1] + 1e-6 + noise_tol * row.tau_g) row.chain_ok = false;
    if (!row.tau_k.empty() && row.tau_k.back() > row.tau_g + 1e-6 + noise_tol * row.tau_g)
      row.chain_ok = false;
    row.final_gap_rel =
        row.tau_g > 0 ? std::max(0.0, row.tau_g - row.tau_k.back()) / row.tau_g : 0.0;
    rep.rows.push_back(row);
  }
  rep.all_chains_ok = true;
  rep.max_final_gap_rel = 0;
  for (const auto& r : rep.rows) {
    if (!r.chain_ok) rep.all_chains_ok = false;
    rep.max_final_gap_rel = std::max(rep.max_final_gap_rel, r.final_gap_rel);
  }
  return rep;
}

CutResult cut_function(const MetricField& g, const HypersurfaceSpec& sigma, const Vec& xs,
                       double Tmax, double tol, const TauSearchConfig& cfg) {
  auto maximizing = [&](double t, bool* exited) {
    Vec p;
    try {
      p = normal_exponential(g, sigma, xs, t);
    } catch (const Error&) {
      *exited = true;
      return false;
    }
    *exited = false;
    TauEstimate est = tau_sigma(g, sigma, p, cfg);
    return est.value <= t * (1.0 + tol);
  };
  // find the exit parameter first (domain or singularity)
  Vec base(g.dim);
  base[0] = sigma.phi(xs);
  for (int a = 1; a < g.dim; ++a) base[a] = xs[a - 1];
  Vec N = sigma_unit_normal(g, sigma, xs);
  GeodesicResult probe = geodesic(g, base, N, Tmax);
  double reach = probe.length;
  bool exited_early = probe.status != GeodesicStatus::reached_T;
  double hi_cap = exited_early ? reach * (1.0 - 1e-6) : Tmax;

  bool ex;
  if (maximizing(hi_cap, &ex) && !ex) return {hi_cap, exited_early};
  double lo = 0, hi = hi_cap;
  for (int it = 0; it < 24; ++it) {
    double mid = 0.5 * (lo + hi);
    if (maximizing(mid, &ex) && !ex)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, exited_early};
}

OrthogonalityReport orthogonality_check(const MetricField& g, const HypersurfaceSpec& sigma,
                                        const std::vector<Vec>& targets,
                                        const TauSearchConfig& cfg) {
  OrthogonalityReport rep;
  const int n = g.dim;
  auto defect_of = [&](const CausalPath& w) {
    if (w.nodes.size() < 2) throw Error("orthogonality_check: degenerate witness");
    Vec base = w.nodes.front();
    Vec d = w.nodes[1] - w.nodes.front();
    Vec xs(n - 1);
    for (int a = 1; a < n; ++a) xs[a - 1] = base[a];
    Mat gm = g.g_at(base, -1);  // base-side value; frames are spatial
    double dd = -qform(gm, d);
    double worst = 0;
    for (int i = 0; i < n - 1; ++i) {
      Vec t(n);
      if (sigma.dphi) t[0] = sigma.dphi(xs)[i];
      t[i + 1] = 1.0;
      double tt = qform(gm, t);
      double ip = std::abs(qform(gm, d, t));
      worst = std::max(worst, ip / std::sqrt(std::max(dd, 1e-30) * tt));
    }
    return std::asin(std::min(1.0, worst)) * 180.0 / M_PI;
  };

  for (const Vec& p : targets) {
    TauEstimate est = tau_sigma(g, sigma, p, cfg);
    if (est.witness.nodes.size() < 2) throw Error("orthogonality_check: degenerate witness");
    OrthogonalityRow row;
    row.target = p;
    row.tau_value = est.value;
    row.defect_deg = defect_of(est.witness);
    rep.rows.push_back(row);
    rep.max_defect_deg = std::max(rep.max_defect_deg, row.defect_deg);
  }

  // optimization-trace mode: a deliberately non-orthogonal seed, increasing budgets
  if (!cfg.seed_path.empty() && !targets.empty()) {
    for (int budget : {0, 2, 4, 8, 16, 32}) {
      TauSearchConfig c = cfg;
      c.base_on_sigma = true;
      c.sigma = &sigma;
      c.passes_per_level = budget;
      c.m0 = 8;
      c.m_max = 32;
      TauEstimate est = tau(g, cfg.seed_path.front(), targets[0], c);
      rep.trace.push_back({est.value, defect_of(est.witness)});
    }
  }
  return rep;
}

// ---- normal congruence, area elements, worldvolumes ----

NormalCongruence normal_congruence(const MetricField& g, const HypersurfaceSpec& sigma, double T,
                                   int tsteps, const GeodesicOptions& opts) {
  NormalCongruence cong;
  cong.base_grid = make_grid(sigma.spatial_bounds, sigma.spatial_resolution);
  cong.tsteps = tsteps;
  cong.T = T;
  const Grid& bg = cong.base_grid;
  const int n = g.dim;
  const std::int64_t nb = bg.npoints();
  cong.pos.assign(nb, {});
  cong.vel.assign(nb, {});
  cong.area.assign(nb, {});
  cong.alive.assign(nb, {});
  cong.sigma_density.assign(nb, 0.0);

  GeodesicOptions go = opts;
  go.step = std::min(go.step, T / tsteps);
  for_each_index(bg, IndexBox::full(bg), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = bg.flat(idx);
    Vec xs(n - 1);
    for (int a = 0; a < n - 1; ++a) xs[a] = bg.coord(a, idx[a]);
    Vec base(n);
    base[0] = sigma.phi(xs);
    for (int a = 1; a < n; ++a) base[a] = xs[a - 1];
    Vec N = sigma_unit_normal(g, sigma, xs);
    GeodesicResult res = geodesic(g, base, N, T, go);
    cong.pos[fp].resize(tsteps + 1, Vec(n));
    cong.vel[fp].resize(tsteps + 1, Vec(n));
    cong.alive[fp].assign(tsteps + 1, 0);
    for (int it = 0; it <= tsteps; ++it) {
      double t = cong.t_of(it);
      // locate the sample at parameter t (uniform steps, last may be partial)
      if (t > res.length + 1e-12) break;
      size_t j = 0;
      while (j + 1 < res.params.size() && res.params[j + 1] < t) ++j;
      double denom = (j + 1 < res.params.size()) ? res.params[j + 1] - res.params[j] : 1.0;
      double f = (j + 1 < res.params.size() && denom > 0) ? (t - res.params[j]) / denom : 0.0;
      Vec x = res.points[j] + f * ((j + 1 < res.points.size() ? res.points[j + 1]
                                                              : res.points[j]) -
                                   res.points[j]);
      Vec v = res.velocities[j] + f * ((j + 1 < res.velocities.size() ? res.velocities[j + 1]
                                                                       : res.velocities[j]) -
                                       res.velocities[j]);
      cong.pos[fp][it] = x;
      cong.vel[fp][it] = v;
      cong.alive[fp][it] = 1;
    }
  });

  // area elements by FD Jacobians across the base lattice
  for_each_index(bg, IndexBox::full(bg), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = bg.flat(idx);
    cong.area[fp].assign(tsteps + 1, 0.0);
    double det0 = 0;
    for (int it = 0; it <= tsteps; ++it) {
      if (!cong.alive[fp][it]) break;
      std::vector<Vec> Y(n - 1, Vec(n));
      bool ok = true;
      for (int a = 0; a < n - 1; ++a) {
        auto ip = idx, im = idx;
        double h = bg.spacing(a);
        double span = 2 * h;
        if (idx[a] == 0) {
          ip[a] = 1;
          im[a] = 0;
          span = h;
        } else if (idx[a] == bg.res[a] - 1) {
          ip[a] = idx[a];
          im[a] = idx[a] - 1;
          span = h;
        } else {
          ip[a] = idx[a] + 1;
          im[a] = idx[a] - 1;
        }
        std::int64_t fpp = bg.flat(ip), fpm = bg.flat(im);
        if (!cong.alive[fpp][it] || !cong.alive[fpm][it]) {
          ok = false;
          break;
        }
        Y[a] = (1.0 / span) * (cong.pos[fpp][it] - cong.pos[fpm][it]);
      }
      if (!ok) break;
      Mat G(n - 1);
      Mat gm = g.g_at(cong.pos[fp][it]);
      for (int a = 0; a < n - 1; ++a)
        for (int b = 0; b < n - 1; ++b) G(a, b) = qform(gm, Y[a], Y[b]);
      double d = det(G);
      if (d <= 0) break;
      if (it == 0) {
        det0 = d;
        cong.sigma_density[fp] = std::sqrt(d);
      }
      cong.area[fp][it] = std::sqrt(d / det0);
    }
  });
  return cong;
}

Vec NormalCongruence::velocity_near(const Vec& p) const {
  // nearest base point by spatial coordinates, nearest t sample by best match
  Vec xs(base_grid.dim);
  for (int a = 0; a < base_grid.dim; ++a) xs[a] = p[a + 1];
  auto idx = base_grid.nearest(xs);
  std::int64_t fp = base_grid.flat(idx);
  double best = std::numeric_limits<double>::infinity();
  Vec v = vel[fp].empty() ? Vec(p.n) : vel[fp][0];
  for (int it = 0; it <= tsteps; ++it) {
    if (!alive[fp][it]) break;
    double d = norm_euclid(pos[fp][it] - p);
    if (d < best) {
      best = d;
      v = vel[fp][it];
    }
  }
  return v;
}

double omega_volume(const NormalCongruence& cong, const std::function<double(const Vec&)>& cap) {
  const Grid& bg = cong.base_grid;
  double dt = cong.T / cong.tsteps;
  double cellvol = 1;
  for (int a = 0; a < bg.dim; ++a) cellvol *= bg.spacing(a);
  double acc = 0;
  for_each_index(bg, IndexBox::full(bg), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = bg.flat(idx);
    double w = 1;
    for (int a = 0; a < bg.dim; ++a)
      w *= (idx[a] == 0 || idx[a] == bg.res[a] - 1) ? 0.5 : 1.0;
    double tcap = cong.T;
    if (cap) {
      Vec xs(bg.dim);
      for (int a = 0; a < bg.dim; ++a) xs[a] = bg.coord(a, idx[a]);
      tcap = std::min(tcap, cap(xs));
    }
    double line = 0;
    for (int it = 0; it < cong.tsteps; ++it) {
      if (!cong.alive[fp][it + 1]) break;
      double t0 = cong.t_of(it), t1 = cong.t_of(it + 1);
      if (t0 >= tcap) break;
      double a0 = cong.area[fp][it], a1 = cong.area[fp][it + 1];
      if (t1 <= tcap) {
        line += 0.5 * (a0 + a1) * dt;
      } else {
        double f = (tcap - t0) / dt;
        double am = a0 + f * (a1 - a0);
        line += 0.5 * (a0 + am) * (tcap - t0);
      }
    }
    acc += w * cong.sigma_density[fp] * line;
  });
  return acc * cellvol;
}

double sigma_area(const NormalCongruence& cong) {
  const Grid& bg = cong.base_grid;
  double cellvol = 1;
  for (int a = 0; a < bg.dim; ++a) cellvol *= bg.spacing(a);
  double acc = 0;
  for_each_index(bg, IndexBox::full(bg), [&](const std::array<int, kMaxDim>& idx) {
    double w = 1;
    for (int a = 0; a < bg.dim; ++a)
      w *= (idx[a] == 0 || idx[a] == bg.res[a] - 1) ? 0.5 : 1.0;
    acc += w * cong.sigma_density[bg.flat(idx)];
  });
  return acc * cellvol;
}

}  // namespace liplab

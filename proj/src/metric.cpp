#include "liplab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace liplab {

Mat OneAxisMetric::g(const Vec& x, int side) const {
  Mat out = constant_part;
  if (axis >= 0)
    for (const auto& [basis, prof] : profiles) out = out + prof.v(x[axis], side) * basis;
  return out;
}

Mat OneAxisMetric::dg(const Vec& x, int a, int side) const {
  Mat out(dim);
  if (axis < 0 || a != axis) return out;
  for (const auto& [basis, prof] : profiles) out = out + prof.d1(x[axis], side) * basis;
  return out;
}

Mat OneAxisMetric::ddg(const Vec& x, int a, int b, int side) const {
  Mat out(dim);
  if (axis < 0 || a != axis || b != axis) return out;
  for (const auto& [basis, prof] : profiles) out = out + prof.d2(x[axis], side) * basis;
  return out;
}

std::vector<double> OneAxisMetric::breaks() const {
  std::vector<double> bs;
  for (const auto& [basis, prof] : profiles)
    for (double b : prof.breaks) bs.push_back(b);
  std::sort(bs.begin(), bs.end());
  bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
  return bs;
}

Mat MetricField::g_at(const Vec& x, int side) const {
  if (analytic) return analytic->g(x, side);
  if (!sampled) throw Error("MetricField: no source");
  Mat m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = sampled->interp(x, i * dim + j);
  return m;
}

Mat MetricField::dg_at(const Vec& x, int a, int side) const {
  if (analytic) return analytic->dg(x, a, side);
  throw Error("MetricField: derivative needs an analytic source");
}

Mat MetricField::ddg_at(const Vec& x, int a, int b, int side) const {
  if (analytic) return analytic->ddg(x, a, b, side);
  throw Error("MetricField: second derivative needs an analytic source");
}

Mat inverse_at(const MetricField& g, const Vec& x) { return inverse_cofactor(g.g_at(x)); }

CharacterResult causal_character(const MetricField& g, const Vec& x, const Vec& v) {
  if (norm_euclid(v) == 0) throw Error("causal_character: zero vector");
  Mat m = g.g_at(x);
  double val = qform(m, v);
  double band = 1e-12 * dot_euclid(v, v);
  Character c = val < -band   ? Character::timelike
                : val > band  ? Character::spacelike
                              : Character::null_vec;
  bool future = false;
  if (g.time_orientation) future = qform(m, v, g.time_orientation(x)) < 0;
  return {c, val, future};
}

Vec random_point(const Box& b, int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec x(dim);
  for (int a = 0; a < dim; ++a) x[a] = b.lo[a] + (b.hi[a] - b.lo[a]) * u(rng);
  return x;
}

namespace {

// g-orthonormal frame at x: E[0] future unit timelike, E[1..] spacelike.
std::vector<Vec> lorentz_frame(const MetricField& g, const Vec& x) {
  const int n = g.dim;
  Mat m = g.g_at(x);
  Vec T = g.time_orientation ? g.time_orientation(x) : Vec(n);
  if (norm_euclid(T) == 0) {
    T = Vec(n);
    T[0] = 1.0;
  }
  double tt = qform(m, T);
  if (!(tt < 0)) throw Error("lorentz_frame: time orientation not timelike at audit point");
  T = (1.0 / std::sqrt(-tt)) * T;
  std::vector<Vec> frame{T};
  for (int a = 0; a < n && static_cast<int>(frame.size()) < n; ++a) {
    Vec e(n);
    e[a] = 1.0;
    // project out previous frame vectors (g-orthogonalization)
    Vec w = e;
    for (size_t k = 0; k < frame.size(); ++k) {
      double sgn = (k == 0) ? -1.0 : 1.0;  // g(E0,E0) = -1
      double c = sgn * qform(m, w, frame[k]);
      w = w - c * frame[k];
    }
    double ww = qform(m, w);
    if (ww < 1e-10) continue;  // degenerate direction, skip
    frame.push_back((1.0 / std::sqrt(ww)) * w);
  }
  if (static_cast<int>(frame.size()) != n) throw Error("lorentz_frame: frame construction failed");
  return frame;
}

Vec unit_sphere_dir(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec w(m);
  double s = 0;
  do {
    for (int i = 0; i < m; ++i) w[i] = nd(rng);
    s = norm_euclid(w);
  } while (s < 1e-12);
  return (1.0 / s) * w;
}

}  // namespace

std::vector<Vec> audit_directions(const MetricField& g, const Vec& x, const AuditConfig& cfg,
                                  std::mt19937_64& rng) {
  const int n = g.dim;
  auto frame = lorentz_frame(g, x);
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  auto combine = [&](double t_comp, const Vec& sdir, double s_comp) {
    Vec v = t_comp * frame[0];
    for (int k = 1; k < n; ++k) v = v + (s_comp * sdir[k - 1]) * frame[k];
    return v;
  };
  std::vector<Vec> out;
  for (int i = 0; i < cfg.dirs_timelike; ++i) {
    double r = 2.0 * ur(rng);
    out.push_back(combine(std::cosh(r), unit_sphere_dir(n - 1, rng), std::sinh(r)));
  }
  for (int i = 0; i < cfg.dirs_near_null; ++i) {
    // frame-null is T + S; pull inside or push outside the cone by the shift
    double shift = cfg.near_null_shift * (ur(rng) < 0.5 ? 1.0 : -1.0);
    out.push_back(combine(1.0, unit_sphere_dir(n - 1, rng), 1.0 - shift));
  }
  for (int i = 0; i < cfg.dirs_spacelike; ++i) {
    double t_comp = 0.8 * ur(rng);
    out.push_back(combine(t_comp, unit_sphere_dir(n - 1, rng), 1.0));
  }
  return out;
}

Vec null_vector(const MetricField& g, const Vec& x, const Vec& w) {
  Mat m = g.g_at(x);
  Vec T = g.time_orientation ? g.time_orientation(x) : Vec(g.dim);
  if (norm_euclid(T) == 0) {
    T = Vec(g.dim);
    T[0] = 1.0;
  }
  double A = qform(m, T), B = qform(m, w, T), C = qform(m, w);
  double disc = B * B - A * C;
  if (disc < 0) return Vec(g.dim);
  double r1 = (-B + std::sqrt(disc)) / A, r2 = (-B - std::sqrt(disc)) / A;
  for (double mu : {r1, r2}) {
    Vec v = w + mu * T;
    if (qform(m, v, T) < 0) return v;
  }
  return Vec(g.dim);
}

ConeReport cones_narrower(const MetricField& g1, const MetricField& g2, const Box& region,
                          const AuditConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  ConeReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (int p = 0; p < cfg.points; ++p) {
    Vec x = random_point(region, g1.dim, rng);
    Mat m2 = g2.g_at(x);
    Mat m1 = g1.g_at(x);
    auto dirs = audit_directions(g1, x, cfg, rng);
    // include exact g1-null vectors, where the margin is tightest
    for (int k = 0; k < cfg.dirs_near_null; ++k) {
      Vec sdir = unit_sphere_dir(g1.dim - 1, rng);
      Vec w(g1.dim);
      for (int a = 1; a < g1.dim; ++a) w[a] = sdir[a - 1];
      Vec nv = null_vector(g1, x, w);
      if (norm_euclid(nv) > 0) dirs.push_back(nv);
    }
    for (const Vec& v : dirs) {
      double q1 = qform(m1, v);
      if (q1 > 0) continue;  // not g1-causal
      ++rep.causal_samples;
      double margin = -qform(m2, v) / dot_euclid(v, v);
      if (margin < rep.min_margin) {
        rep.min_margin = margin;
        rep.witness_x = x;
        rep.witness_v = v;
      }
    }
  }
  rep.holds = rep.causal_samples > 0 && rep.min_margin > cfg.margin_floor;
  return rep;
}

// ---- catalog ----

namespace {

Mat basis_tt(int n) {
  Mat m(n);
  m(0, 0) = 1.0;
  return m;
}
Mat basis_spatial(int n) {
  Mat m(n);
  for (int i = 1; i < n; ++i) m(i, i) = 1.0;
  return m;
}
Mat basis_diag_entry(int n, int i) {
  Mat m(n);
  m(i, i) = 1.0;
  return m;
}

Piece piece_from_value(std::function<double(double)> f) {
  const double h = 1e-5;
  Piece p;
  p.v = f;
  p.d1 = [f, h](double t) { return (f(t + h) - f(t - h)) / (2 * h); };
  p.d2 = [f, h](double t) { return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h); };
  return p;
}

Vec e0_orientation(const Vec& x) {
  Vec t(x.n);
  t[0] = 1.0;
  return t;
}

MetricField grw_metric(int dim, const Piecewise1D& b_of_t, const std::string& name) {
  MetricField m;
  m.dim = dim;
  m.name = name;
  m.temporal_covector = Vec(dim);
  m.temporal_covector[0] = 1.0;
  OneAxisMetric g;
  g.dim = dim;
  g.axis = 0;
  g.constant_part = Mat(dim);
  g.constant_part(0, 0) = -1.0;
  g.profiles.push_back({basis_spatial(dim), b_of_t});
  m.analytic = g;
  m.time_orientation = e0_orientation;
  return m;
}

// GRW closed forms for g = -dt^2 + a(t)^2 delta: Ric_tt = -(n-1) add/a,
// Ric_ij = (a add + (n-2) ad^2) delta_ij, H = (n-1) ad/a.
OneAxisMetric grw_ricci_regular(int dim, std::function<double(double)> a,
                                std::function<double(double)> da,
                                std::function<double(double)> dda) {
  OneAxisMetric ric;
  ric.dim = dim;
  ric.axis = 0;
  ric.constant_part = Mat(dim);
  Piecewise1D rtt = single_piece({}, {}, {});
  rtt.pieces[0] = piece_from_value(
      [a, dda, dim](double t) { return -(dim - 1) * dda(t) / a(t); });
  Piecewise1D rxx = single_piece({}, {}, {});
  rxx.pieces[0] = piece_from_value([a, da, dda, dim](double t) {
    return a(t) * dda(t) + (dim - 2) * da(t) * da(t);
  });
  ric.profiles.push_back({basis_tt(dim), rtt});
  ric.profiles.push_back({basis_spatial(dim), rxx});
  return ric;
}

}  // namespace

SpacetimeModel make_minkowski(int dim) {
  if (dim < 2 || dim > kMaxDim) throw Error("minkowski: dim out of range");
  SpacetimeModel s;
  s.name = "minkowski";
  s.dim = dim;
  s.metric.dim = dim;
  s.metric.name = "minkowski";
  OneAxisMetric g;
  g.dim = dim;
  g.axis = -1;
  g.constant_part = Mat::identity(dim);
  g.constant_part(0, 0) = -1.0;
  s.metric.analytic = g;
  s.metric.time_orientation = e0_orientation;
  s.metric.temporal_covector = Vec(dim);
  s.metric.temporal_covector[0] = 1.0;
  s.metric.lipschitz_estimate = 0.0;
  s.known.provenance = "oracle:flat_space_v1";
  OneAxisMetric ric;
  ric.dim = dim;
  ric.axis = -1;
  ric.constant_part = Mat(dim);
  s.known.ricci_regular = ric;
  s.known.mean_curvature_of_t = [](double) { return 0.0; };
  s.known.sec_rho = 0.0;
  s.known.tau_form = KnownFacts::TauForm::flat;
  s.known.scale_a = [](double) { return 1.0; };
  s.known.scale_da = [](double) { return 0.0; };
  s.known.scale_dda = [](double) { return 0.0; };
  return s;
}

SpacetimeModel make_grw_smooth(int dim, const std::string& kind, double p0, double p1) {
  if (dim < 2 || dim > kMaxDim) throw Error("grw_smooth: dim out of range");
  std::function<double(double)> a, da, dda;
  if (kind == "cosh") {
    a = [](double t) { return std::cosh(t); };
    da = [](double t) { return std::sinh(t); };
    dda = [](double t) { return std::cosh(t); };
  } else if (kind == "exp") {
    a = [](double t) { return std::exp(t); };
    da = a;
    dda = a;
  } else if (kind == "linear") {
    if (p0 <= 0) throw Error("grw_smooth linear: a0 must be positive");
    a = [p0, p1](double t) { return p0 + p1 * t; };
    da = [p1](double) { return p1; };
    dda = [](double) { return 0.0; };
  } else {
    throw Error("grw_smooth: unknown kind " + kind);
  }
  Piecewise1D b = single_piece([a](double t) { return a(t) * a(t); },
                               [a, da](double t) { return 2 * a(t) * da(t); },
                               [a, da, dda](double t) {
                                 return 2 * (da(t) * da(t) + a(t) * dda(t));
                               });
  SpacetimeModel s;
  s.name = "grw_smooth_" + kind;
  s.dim = dim;
  s.metric = grw_metric(dim, b, s.name);
  s.metric.singular_guard = [a](const Vec& x) { return a(x[0]); };
  s.known.provenance = "oracle:warped_product_v1";
  s.known.ricci_regular = grw_ricci_regular(dim, a, da, dda);
  s.known.mean_curvature_of_t = [a, da, dim](double t) { return (dim - 1) * da(t) / a(t); };
  s.known.tau_form = KnownFacts::TauForm::comoving;
  s.known.scale_a = a;
  s.known.scale_da = da;
  s.known.scale_dda = dda;
  return s;
}

SpacetimeModel make_grw_eds_collapse(int dim, double ts) {
  if (dim < 3 || dim > kMaxDim)
    throw Error("grw_eds_collapse: dim must be in [3," + std::to_string(kMaxDim) +
                "] (SEC fails for dim 2)");
  auto a = [ts](double t) { return std::pow(ts - t, 2.0 / 3.0); };
  auto da = [ts](double t) { return -(2.0 / 3.0) * std::pow(ts - t, -1.0 / 3.0); };
  auto dda = [ts](double t) { return -(2.0 / 9.0) * std::pow(ts - t, -4.0 / 3.0); };
  Piecewise1D b = single_piece([ts](double t) { return std::pow(ts - t, 4.0 / 3.0); },
                               [ts](double t) { return -(4.0 / 3.0) * std::pow(ts - t, 1.0 / 3.0); },
                               [ts](double t) { return (4.0 / 9.0) * std::pow(ts - t, -2.0 / 3.0); });
  SpacetimeModel s;
  s.name = "grw_eds_collapse";
  s.dim = dim;
  s.metric = grw_metric(dim, b, s.name);
  s.metric.singular_guard = [a, ts](const Vec& x) {
    return x[0] >= ts ? 0.0 : a(x[0]);
  };
  s.known.provenance = "oracle:warped_product_v1";
  s.known.ricci_regular = grw_ricci_regular(dim, a, da, dda);
  s.known.mean_curvature_of_t = [dim, ts](double t) {
    return -(2.0 / 3.0) * (dim - 1) / (ts - t);
  };
  s.known.singularity_time = ts;
  s.known.sec_rho = 0.0;
  s.known.tau_form = KnownFacts::TauForm::comoving;
  s.known.scale_a = a;
  s.known.scale_da = da;
  s.known.scale_dda = dda;
  return s;
}

SpacetimeModel make_grw_two_slope(int dim, double m1, double m2) {
  if (dim < 2 || dim > kMaxDim) throw Error("grw_two_slope: dim out of range");
  if (!(m1 > 0) || m2 < m1) throw Error("grw_two_slope: need 0 < m1 <= m2");
  // a(t) = 1 - m1 t (t<=0), 1 - m2 t (t>=0); b = a^2 piecewise quadratic
  Piecewise1D b = polynomial_pieces({0.0}, {{1.0, -2 * m1, m1 * m1}, {1.0, -2 * m2, m2 * m2}});
  SpacetimeModel s;
  s.name = "grw_two_slope";
  s.dim = dim;
  s.metric = grw_metric(dim, b, s.name);
  s.metric.kink = KinkInfo{0, 0.0};
  s.metric.singular_guard = [m1, m2](const Vec& x) {
    double t = x[0];
    return t <= 0 ? 1.0 - m1 * t : 1.0 - m2 * t;
  };
  s.metric.lipschitz_estimate = 2.0 * m2 * (1.0 + 1.5 * m2);  // |b'| on |t| <= 1.5
  s.known.provenance = "oracle:jump_formula_v1";
  // regular Ricci: R_tt = 0, R_ij = (n-2) m_i^2 delta_ij per side
  OneAxisMetric ric;
  ric.dim = dim;
  ric.axis = 0;
  ric.constant_part = Mat(dim);
  ric.profiles.push_back(
      {basis_spatial(dim),
       polynomial_pieces({0.0}, {{(dim - 2) * m1 * m1}, {(dim - 2) * m2 * m2}})});
  s.known.ricci_regular = ric;
  // delta part on {t=0}: tt coeff (n-1)(m2-m1), spatial coeff -(m2-m1) per diag
  Mat delta(dim);
  delta(0, 0) = (dim - 1) * (m2 - m1);
  for (int i = 1; i < dim; ++i) delta(i, i) = -(m2 - m1);
  s.known.ricci_delta_coeff = delta;
  s.known.mean_curvature_of_t = [dim, m1, m2](double t) {
    double m = t <= 0 ? m1 : m2;
    return -(dim - 1) * m / (1.0 - m * t);
  };
  s.known.singularity_time = 1.0 / m2;
  s.known.sec_rho = 0.0;
  s.known.tau_form = KnownFacts::TauForm::comoving;
  s.known.scale_a = [m1, m2](double t) { return t <= 0 ? 1 - m1 * t : 1 - m2 * t; };
  s.known.scale_da = [m1, m2](double t) { return t <= 0 ? -m1 : -m2; };
  s.known.scale_dda = [](double) { return 0.0; };
  return s;
}

SpacetimeModel make_pp_impulsive_rosen() {
  const int dim = 4;
  SpacetimeModel s;
  s.name = "pp_impulsive_rosen";
  s.dim = dim;
  s.metric.dim = dim;
  s.metric.name = s.name;
  OneAxisMetric g;
  g.dim = dim;
  g.axis = 0;  // coordinates (u, v, x, y); profiles vary in u
  g.constant_part = Mat(dim);
  g.constant_part(0, 1) = g.constant_part(1, 0) = -1.0;
  // h_xx = (1+u_+)^2, h_yy = (1-u_+)^2, valid for u < 1
  g.profiles.push_back({basis_diag_entry(dim, 2),
                        polynomial_pieces({0.0}, {{1.0}, {1.0, 2.0, 1.0}})});
  g.profiles.push_back({basis_diag_entry(dim, 3),
                        polynomial_pieces({0.0}, {{1.0}, {1.0, -2.0, 1.0}})});
  s.metric.analytic = g;
  s.metric.kink = KinkInfo{0, 0.0};
  s.metric.temporal_covector = Vec(dim);
  s.metric.temporal_covector[0] = s.metric.temporal_covector[1] = 1.0 / std::sqrt(2.0);
  s.metric.time_orientation = [](const Vec& x) {
    Vec t(x.n);
    t[0] = 1.0;
    t[1] = 1.0;  // du + dv direction, g(T,T) = -2
    return t;
  };
  s.metric.singular_guard = [](const Vec& x) { return 1.0 - x[0]; };
  s.metric.lipschitz_estimate = 4.0;  // |(h_yy)'| <= 2(1+|u|) on |u| <= 1
  s.known.provenance = "oracle:pp_wave_v1";
  // Ricci vanishes a.e. and the uu delta parts cancel: Ric decomposition is zero
  OneAxisMetric ric;
  ric.dim = dim;
  ric.axis = -1;
  ric.constant_part = Mat(dim);
  s.known.ricci_regular = ric;
  s.known.ricci_delta_coeff = Mat(dim);
  s.known.sec_rho = 0.0;
  return s;
}

SpacetimeModel catalog(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  int dim = static_cast<int>(get("dim", 4));
  if (params.count("t0") && !(get("t0", -0.5) < 0))
    throw Error("catalog: t0 must be negative for two-slope runs");
  if (name == "minkowski") return make_minkowski(dim);
  if (name == "grw_smooth") {
    double kind = get("kind", 0);  // 0 cosh, 1 exp, 2 linear
    if (kind == 0) return make_grw_smooth(dim, "cosh");
    if (kind == 1) return make_grw_smooth(dim, "exp");
    return make_grw_smooth(dim, "linear", get("a0", 1.0), get("slope", 0.0));
  }
  if (name == "grw_eds_collapse") return make_grw_eds_collapse(dim, get("ts", 1.0));
  if (name == "grw_two_slope")
    return make_grw_two_slope(dim, get("m1", 1.0), get("m2", 1.0));
  if (name == "pp_impulsive_rosen") return make_pp_impulsive_rosen();
  throw Error("catalog: unknown model " + name);
}

}  // namespace liplab

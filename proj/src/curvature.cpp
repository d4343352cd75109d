#include "liplab/curvature.hpp"

#include <cmath>
#include <limits>

namespace liplab {

namespace {

int stencil_halfwidth(FdScheme scheme) { return scheme == FdScheme::central4 ? 2 : 1; }

Ten3 assemble_gamma(const Mat& ginv, const std::array<Mat, kMaxDim>& dg, int n) {
  Ten3 gam;
  gam.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double s = 0;
        for (int l = 0; l < n; ++l)
          s += ginv(i, l) * (dg[j](l, k) + dg[k](j, l) - dg[l](j, k));
        gam(i, j, k) = 0.5 * s;
        gam(i, k, j) = 0.5 * s;
      }
  return gam;
}

Mat assemble_ricci(const Ten3& gam, const std::array<Ten3, kMaxDim>& dgam, int n) {
  Mat ric(n);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += dgam[i](i, j, k) - dgam[j](i, i, k);
      for (int i = 0; i < n; ++i)
        for (int p = 0; p < n; ++p)
          s += gam(i, i, p) * gam(p, j, k) - gam(i, j, p) * gam(p, i, k);
      ric(j, k) = s;
      ric(k, j) = s;
    }
  return ric;
}

}  // namespace

CurvatureBundle christoffel_fd(const SampledField& g, FdScheme scheme) {
  const Grid& grid = g.grid;
  const int n = grid.dim;
  if (g.rank_up + g.rank_down != 2) throw Error("christoffel_fd: metric field must be rank 2");
  std::array<SampledField, kMaxDim> dg;
  for (int a = 0; a < n; ++a) dg[a] = fd_partial(g, a, scheme);
  CurvatureBundle bundle;
  bundle.gamma = make_field(grid, 1, 2, false);
  const int hw = stencil_halfwidth(scheme);
  std::array<int, kMaxDim> margin{};
  for (int a = 0; a < n; ++a) margin[a] = hw;
  bundle.valid = g.valid.shrunk(grid, margin);
  for_each_index(grid, IndexBox::full(grid), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = grid.flat(idx);
    Mat gm = g.matrix_at(fp);
    Mat ginv = inverse_cofactor(gm);
    std::array<Mat, kMaxDim> d;
    for (int a = 0; a < n; ++a) d[a] = dg[a].matrix_at(fp);
    Ten3 gam = assemble_gamma(ginv, d, n);
    for (int c = 0; c < n * n * n; ++c) bundle.gamma.at(fp, c) = gam.a[c];
  });
  bundle.gamma.valid = bundle.valid;
  return bundle;
}

CurvatureBundle ricci_fd(const SampledField& g, FdScheme scheme) {
  CurvatureBundle bundle = christoffel_fd(g, scheme);
  const Grid& grid = g.grid;
  const int n = grid.dim;
  std::array<SampledField, kMaxDim> dgam;
  for (int a = 0; a < n; ++a) dgam[a] = fd_partial(bundle.gamma, a, scheme);
  bundle.ricci = make_field(grid, 0, 2, true);
  for_each_index(grid, IndexBox::full(grid), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = grid.flat(idx);
    Ten3 gam;
    gam.n = n;
    for (int c = 0; c < n * n * n; ++c) gam.a[c] = bundle.gamma.at(fp, c);
    std::array<Ten3, kMaxDim> dg;
    for (int a = 0; a < n; ++a) {
      dg[a].n = n;
      for (int c = 0; c < n * n * n; ++c) dg[a].a[c] = dgam[a].at(fp, c);
    }
    Mat ric = assemble_ricci(gam, dg, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) bundle.ricci.at(fp, i * n + j) = ric(i, j);
  });
  const int hw = stencil_halfwidth(scheme);
  std::array<int, kMaxDim> margin{};
  for (int a = 0; a < n; ++a) margin[a] = 2 * hw;
  bundle.valid = g.valid.shrunk(grid, margin);
  bundle.ricci.valid = bundle.valid;
  bundle.has_ricci = true;
  return bundle;
}

Ten3 christoffel_at(const MetricField& g, const Vec& x, int side) {
  const int n = g.dim;
  Mat gm = g.g_at(x, side);
  Mat ginv = inverse_cofactor(gm);
  std::array<Mat, kMaxDim> dg;
  for (int a = 0; a < n; ++a) dg[a] = g.dg_at(x, a, side);
  return assemble_gamma(ginv, dg, n);
}

Mat ricci_at(const MetricField& g, const Vec& x, int side) {
  const int n = g.dim;
  Mat gm = g.g_at(x, side);
  Mat ginv = inverse_cofactor(gm);
  std::array<Mat, kMaxDim> dg;
  for (int a = 0; a < n; ++a) dg[a] = g.dg_at(x, a, side);
  Ten3 gam = assemble_gamma(ginv, dg, n);
  // dGamma^i_{jk}/dx^a = 1/2 dginv^{il} (...) + 1/2 ginv^{il} d(...)
  std::array<Ten3, kMaxDim> dgam;
  for (int a = 0; a < n; ++a) {
    Mat dga = dg[a];
    // d(ginv) = -ginv dg ginv
    Mat dginv = -1.0 * matmul(ginv, matmul(dga, ginv));
    std::array<Mat, kMaxDim> ddg;
    for (int b = 0; b < n; ++b) ddg[b] = g.ddg_at(x, a, b, side);
    dgam[a].n = n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0;
          for (int l = 0; l < n; ++l) {
            s += dginv(i, l) * (dg[j](l, k) + dg[k](j, l) - dg[l](j, k));
            s += ginv(i, l) * (ddg[j](l, k) + ddg[k](j, l) - ddg[l](j, k));
          }
          dgam[a](i, j, k) = 0.5 * s;
        }
  }
  return assemble_ricci(gam, dgam, n);
}

double ricci_quadratic_min(const Mat& ric, const Mat& g_mat, const Vec& time_or,
                           const RicciMinConfig& cfg) {
  const int n = g_mat.n;
  // Lorentz-orthonormalize: frame E0 (future unit timelike) + spacelike E1..E_{n-1}
  Vec T = time_or;
  double tt = qform(g_mat, T);
  if (!(tt < 0)) throw Error("ricci_quadratic_min: time orientation not timelike");
  T = (1.0 / std::sqrt(-tt)) * T;
  std::vector<Vec> frame{T};
  for (int a = 0; a < n && static_cast<int>(frame.size()) < n; ++a) {
    Vec e(n);
    e[a] = 1.0;
    Vec w = e;
    for (size_t k = 0; k < frame.size(); ++k) {
      double sgn = (k == 0) ? -1.0 : 1.0;
      w = w - (sgn * qform(g_mat, w, frame[k])) * frame[k];
    }
    double ww = qform(g_mat, w);
    if (ww < 1e-10) continue;
    frame.push_back((1.0 / std::sqrt(ww)) * w);
  }
  if (static_cast<int>(frame.size()) != n)
    throw Error("ricci_quadratic_min: frame construction failed");

  auto vec_of = [&](double r, const Vec& sdir) {  // unit timelike: cosh r, sinh r * omega
    Vec v = std::cosh(r) * frame[0];
    for (int k = 1; k < n; ++k) v = v + (std::sinh(r) * sdir[k - 1]) * frame[k];
    return v;
  };
  auto value_of = [&](double r, const Vec& sdir, bool* ok) {
    Vec v = vec_of(r, sdir);
    *ok = norm_euclid(v) <= cfg.unit_bound;
    return qform(ric, v);
  };

  // direction set: coordinate axes + diagonals + random fill-up
  std::vector<Vec> dirs;
  for (int a = 0; a < n - 1; ++a) {
    Vec d(n - 1);
    d[a] = 1.0;
    dirs.push_back(d);
    d[a] = -1.0;
    dirs.push_back(d);
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd(0, 1);
  while (static_cast<int>(dirs.size()) < cfg.sphere_dirs) {
    Vec d(n - 1);
    double s = 0;
    for (int a = 0; a < n - 1; ++a) d[a] = nd(rng);
    s = norm_euclid(d);
    if (s < 1e-12) continue;
    dirs.push_back((1.0 / s) * d);
  }

  double best = std::numeric_limits<double>::infinity();
  double best_r = 0;
  Vec best_dir = dirs[0];
  for (const Vec& d : dirs) {
    // find the rapidity cap where ||v||_h = D along this direction
    double r_cap = 0;
    for (double r = 0.0;; r += 0.25) {
      if (norm_euclid(vec_of(r, d)) > cfg.unit_bound || r > 20.0) {
        r_cap = std::max(0.0, r - 0.25);
        break;
      }
    }
    for (int i = 0; i <= cfg.rapidity_steps; ++i) {
      double r = r_cap * i / cfg.rapidity_steps;
      bool ok;
      double v = value_of(r, d, &ok);
      if (ok && v < best) {
        best = v;
        best_r = r;
        best_dir = d;
      }
    }
  }
  // local refinement in rapidity around the best direction
  double lo = std::max(0.0, best_r - 0.5), hi = best_r + 0.5;
  for (int it = 0; it < cfg.refine_iters; ++it) {
    double r1 = lo + (hi - lo) / 3, r2 = hi - (hi - lo) / 3;
    bool ok1, ok2;
    double v1 = value_of(r1, best_dir, &ok1), v2 = value_of(r2, best_dir, &ok2);
    if (!ok1) hi = r1;
    else if (!ok2) hi = r2;
    else if (v1 < v2) hi = r2;
    else lo = r1;
  }
  bool ok;
  double v = value_of(0.5 * (lo + hi), best_dir, &ok);
  if (ok) best = std::min(best, v);
  return best;
}

double ricci_timelike_min(const MetricField& g, const std::vector<Vec>& points,
                          const RicciMinConfig& cfg) {
  if (points.empty()) throw Error("ricci_timelike_min: empty region");
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& x : points) {
    Mat ric = ricci_at(g, x);
    Mat gm = g.g_at(x);
    Vec T = g.time_orientation ? g.time_orientation(x) : Vec(g.dim);
    if (norm_euclid(T) == 0) T[0] = 1.0, T.n = g.dim;
    best = std::min(best, ricci_quadratic_min(ric, gm, T, cfg));
  }
  return best;
}

double ricci_timelike_min(const CurvatureBundle& bundle, const MetricField& g,
                          const IndexBox& region, const RicciMinConfig& cfg) {
  if (!bundle.has_ricci) throw Error("ricci_timelike_min: bundle has no ricci part");
  const Grid& grid = bundle.ricci.grid;
  if (region.empty(grid.dim)) throw Error("ricci_timelike_min: empty region");
  double best = std::numeric_limits<double>::infinity();
  for_each_index(grid, region, [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = grid.flat(idx);
    Mat ric = bundle.ricci.matrix_at(fp);
    Vec x = grid.point(idx);
    Mat gm = g.g_at(x);
    Vec T = g.time_orientation ? g.time_orientation(x) : Vec(g.dim);
    if (norm_euclid(T) == 0) T[0] = 1.0, T.n = g.dim;
    best = std::min(best, ricci_quadratic_min(ric, gm, T, cfg));
  });
  return best;
}

}  // namespace liplab

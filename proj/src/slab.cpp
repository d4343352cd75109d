#include "liplab/slab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "liplab/curvature.hpp"

namespace liplab {

HypersurfaceSpec const_slice(double t0, const std::vector<std::pair<double, double>>& bounds,
                             const std::vector<int>& resolution) {
  HypersurfaceSpec s;
  s.phi = [t0](const Vec&) { return t0; };
  s.dphi = {};
  s.spatial_bounds = bounds;
  s.spatial_resolution = resolution;
  return s;
}

FlowField coordinate_time_flow(int dim) {
  return [dim](const Vec&) {
    Vec v(dim);
    v[0] = 1.0;
    return v;
  };
}

namespace {

Vec flow_rk4(const FlowField& X, Vec y, double s, int steps_per_unit = 64) {
  int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(s) * steps_per_unit)));
  double h = s / nsteps;
  for (int i = 0; i < nsteps; ++i) {
    Vec k1 = X(y);
    Vec k2 = X(y + (0.5 * h) * k1);
    Vec k3 = X(y + (0.5 * h) * k2);
    Vec k4 = X(y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

Vec base_point(const HypersurfaceSpec& sigma, const Vec& xs, int dim) {
  Vec p(dim);
  p[0] = sigma.phi(xs);
  for (int a = 1; a < dim; ++a) p[a] = xs[a - 1];
  return p;
}

}  // namespace

Vec future_unit_normal(const MetricField& g, const Vec& x, const std::vector<Vec>& frame,
                       int side) {
  const int n = g.dim;
  // covector c_a = +- det of the (n-1)x(n-1) minor dropping column a
  Vec c(n);
  for (int a = 0; a < n; ++a) {
    Mat minor(n - 1);
    for (int r = 0; r < n - 1; ++r) {
      int cc = 0;
      for (int col = 0; col < n; ++col) {
        if (col == a) continue;
        minor(r, cc++) = frame[r][col];
      }
    }
    c[a] = ((a % 2) == 0 ? 1.0 : -1.0) * det(minor);
  }
  Mat ginv = inverse_cofactor(g.g_at(x, side));
  Vec N = matvec(ginv, c);
  Mat gm = g.g_at(x, side);
  double nn = qform(gm, N);
  if (!(nn < 0)) throw Error("future_unit_normal: normal is not timelike (slab inadmissible)");
  N = (1.0 / std::sqrt(-nn)) * N;
  Vec T = g.time_orientation ? g.time_orientation(x) : Vec(n);
  if (norm_euclid(T) == 0) T[0] = 1.0, T.n = n;
  if (qform(gm, N, T) > 0) N = -1.0 * N;
  return N;
}

namespace {

int side_of(const MetricField& g, const Vec& x) {
  if (!g.kink) return 0;
  double d = x[g.kink->axis] - g.kink->value;
  return d > 0 ? 1 : (d < 0 ? -1 : 1);
}

// H at a slab point given position, frame, second derivatives of the leaf map
double mean_curvature_value(const MetricField& g, const Vec& x, const std::vector<Vec>& frame,
                            const std::vector<Vec>& second, int side) {
  const int n = g.dim;
  Mat gm = g.g_at(x, side);
  Vec N = future_unit_normal(g, x, frame, side);
  Mat G(n - 1);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) G(i, j) = qform(gm, frame[i], frame[j]);
  if (!cholesky_posdef(G)) throw Error("mean_curvature_value: induced metric not Riemannian");
  Mat Ginv = inverse_cofactor(G);
  Ten3 gam = christoffel_at(g, x, side);
  double H = 0;
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) {
      // nabla_{X_i} X_j = d2 Phi/dx_i dx_j + Gamma(X_i, X_j)
      Vec cov = second[i * (n - 1) + j];
      for (int c = 0; c < n; ++c) {
        double s = 0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += gam(c, a, b) * frame[i][a] * frame[j][b];
        cov[c] += s;
      }
      H -= Ginv(i, j) * qform(gm, cov, N);
    }
  return H;
}

}  // namespace

SlabData build_slab(const MetricField& g, const HypersurfaceSpec& sigma, const FlowField& X,
                    double halfwidth, int leaves) {
  SlabData slab;
  slab.metric = g;
  slab.sigma = sigma;
  slab.flow = X;
  slab.halfwidth = halfwidth;
  const int n = g.dim;
  std::vector<std::pair<double, double>> bounds = {{-halfwidth, halfwidth}};
  std::vector<int> res = {leaves};
  for (size_t i = 0; i < sigma.spatial_bounds.size(); ++i) {
    bounds.push_back(sigma.spatial_bounds[i]);
    res.push_back(sigma.spatial_resolution[i]);
  }
  slab.param_grid = make_grid(bounds, res);
  const Grid& pg = slab.param_grid;
  const std::int64_t np = pg.npoints();
  slab.positions.resize(np);
  slab.frames.resize(np);
  slab.normals.resize(np);

  for_each_index(pg, IndexBox::full(pg), [&](const std::array<int, kMaxDim>& idx) {
    double s = pg.coord(0, idx[0]);
    Vec xs(n - 1);
    for (int a = 1; a < n; ++a) xs[a - 1] = pg.coord(a, idx[a]);
    slab.positions[pg.flat(idx)] = flow_rk4(X, base_point(sigma, xs, n), s);
  });

  // frames: FD Jacobian of the leaf map over the base spatial lattice
  slab.admissible = true;
  for_each_index(pg, IndexBox::full(pg), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = pg.flat(idx);
    std::vector<Vec> frame(n - 1);
    for (int a = 1; a < n; ++a) {
      double h = pg.spacing(a);
      auto ip = idx, im = idx;
      if (idx[a] == 0) {
        ip[a] = 1;
        frame[a - 1] = (1.0 / h) * (slab.positions[pg.flat(ip)] - slab.positions[fp]);
      } else if (idx[a] == pg.res[a] - 1) {
        im[a] = idx[a] - 1;
        frame[a - 1] = (1.0 / h) * (slab.positions[fp] - slab.positions[pg.flat(im)]);
      } else {
        ip[a] = idx[a] + 1;
        im[a] = idx[a] - 1;
        frame[a - 1] =
            (0.5 / h) * (slab.positions[pg.flat(ip)] - slab.positions[pg.flat(im)]);
      }
    }
    slab.frames[fp] = frame;
    const Vec& x = slab.positions[fp];
    int side = side_of(g, x);
    try {
      Vec N = future_unit_normal(g, x, frame, side);
      slab.normals[fp] = N;
      Mat gm = g.g_at(x, side);
      slab.max_normal_norm_err =
          std::max(slab.max_normal_norm_err, std::abs(qform(gm, N) + 1.0));
      for (int i = 0; i < n - 1; ++i)
        slab.max_orthogonality_err =
            std::max(slab.max_orthogonality_err, std::abs(qform(gm, N, frame[i])));
      Mat G(n - 1);
      for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j) G(i, j) = qform(gm, frame[i], frame[j]);
      if (!cholesky_posdef(G)) {
        slab.admissible = false;
        slab.audit_note = "induced metric not positive definite on a leaf";
      }
    } catch (const Error& e) {
      slab.admissible = false;
      slab.audit_note = e.what();
    }
  });
  if (slab.max_normal_norm_err > 1e-8 || slab.max_orthogonality_err > 1e-8) {
    slab.admissible = false;
    slab.audit_note = "normal audit beyond 1e-8";
  }
  return slab;
}

SlabMeanCurvature slab_mean_curvature(const MetricField& g, const SlabData& slab) {
  if (!slab.admissible) throw Error("slab_mean_curvature: inadmissible slab: " + slab.audit_note);
  const Grid& pg = slab.param_grid;
  const int n = g.dim;
  SlabMeanCurvature out;
  out.H = make_field(pg, 0, 0, false);
  out.included.assign(static_cast<size_t>(pg.npoints()), 1);
  out.esssup = -std::numeric_limits<double>::infinity();
  out.essinf = std::numeric_limits<double>::infinity();

  for_each_index(pg, IndexBox::full(pg), [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = pg.flat(idx);
    const Vec& x = slab.positions[fp];
    // second derivatives of the leaf map over the spatial lattice
    std::vector<Vec> second((n - 1) * (n - 1), Vec(n));
    for (int a = 1; a < n; ++a)
      for (int b = a; b < n; ++b) {
        double ha = pg.spacing(a), hb = pg.spacing(b);
        auto clampidx = [&](int axis, int i) { return std::clamp(i, 0, pg.res[axis] - 1); };
        Vec d2(n);
        if (a == b) {
          int i = std::clamp(idx[a], 1, pg.res[a] - 2);
          auto i0 = idx, i1 = idx, i2 = idx;
          i0[a] = i - 1;
          i1[a] = i;
          i2[a] = i + 1;
          d2 = (1.0 / (ha * ha)) *
               ((slab.positions[pg.flat(i2)] - slab.positions[pg.flat(i1)]) -
                (slab.positions[pg.flat(i1)] - slab.positions[pg.flat(i0)]));
        } else {
          auto pp = idx, pm = idx, mp = idx, mm = idx;
          pp[a] = clampidx(a, idx[a] + 1);
          pp[b] = clampidx(b, idx[b] + 1);
          pm[a] = clampidx(a, idx[a] + 1);
          pm[b] = clampidx(b, idx[b] - 1);
          mp[a] = clampidx(a, idx[a] - 1);
          mp[b] = clampidx(b, idx[b] + 1);
          mm[a] = clampidx(a, idx[a] - 1);
          mm[b] = clampidx(b, idx[b] - 1);
          double da = (pp[a] - mp[a]) * ha, db = (pp[b] - pm[b]) * hb;
          if (da > 0 && db > 0)
            d2 = (1.0 / (da * db)) *
                 ((slab.positions[pg.flat(pp)] - slab.positions[pg.flat(pm)]) -
                  (slab.positions[pg.flat(mp)] - slab.positions[pg.flat(mm)]));
        }
        second[(a - 1) * (n - 1) + (b - 1)] = d2;
        second[(b - 1) * (n - 1) + (a - 1)] = d2;
      }
    int side = side_of(g, x);
    if (g.kink && std::abs(x[g.kink->axis] - g.kink->value) < 1e-12) {
      out.included[fp] = 0;  // exact kink hit: excluded from the esssup
      out.H.at(fp, 0) = 0.0;
      return;
    }
    double H = mean_curvature_value(g, x, slab.frames[fp], second, side);
    out.H.at(fp, 0) = H;
    out.esssup = std::max(out.esssup, H);
    out.essinf = std::min(out.essinf, H);
  });
  return out;
}

double slab_H_at(const MetricField& g, const HypersurfaceSpec& sigma, const FlowField& X,
                 const Vec& p, int side) {
  const int n = g.dim;
  // flow back to Sigma: find s with (flow_{-s} p) on the graph
  auto t_defect = [&](double s) {
    Vec y = flow_rk4(X, p, -s);
    Vec xs(n - 1);
    for (int a = 1; a < n; ++a) xs[a - 1] = y[a];
    return y[0] - sigma.phi(xs);
  };
  double s_lo = -2.0, s_hi = 2.0;
  double f_lo = t_defect(s_lo), f_hi = t_defect(s_hi);
  if (f_lo * f_hi > 0) throw Error("slab_H_at: point not in the flow-out range");
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (s_lo + s_hi);
    double fm = t_defect(mid);
    if (f_lo * fm <= 0) {
      s_hi = mid;
      f_hi = fm;
    } else {
      s_lo = mid;
      f_lo = fm;
    }
  }
  double s = 0.5 * (s_lo + s_hi);
  Vec base = flow_rk4(X, p, -s);
  Vec xs(n - 1);
  for (int a = 1; a < n; ++a) xs[a - 1] = base[a];

  // local FD stencil flows around the base point
  const double h = 1e-4;
  auto leaf_point = [&](const Vec& spatial) {
    return flow_rk4(X, base_point(sigma, spatial, n), s);
  };
  std::vector<Vec> frame(n - 1);
  std::vector<Vec> second((n - 1) * (n - 1), Vec(n));
  for (int i = 0; i < n - 1; ++i) {
    Vec xp = xs, xm = xs;
    xp[i] += h;
    xm[i] -= h;
    frame[i] = (0.5 / h) * (leaf_point(xp) - leaf_point(xm));
  }
  Vec center = leaf_point(xs);
  for (int i = 0; i < n - 1; ++i)
    for (int j = i; j < n - 1; ++j) {
      Vec d2(n);
      if (i == j) {
        Vec xp = xs, xm = xs;
        xp[i] += h;
        xm[i] -= h;
        d2 = (1.0 / (h * h)) * ((leaf_point(xp) - center) - (center - leaf_point(xm)));
      } else {
        Vec pp = xs, pm = xs, mp = xs, mm = xs;
        pp[i] += h;
        pp[j] += h;
        pm[i] += h;
        pm[j] -= h;
        mp[i] -= h;
        mp[j] += h;
        mm[i] -= h;
        mm[j] -= h;
        d2 = (0.25 / (h * h)) * ((leaf_point(pp) - leaf_point(pm)) - (leaf_point(mp) - leaf_point(mm)));
      }
      second[i * (n - 1) + j] = d2;
      second[j * (n - 1) + i] = d2;
    }
  int s_side = side != 0 ? side : side_of(g, center);
  return mean_curvature_value(g, center, frame, second, s_side);
}

MeanBoundReport mean_bound_check(const MetricField& g, const HypersurfaceSpec& sigma, double b,
                                 const std::vector<FlowField>& fields,
                                 const std::vector<double>& halfwidths) {
  if (fields.size() < 2) throw Error("mean_bound_check: need at least 2 flow fields");
  MeanBoundReport rep;
  rep.halfwidths = halfwidths;
  double w0 = halfwidths.front();
  std::vector<SlabData> slabs;
  for (const auto& X : fields) slabs.push_back(build_slab(g, sigma, X, w0, 9));
  for (const auto& slab : slabs) {
    auto smc = slab_mean_curvature(g, slab);
    rep.esssup_per_field.push_back(smc.esssup);
  }
  rep.pass = true;
  for (double e : rep.esssup_per_field)
    if (!(e < b)) rep.pass = false;

  // cross-field discrepancy on shrinking slabs, probed at the first slab's points
  for (double w : halfwidths) {
    double sup = 0;
    const Grid& pg = slabs[0].param_grid;
    for_each_index(pg, IndexBox::full(pg), [&](const std::array<int, kMaxDim>& idx) {
      double s = pg.coord(0, idx[0]);
      if (std::abs(s) > w) return;
      const Vec& p = slabs[0].positions[pg.flat(idx)];
      if (g.kink && std::abs(p[g.kink->axis] - g.kink->value) < 1e-9) return;
      double h0 = slab_H_at(g, sigma, fields[0], p);
      double h1 = slab_H_at(g, sigma, fields[1], p);
      sup = std::max(sup, std::abs(h0 - h1));
    });
    rep.discrepancy.push_back(sup);
  }
  return rep;
}

MeanConvergenceReport mean_curvature_convergence(const SpacetimeModel& model,
                                                 const RegularizedFamily& family,
                                                 const HypersurfaceSpec& sigma,
                                                 double sub_halfwidth) {
  if (!model.known.mean_curvature_of_t)
    throw Error("mean_curvature_convergence: model has no certified H(t)");
  const int n = model.dim;
  // H(t) of the raw metric as a side-correct piecewise profile
  auto H = model.known.mean_curvature_of_t;
  Piecewise1D rawH;
  if (model.metric.kink) {
    double kv = model.metric.kink->value;
    rawH.breaks = {kv};
    Piece left, right;
    left.v = [H, kv](double t) { return H(std::min(t, kv - 1e-300)); };
    right.v = [H, kv](double t) { return H(std::max(t, kv + 1e-300)); };
    left.d1 = right.d1 = [](double) { return 0.0; };   // unused: values only
    left.d2 = right.d2 = [](double) { return 0.0; };
    rawH.pieces = {left, right};
  } else {
    rawH = single_piece(H, [](double) { return 0.0; }, [](double) { return 0.0; });
  }

  MeanConvergenceReport rep;
  FlowField X = coordinate_time_flow(n);
  Marginal1D marg = make_marginal(family.profile, n);
  for (size_t k = 0; k < family.schedule.size(); ++k) {
    double eps = family.schedule[k];
    Piecewise1D Hconv = convolve_piecewise(rawH, marg, eps);
    SlabData slab = build_slab(family.inner[k], sigma, X, sub_halfwidth, 9);
    auto smc = slab_mean_curvature(family.inner[k], slab);
    double sup = 0;
    const Grid& pg = slab.param_grid;
    for_each_index(pg, IndexBox::full(pg), [&](const std::array<int, kMaxDim>& idx) {
      std::int64_t fp = pg.flat(idx);
      if (!smc.included[fp]) return;
      double t = slab.positions[fp][0];
      sup = std::max(sup, std::abs(smc.H.at(fp, 0) - Hconv.v(t)));
    });
    rep.eps.push_back(eps);
    rep.sup_diff.push_back(sup);
    rep.esssup_k.push_back(smc.esssup);
  }
  rep.decreasing = true;
  for (size_t k = 0; k + 1 < rep.sup_diff.size(); ++k)
    if (rep.sup_diff[k + 1] > rep.sup_diff[k] * 1.05 + 1e-12) rep.decreasing = false;
  rep.final_over_initial =
      rep.sup_diff.empty() || rep.sup_diff.front() == 0
          ? 0
          : rep.sup_diff.back() / rep.sup_diff.front();
  return rep;
}

}  // namespace liplab

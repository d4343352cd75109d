#include "liplab/mollifier.hpp"

#include <algorithm>
#include <cmath>

namespace liplab {

Profile profile_from_name(const std::string& name) {
  if (name == "standard_bump") return Profile::standard_bump;
  if (name == "polynomial_bump") return Profile::polynomial_bump;
  throw Error("unknown mollifier profile: " + name);
}

std::string profile_name(Profile p) {
  return p == Profile::standard_bump ? "standard_bump" : "polynomial_bump";
}

double profile_value(Profile p, double r) {
  r = std::abs(r);
  if (r >= 1.0) return 0.0;
  switch (p) {
    case Profile::standard_bump:
      return std::exp(1.0 / (r * r - 1.0));
    case Profile::polynomial_bump: {
      double w = 1.0 - r * r;
      return w * w * w * w;
    }
  }
  return 0.0;
}

double profile_deriv(Profile p, double r) {
  double sign = r < 0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r >= 1.0) return 0.0;
  switch (p) {
    case Profile::standard_bump: {
      double d = r * r - 1.0;
      return sign * std::exp(1.0 / d) * (-2.0 * r / (d * d));
    }
    case Profile::polynomial_bump: {
      double w = 1.0 - r * r;
      return sign * 4.0 * w * w * w * (-2.0 * r);
    }
  }
  return 0.0;
}

// ---- Gauss-Legendre nodes ----

namespace {

struct GL {
  std::vector<double> x, w;  // on [-1,1]
};

// Newton iteration on Legendre polynomials; computed once per order.
const GL& gauss_legendre(int npts) {
  static GL cache[64];
  GL& gl = cache[npts];
  if (!gl.x.empty()) return gl;
  gl.x.resize(npts);
  gl.w.resize(npts);
  for (int i = 0; i < npts; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (npts + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= npts; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = npts * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= npts; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = npts * (x * p1 - p0) / (x * x - 1.0);
    gl.x[i] = x;
    gl.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int npts) {
  const GL& gl = gauss_legendre(npts);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < npts; ++i) s += gl.w[i] * f(mid + half * gl.x[i]);
  return s * half;
}

// adaptive-ish composite GL: fixed panel count, enough for bump-smooth integrands
double panel_integrate(const std::function<double(double)>& f, double a, double b, int panels,
                       int npts = 32) {
  double s = 0;
  for (int k = 0; k < panels; ++k) {
    double pa = a + (b - a) * k / panels, pb = a + (b - a) * (k + 1) / panels;
    s += gl_integrate(f, pa, pb, npts);
  }
  return s;
}

double sphere_area(int d) {  // surface area of S^{d-1}
  // d=1: two points -> 2; d=2: 2*pi; d=3: 4*pi
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace

// ---- Marginal1D ----

struct Marginal1D::Table {
  int npts = 0;
  double h = 0;                 // node spacing on [-1,1]
  std::vector<double> y;        // values at nodes
  std::vector<double> y2;       // second derivatives (natural/clamped spline)
  double abs_d1 = 0;            // int |m'|
  std::array<double, 8> mom{};  // moments int u^k m
  std::array<double, 8> amom{};  // absolute moments int |u|^k m

  double eval(double u, int deriv) const {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    double s = (u + 1.0) / h;
    int i = std::min(static_cast<int>(s), npts - 2);
    double a = (i + 1) - s, b = s - i;
    double ya = y[i], yb = y[i + 1], y2a = y2[i], y2b = y2[i + 1];
    if (deriv == 0)
      return a * ya + b * yb +
             ((a * a * a - a) * y2a + (b * b * b - b) * y2b) * (h * h) / 6.0;
    if (deriv == 1)
      return (yb - ya) / h - (3 * a * a - 1) / 6.0 * h * y2a + (3 * b * b - 1) / 6.0 * h * y2b;
    return a * y2a + b * y2b;
  }
};

namespace {

std::shared_ptr<const Marginal1D::Table> build_marginal_table(Profile p, int chart_dim) {
  auto tab = std::make_shared<Marginal1D::Table>();
  const int N = 4097;
  tab->npts = N;
  tab->h = 2.0 / (N - 1);
  tab->y.resize(N);

  // normalization of the n-dim radial kernel: c * int phi(|x|) dx = 1
  int n = chart_dim;
  double radial = panel_integrate(
      [&](double r) { return profile_value(p, r) * std::pow(r, n - 1); }, 0.0, 1.0, 8);
  double c = 1.0 / (sphere_area(n) * radial);

  for (int i = 0; i < N; ++i) {
    double u = -1.0 + i * tab->h;
    double au = std::abs(u);
    if (au >= 1.0) {
      tab->y[i] = 0.0;
      continue;
    }
    if (n == 1) {
      tab->y[i] = c * profile_value(p, au);
    } else {
      // integrate over the transverse (n-1)-ball cross-section
      double rmax = std::sqrt(1.0 - au * au);
      double v = panel_integrate(
          [&](double s) {
            return profile_value(p, std::sqrt(au * au + s * s)) * std::pow(s, n - 2);
          },
          0.0, rmax, 8);
      tab->y[i] = c * sphere_area(n - 1) * v;
    }
  }
  // symmetrize exactly and renormalize the table mass to 1
  for (int i = 0; i < N / 2; ++i) {
    double avg = 0.5 * (tab->y[i] + tab->y[N - 1 - i]);
    tab->y[i] = tab->y[N - 1 - i] = avg;
  }

  // clamped cubic spline with zero end slopes (all derivatives vanish at +-1)
  std::vector<double>& y2 = tab->y2;
  y2.assign(N, 0.0);
  std::vector<double> u(N, 0.0);
  double h = tab->h;
  y2[0] = -0.5;
  u[0] = (3.0 / h) * ((tab->y[1] - tab->y[0]) / h - 0.0);
  for (int i = 1; i < N - 1; ++i) {
    double sig = 0.5;
    double pp = sig * y2[i - 1] + 2.0;
    y2[i] = (sig - 1.0) / pp;
    double dd = (tab->y[i + 1] - 2 * tab->y[i] + tab->y[i - 1]) / h;
    u[i] = (6.0 * dd / (2 * h) - sig * u[i - 1]) / pp;
  }
  double qn = 0.5, un = (3.0 / h) * (0.0 - (tab->y[N - 1] - tab->y[N - 2]) / h);
  y2[N - 1] = (un - qn * u[N - 2]) / (qn * y2[N - 2] + 1.0);
  for (int i = N - 2; i >= 0; --i) y2[i] = y2[i] * y2[i + 1] + u[i];

  // renormalize so the spline's exact mass is 1
  double mass = 0;
  for (int i = 0; i + 1 < N; ++i) {
    // exact integral of the cubic segment
    mass += h * 0.5 * (tab->y[i] + tab->y[i + 1]) - h * h * h / 24.0 * (y2[i] + y2[i + 1]);
  }
  for (int i = 0; i < N; ++i) {
    tab->y[i] /= mass;
    tab->y2[i] /= mass;
  }

  tab->abs_d1 = panel_integrate([&](double uu) { return std::abs(tab->eval(uu, 1)); }, -1.0, 1.0,
                                16);
  for (int k = 0; k < 8; ++k) {
    tab->mom[k] = panel_integrate(
        [&](double uu) { return std::pow(uu, k) * tab->eval(uu, 0); }, -1.0, 1.0, 16);
    tab->amom[k] = panel_integrate(
        [&](double uu) { return std::pow(std::abs(uu), k) * tab->eval(uu, 0); }, -1.0, 1.0, 16);
  }
  return tab;
}

}  // namespace

double Marginal1D::value(double u) const { return table->eval(u, 0); }
double Marginal1D::deriv(double u) const { return table->eval(u, 1); }
double Marginal1D::abs_deriv_mass() const { return table->abs_d1; }
double Marginal1D::moment(int k) const { return table->mom[k]; }
double Marginal1D::abs_moment(int k) const { return table->amom[k]; }

Marginal1D make_marginal(Profile p, int chart_dim) {
  Marginal1D m;
  m.profile = p;
  m.chart_dim = chart_dim;
  m.table = build_marginal_table(p, chart_dim);
  return m;
}

// ---- MollifierKernel ----

MollifierKernel make_kernel(Profile p, double epsilon, const Grid& g) {
  if (!(epsilon > 0)) throw Error("make_kernel: epsilon must be positive");
  if (epsilon < 4.0 * g.max_spacing())
    throw Error("make_kernel: under-resolved epsilon (< 4 cells); eps=" +
                std::to_string(epsilon) + " h_max=" + std::to_string(g.max_spacing()));
  MollifierKernel k;
  k.profile = p;
  k.epsilon = epsilon;
  k.chart_dim = g.dim;
  k.grid = g;
  k.marginal = make_marginal(p, g.dim);
  for (int a = 0; a < g.dim; ++a)
    k.halfwidth[a] = static_cast<int>(std::floor(epsilon / g.spacing(a)));

  // full radial stencil, renormalized after sampling
  std::array<int, kMaxDim> idx{};
  double total = 0;
  std::function<void(int)> rec = [&](int axis) {
    if (axis == g.dim) {
      double r2 = 0;
      for (int a = 0; a < g.dim; ++a) {
        double z = idx[a] * g.spacing(a);
        r2 += z * z;
      }
      double r = std::sqrt(r2) / epsilon;
      double w = profile_value(p, r);
      if (w > 0) {
        k.stencil.push_back({idx, w});
        total += w;
      }
      return;
    }
    for (int i = -k.halfwidth[axis]; i <= k.halfwidth[axis]; ++i) {
      idx[axis] = i;
      rec(axis + 1);
    }
  };
  rec(0);
  if (k.stencil.empty()) throw Error("make_kernel: empty stencil");
  for (auto& e : k.stencil) e.weight /= total;
  return k;
}

std::vector<double> MollifierKernel::axis_stencil(int axis) const {
  int hw = halfwidth[axis];
  double h = grid.spacing(axis);
  std::vector<double> w(2 * hw + 1, 0.0);
  double total = 0;
  for (int i = -hw; i <= hw; ++i) {
    double v = marginal.value(i * h / epsilon);
    w[i + hw] = v;
    total += v;
  }
  for (auto& x : w) x /= total;
  return w;
}

SampledField convolve(const SampledField& f, const MollifierKernel& k,
                      const std::vector<int>& axes) {
  const Grid& g = f.grid;
  if (g.dim != k.grid.dim) throw Error("convolve: grid dimension mismatch");
  for (int a = 0; a < g.dim; ++a)
    if (g.res[a] != k.grid.res[a] || g.lo[a] != k.grid.lo[a] || g.hi[a] != k.grid.hi[a])
      throw Error("convolve: field grid differs from kernel grid");

  SampledField out = make_field(g, f.rank_up, f.rank_down, f.symmetric);
  const int cc = f.comp_count();

  if (axes.empty()) {
    out.valid = f.valid;
    for (int a = 0; a < g.dim; ++a) {
      out.valid.lo[a] += k.halfwidth[a];
      out.valid.hi[a] -= k.halfwidth[a];
    }
    if (out.valid.empty(g.dim)) throw Error("convolve: valid region empty after shrink");
    for_each_index(g, IndexBox::full(g), [&](const std::array<int, kMaxDim>& idx) {
      std::int64_t fp = g.flat(idx);
      bool inside = out.valid.contains(idx, g.dim);
      if (!inside) {
        for (int c = 0; c < cc; ++c) out.at(fp, c) = f.at(fp, c);  // passthrough outside
        return;
      }
      std::array<int, kMaxDim> src{};
      for (int c = 0; c < cc; ++c) {
        double acc = 0;
        for (const auto& e : k.stencil) {
          for (int a = 0; a < g.dim; ++a) src[a] = idx[a] - e.offset[a];
          acc += e.weight * f.at(g.flat(src), c);
        }
        out.at(fp, c) = acc;
      }
    });
    return out;
  }

  // axis-subset convolution with the 1D marginal, applied sequentially
  SampledField cur = f;
  for (int axis : axes) {
    if (axis < 0 || axis >= g.dim) throw Error("convolve: axis out of range");
    auto w = k.axis_stencil(axis);
    int hw = k.halfwidth[axis];
    SampledField next = make_field(g, f.rank_up, f.rank_down, f.symmetric);
    next.valid = cur.valid;
    next.valid.lo[axis] += hw;
    next.valid.hi[axis] -= hw;
    if (next.valid.empty(g.dim)) throw Error("convolve: valid region empty after shrink");
    std::int64_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= g.res[a];
    for_each_index(g, IndexBox::full(g), [&](const std::array<int, kMaxDim>& idx) {
      std::int64_t fp = g.flat(idx);
      bool inside = idx[axis] >= next.valid.lo[axis] && idx[axis] <= next.valid.hi[axis];
      for (int c = 0; c < cc; ++c) {
        if (!inside) {
          next.at(fp, c) = cur.at(fp, c);
          continue;
        }
        double acc = 0;
        for (int i = -hw; i <= hw; ++i) acc += w[i + hw] * cur.at(fp - i * stride, c);
        next.at(fp, c) = acc;
      }
    });
    cur = std::move(next);
  }
  return cur;
}

// ---- Piecewise1D ----

int Piecewise1D::piece_index(double t, int side) const {
  int i = 0;
  for (double b : breaks) {
    if (t > b || (t == b && side >= 0)) ++i;
    else break;
  }
  return i;
}
double Piecewise1D::v(double t, int side) const { return pieces[piece_index(t, side)].v(t); }
double Piecewise1D::d1(double t, int side) const { return pieces[piece_index(t, side)].d1(t); }
double Piecewise1D::d2(double t, int side) const { return pieces[piece_index(t, side)].d2(t); }

Piecewise1D polynomial_pieces(const std::vector<double>& breaks,
                              const std::vector<std::vector<double>>& coeffs) {
  if (coeffs.size() != breaks.size() + 1)
    throw Error("polynomial_pieces: need breaks.size()+1 coefficient lists");
  Piecewise1D q;
  q.breaks = breaks;
  for (const auto& c : coeffs) {
    Piece p;
    p.v = [c](double t) {
      double s = 0;
      for (size_t k = c.size(); k-- > 0;) s = s * t + c[k];
      return s;
    };
    p.d1 = [c](double t) {
      double s = 0;
      for (size_t k = c.size(); k-- > 1;) s = s * t + k * c[k];
      return s;
    };
    p.d2 = [c](double t) {
      double s = 0;
      for (size_t k = c.size(); k-- > 2;) s = s * t + k * (k - 1) * c[k];
      return s;
    };
    q.pieces.push_back(std::move(p));
  }
  return q;
}

Piecewise1D single_piece(std::function<double(double)> v, std::function<double(double)> d1,
                         std::function<double(double)> d2) {
  Piecewise1D q;
  q.pieces.push_back({std::move(v), std::move(d1), std::move(d2)});
  return q;
}

Piecewise1D convolve_piecewise(const Piecewise1D& q, const Marginal1D& m, double eps) {
  if (!(eps > 0)) throw Error("convolve_piecewise: eps must be positive");
  // capture by value; the returned callables own everything they need
  auto qq = std::make_shared<Piecewise1D>(q);
  auto mm = std::make_shared<Marginal1D>(m);
  double e = eps;

  // jump data at each break: [q], [q']
  struct Jump {
    double s, dv, dd1;
  };
  auto jumps = std::make_shared<std::vector<Jump>>();
  for (size_t i = 0; i < q.breaks.size(); ++i) {
    double s = q.breaks[i];
    jumps->push_back({s, q.pieces[i + 1].v(s) - q.pieces[i].v(s),
                      q.pieces[i + 1].d1(s) - q.pieces[i].d1(s)});
  }

  // (q^(d) * m_eps)(t) as a sum of per-subinterval GL quadratures in u,
  // where q^(d) is evaluated piecewise; subinterval cuts at u=(t - s_i)/eps.
  auto base = [qq, mm, e](double t, int dorder) {
    std::vector<double> cuts = {-1.0, 1.0};
    for (double s : qq->breaks) {
      double u = (t - s) / e;
      if (u > -1.0 && u < 1.0) cuts.push_back(u);
    }
    std::sort(cuts.begin(), cuts.end());
    const GL& gl = gauss_legendre(32);
    double acc = 0;
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
      double a = cuts[k], b = cuts[k + 1];
      if (b - a < 1e-15) continue;
      double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      // which piece does this u-range map to?  pick the midpoint
      int pi = qq->piece_index(t - e * mid);
      const Piece& pc = qq->pieces[pi];
      double s = 0;
      for (size_t i = 0; i < gl.x.size(); ++i) {
        double u = mid + half * gl.x[i];
        double w = gl.w[i] * mm->value(u);
        double x = t - e * u;
        s += w * (dorder == 0 ? pc.v(x) : dorder == 1 ? pc.d1(x) : pc.d2(x));
      }
      acc += s * half;
    }
    return acc;
  };

  Piece p;
  p.v = [base](double t) { return base(t, 0); };
  // (q*m)' = q' * m + sum [q](s_i) m_eps(t - s_i)
  p.d1 = [base, jumps, mm, e](double t) {
    double s = base(t, 1);
    for (const auto& j : *jumps) s += j.dv * mm->value((t - j.s) / e) / e;
    return s;
  };
  p.d2 = [base, jumps, mm, e](double t) {
    double s = base(t, 2);
    for (const auto& j : *jumps) {
      s += j.dd1 * mm->value((t - j.s) / e) / e;
      s += j.dv * mm->deriv((t - j.s) / e) / (e * e);
    }
    return s;
  };
  Piecewise1D out;
  out.pieces.push_back(std::move(p));
  return out;
}

}  // namespace liplab

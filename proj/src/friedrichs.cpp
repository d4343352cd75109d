#include "liplab/friedrichs.hpp"

#include <algorithm>
#include <cmath>

#include "liplab/curvature.hpp"

namespace liplab {

namespace {

std::vector<double> default_sched(const std::vector<double>& s) {
  return s.empty() ? default_schedule() : s;
}

}  // namespace

FriedrichsCase kink_case(int resolution, const std::vector<double>& schedule) {
  FriedrichsCase c;
  c.grid = make_grid({{-1.0, 1.0}}, {resolution});
  c.a = sample_scalar([](const Vec& x) { return std::abs(x[0]); }, c.grid);
  c.f = sample_scalar([](const Vec& x) { return x[0] >= 0 ? 1.0 : -1.0; }, c.grid);
  c.schedule = default_sched(schedule);
  c.K = trust_region(c.grid, c.schedule.front(), 2);
  c.lip_a = 1.0;
  c.mode = AEpsMode::frozen;
  return c;
}

FriedrichsCase two_slope_case(double m1, double m2, int resolution,
                              const std::vector<double>& schedule) {
  SpacetimeModel model = make_grw_two_slope(4, m1, m2);
  FriedrichsCase c;
  // stay clear of the singularity at 1/m2
  double tmax = 0.75 / m2;
  c.grid = make_grid({{-tmax, tmax}}, {resolution});
  auto a_of_t = model.known.scale_a;
  c.a = sample_scalar(
      [a_of_t](const Vec& x) { return 1.0 / (a_of_t(x[0]) * a_of_t(x[0])); }, c.grid);
  // f = xi * d_t g_xx = xi * (a^2)' with a smooth bump cutoff xi
  double cut = 0.8 * tmax;
  auto xi = [cut](double t) {
    double r = t / cut;
    return std::abs(r) >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - r * r));
  };
  auto da = model.known.scale_da;
  c.f = sample_scalar(
      [a_of_t, da, xi](const Vec& x) { return xi(x[0]) * 2.0 * a_of_t(x[0]) * da(x[0]); },
      c.grid);
  c.schedule = default_sched(schedule);
  c.K = trust_region(c.grid, c.schedule.front(), 2);
  // Lip of 1/a^2 on K': |2 a' / a^3| <= 2 m2 / a_min^3
  double amin = a_of_t(tmax);
  c.lip_a = 2.0 * m2 / (amin * amin * amin);
  c.mode = AEpsMode::true_inverse;
  const Piecewise1D b_prof = model.metric.analytic->profiles[0].second;
  Grid grid = c.grid;
  c.true_inverse_provider = [b_prof, grid](double eps) {
    Marginal1D m = make_marginal(Profile::standard_bump, grid.dim);
    Piecewise1D b_eps = convolve_piecewise(b_prof, m, eps);
    return sample_scalar([&b_eps](const Vec& x) { return 1.0 / b_eps.v(x[0]); }, grid);
  };
  return c;
}

namespace {

SampledField a_eps_field(const FriedrichsCase& c, double eps, const MollifierKernel& kernel) {
  switch (c.mode) {
    case AEpsMode::frozen:
      return c.a;
    case AEpsMode::mollified:
      return convolve(c.a, kernel);
    case AEpsMode::true_inverse:
      if (!c.true_inverse_provider)
        throw Error("friedrichs: true_inverse mode needs a metric-derived provider");
      return c.true_inverse_provider(eps);
  }
  throw Error("friedrichs: bad mode");
}

}  // namespace

Commutator0Result commutator0(const FriedrichsCase& c, double eps) {
  MollifierKernel kernel = make_kernel(c.profile, eps, c.grid);
  SampledField aeps = a_eps_field(c, eps, kernel);
  SampledField f_conv = convolve(c.f, kernel);
  SampledField af = c.a;
  for (std::int64_t p = 0; p < c.grid.npoints(); ++p) af.at(p, 0) = c.a.at(p, 0) * c.f.at(p, 0);
  SampledField af_conv = convolve(af, kernel);
  Commutator0Result r;
  r.field = f_conv;
  for (std::int64_t p = 0; p < c.grid.npoints(); ++p)
    r.field.at(p, 0) = aeps.at(p, 0) * f_conv.at(p, 0) - af_conv.at(p, 0);
  r.field.valid = af_conv.valid;
  r.sup = lp_norm(r.field, c.K, 0);
  double fsup = 0;
  for_each_index(c.grid, c.f.valid, [&](const std::array<int, kMaxDim>& idx) {
    fsup = std::max(fsup, std::abs(c.f.at(c.grid.flat(idx), 0)));
  });
  r.bound = c.lip_a * eps * fsup;
  return r;
}

SampledField commutator1_field(const FriedrichsCase& c, double eps, int axis) {
  Commutator0Result r = commutator0(c, eps);
  SampledField d = fd_partial(r.field, axis, FdScheme::central2);
  d.valid = r.field.valid;
  return d;
}

double NormReport::final_over_initial(int ip) const {
  if (lp.empty() || lp.front()[ip] == 0) return 0;
  return lp.back()[ip] / lp.front()[ip];
}
bool NormReport::monotone_decreasing(int ip, double uptick_tol) const {
  for (size_t k = 0; k + 1 < lp.size(); ++k)
    if (lp[k + 1][ip] > lp[k][ip] * uptick_tol + 1e-15) return false;
  return true;
}
double NormReport::linf_median() const {
  std::vector<double> v = linf;
  std::sort(v.begin(), v.end());
  return v.empty() ? 0 : v[v.size() / 2];
}
bool NormReport::linf_bounded(double factor) const {
  double med = linf_median();
  for (double v : linf)
    if (v > factor * med + 1e-15) return false;
  return true;
}

NormReport commutator1_sweep(const FriedrichsCase& c, int axis) {
  NormReport rep;
  rep.schedule = c.schedule;
  rep.p_list = c.p_list;
  for (double eps : c.schedule) {
    SampledField d = commutator1_field(c, eps, axis);
    std::vector<double> row;
    for (double p : c.p_list) row.push_back(lp_norm(d, c.K, p));
    rep.lp.push_back(row);
    rep.linf.push_back(lp_norm(d, c.K, 0));
  }
  return rep;
}

std::pair<double, double> kernel_mass(const FriedrichsCase& c, double eps, int axis) {
  if (c.grid.dim != 1 || axis != 0)
    throw Error("kernel_mass: implemented for 1D cases");
  Marginal1D m = make_marginal(c.profile, 1);
  SampledField da = fd_partial(c.a, 0, FdScheme::central2);
  const Grid& g = c.grid;
  const int n = g.res[0];
  const double h = g.spacing(0);
  const int hw = static_cast<int>(std::floor(eps / h));

  auto kval = [&](int ix, int iy) {
    double x = g.coord(0, ix), y = g.coord(0, iy);
    double u = (x - y) / eps;
    double rho = m.value(u) / eps;
    double drho = m.deriv(u) / (eps * eps);
    return da.at(ix, 0) * rho + (c.a.at(ix, 0) - c.a.at(iy, 0)) * drho;
  };
  // max over y of int_K |k| dx
  double mass_x = 0;
  for (int iy = 0; iy < n; ++iy) {
    double acc = 0;
    int xlo = std::max(c.K.lo[0], iy - hw), xhi = std::min(c.K.hi[0], iy + hw);
    for (int ix = xlo; ix <= xhi; ++ix) {
      double w = (ix == c.K.lo[0] || ix == c.K.hi[0]) ? 0.5 : 1.0;
      acc += w * std::abs(kval(ix, iy));
    }
    mass_x = std::max(mass_x, acc * h);
  }
  // max over x in K of int |k| dy
  double mass_y = 0;
  for (int ix = c.K.lo[0]; ix <= c.K.hi[0]; ++ix) {
    double acc = 0;
    int ylo = std::max(0, ix - hw), yhi = std::min(n - 1, ix + hw);
    for (int iy = ylo; iy <= yhi; ++iy) {
      double w = (iy == 0 || iy == n - 1) ? 0.5 : 1.0;
      acc += w * std::abs(kval(ix, iy));
    }
    mass_y = std::max(mass_y, acc * h);
  }
  return {mass_x, mass_y};
}

double kernel_mass_bound(const FriedrichsCase& c) {
  Marginal1D m = make_marginal(c.profile, 1);
  return (1.0 + m.abs_deriv_mass()) * c.lip_a;
}

// ---- Ricci commutators on catalog models ----

namespace {

struct ConvolvedRicci {
  // Ric[g] conv rho_eps as a function of the variation coordinate
  std::vector<std::pair<Mat, Piecewise1D>> reg_terms;  // convolved regular part
  Mat constant_part;
  std::optional<Mat> delta_coeff;
  double kink = 0;
  Marginal1D marginal;
  double eps = 0;

  Mat eval(double t) const {
    Mat out = constant_part;
    for (const auto& [basis, prof] : reg_terms) out = out + prof.v(t) * basis;
    if (delta_coeff) out = out + (marginal.value((t - kink) / eps) / eps) * (*delta_coeff);
    return out;
  }
};

ConvolvedRicci convolve_ricci(const SpacetimeModel& model, Profile profile, double eps) {
  if (!model.known.ricci_regular)
    throw Error("ricci_commutator: model lacks a certified Ricci decomposition");
  const OneAxisMetric& reg = *model.known.ricci_regular;
  ConvolvedRicci cr;
  cr.marginal = make_marginal(profile, model.dim);
  cr.eps = eps;
  cr.constant_part = reg.constant_part;
  for (const auto& [basis, prof] : reg.profiles)
    cr.reg_terms.push_back({basis, convolve_piecewise(prof, cr.marginal, eps)});
  if (model.known.ricci_delta_coeff) {
    if (!model.metric.kink)
      throw Error("ricci_commutator: delta coefficient without kink location");
    cr.delta_coeff = model.known.ricci_delta_coeff;
    cr.kink = model.metric.kink->value;
  }
  return cr;
}

// 1D L^p norms over the t-interval of K, scaled by the spatial measure of K
struct NormAccumulator {
  std::vector<double> p_list;
  std::vector<double> acc;  // integral of |.|^p
  double sup = 0;
  double h = 0, spatial_vol = 1;

  void add(double value, double w) {
    sup = std::max(sup, std::abs(value));
    for (size_t i = 0; i < p_list.size(); ++i)
      acc[i] += w * std::pow(std::abs(value), p_list[i]);
  }
  std::vector<double> finish() const {
    std::vector<double> out;
    for (size_t i = 0; i < p_list.size(); ++i)
      out.push_back(std::pow(acc[i] * h * spatial_vol, 1.0 / p_list[i]));
    return out;
  }
};

double spatial_volume(const Box& K, int dim, int vary_axis) {
  double v = 1;
  for (int a = 0; a < dim; ++a)
    if (a != vary_axis) v *= (K.hi[a] - K.lo[a]);
  return v;
}

}  // namespace

NormReport ricci_commutator(const SpacetimeModel& model, const RegularizedFamily& family,
                            const std::vector<double>& p_list, const Box& K, int t_samples) {
  const int axis = model.metric.analytic ? model.metric.analytic->axis : -1;
  const int vaxis = axis < 0 ? 0 : axis;
  NormReport rep;
  rep.schedule = family.schedule;
  rep.p_list = p_list;
  for (size_t k = 0; k < family.schedule.size(); ++k) {
    double eps = family.schedule[k];
    ConvolvedRicci conv = convolve_ricci(model, family.profile, eps);
    const MetricField& geps = family.smoothed[k];
    NormAccumulator na;
    na.p_list = p_list;
    na.acc.assign(p_list.size(), 0.0);
    na.h = (K.hi[vaxis] - K.lo[vaxis]) / (t_samples - 1);
    na.spatial_vol = spatial_volume(K, model.dim, vaxis);
    for (int i = 0; i < t_samples; ++i) {
      double t = K.lo[vaxis] + i * na.h;
      Vec x(model.dim);
      for (int a = 0; a < model.dim; ++a) x[a] = 0.5 * (K.lo[a] + K.hi[a]);
      x[vaxis] = t;
      Mat diff = ricci_at(geps, x) - conv.eval(t);
      double w = (i == 0 || i == t_samples - 1) ? 0.5 : 1.0;
      na.add(frobenius(diff), w);
    }
    rep.lp.push_back(na.finish());
    rep.linf.push_back(na.sup);
  }
  return rep;
}

NormReport ricci_commutator_fields(const SpacetimeModel& model, const RegularizedFamily& family,
                                   const std::function<Vec(double)>& X,
                                   const std::function<Vec(double)>& Y,
                                   const std::vector<double>& p_list, const Box& K,
                                   int t_samples) {
  if (!model.known.ricci_regular)
    throw Error("ricci_commutator_fields: model lacks a certified Ricci decomposition");
  const OneAxisMetric& reg = *model.known.ricci_regular;
  const int vaxis = reg.axis < 0 ? 0 : reg.axis;
  const double kink = model.metric.kink ? model.metric.kink->value : 0.0;
  NormReport rep;
  rep.schedule = family.schedule;
  rep.p_list = p_list;

  // scalar profile s(t) = Ric_reg(X,Y)(t), side-aware pieces
  auto contract = [&](double t, int side) {
    Vec xx = X(t), yy = Y(t);
    Vec pt(model.dim);
    pt[vaxis] = t;
    return qform(reg.g(pt, side), xx, yy);
  };

  for (size_t k = 0; k < family.schedule.size(); ++k) {
    double eps = family.schedule[k];
    Marginal1D marg = make_marginal(family.profile, model.dim);
    ConvolvedRicci conv = convolve_ricci(model, family.profile, eps);

    // right side: (Ric[g](X,Y)) conv rho = s_reg conv rho + delta(X,Y)|_kink m_eps
    Piecewise1D s_prof;
    if (model.metric.kink) {
      s_prof.breaks = {kink};
      Piece l, r;
      l.v = [contract](double t) { return contract(t, -1); };
      r.v = [contract](double t) { return contract(t, +1); };
      l.d1 = r.d1 = [](double) { return 0.0; };
      l.d2 = r.d2 = [](double) { return 0.0; };
      s_prof.pieces = {l, r};
    } else {
      s_prof = single_piece([contract](double t) { return contract(t, 0); },
                            [](double) { return 0.0; }, [](double) { return 0.0; });
    }
    Piecewise1D s_conv = convolve_piecewise(s_prof, marg, eps);
    double delta_at_kink = 0;
    if (model.known.ricci_delta_coeff)
      delta_at_kink = qform(*model.known.ricci_delta_coeff, X(kink), Y(kink));

    NormAccumulator na;
    na.p_list = p_list;
    na.acc.assign(p_list.size(), 0.0);
    na.h = (K.hi[vaxis] - K.lo[vaxis]) / (t_samples - 1);
    na.spatial_vol = spatial_volume(K, model.dim, vaxis);
    for (int i = 0; i < t_samples; ++i) {
      double t = K.lo[vaxis] + i * na.h;
      double left = qform(conv.eval(t), X(t), Y(t));
      double right = s_conv.v(t) + delta_at_kink * marg.value((t - kink) / eps) / eps;
      double w = (i == 0 || i == t_samples - 1) ? 0.5 : 1.0;
      na.add(left - right, w);
    }
    rep.lp.push_back(na.finish());
    rep.linf.push_back(na.sup);
  }
  return rep;
}

double delta_layer_value(const SpacetimeModel& model, const Marginal1D& marginal, double eps,
                         double t) {
  if (!model.metric.kink) return 0.0;
  return marginal.value((t - model.metric.kink->value) / eps) / eps;
}

}  // namespace liplab

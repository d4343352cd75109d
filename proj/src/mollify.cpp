#include "liplab/mollify.hpp"

#include <cmath>

namespace liplab {

MetricField regularize_metric(const MetricField& g, const MollifierKernel& kernel,
                              bool sample_on_grid) {
  MetricField out;
  out.dim = g.dim;
  out.name = g.name + "_eps";
  out.time_orientation = g.time_orientation;
  out.temporal_covector = g.temporal_covector;
  out.singular_guard = g.singular_guard;
  out.lipschitz_estimate = g.lipschitz_estimate;
  // the mollified metric is smooth: no kink is carried over

  if (g.analytic) {
    OneAxisMetric sm = *g.analytic;
    if (sm.axis >= 0) {
      for (auto& [basis, prof] : sm.profiles)
        prof = convolve_piecewise(prof, kernel.marginal, kernel.epsilon);
    }
    out.analytic = sm;
  }

  if (sample_on_grid || !g.analytic) {
    SampledField raw =
        g.analytic
            ? sample(
                  [&](const Vec& x, double* v) {
                    Mat m = out.analytic->g(x);
                    for (int i = 0; i < g.dim; ++i)
                      for (int j = 0; j < g.dim; ++j) v[i * g.dim + j] = m(i, j);
                  },
                  kernel.grid, 0, 2, true)
            : convolve(*g.sampled, kernel);
    if (!g.analytic) out.sampled = raw;
    else {
      raw.valid = trust_region(kernel.grid, kernel.epsilon, 0);
      out.sampled = raw;
    }
    // pointwise signature verification on the valid region
    const SampledField& sf = *out.sampled;
    for_each_index(sf.grid, sf.valid, [&](const std::array<int, kMaxDim>& idx) {
      Mat m = sf.matrix_at(sf.grid.flat(idx));
      if (!is_lorentzian_signature(m, 1e-14)) {
        Vec x = sf.grid.point(idx);
        std::string s = "regularize_metric: signature loss at (";
        for (int a = 0; a < g.dim; ++a)
          s += std::to_string(x[a]) + (a + 1 < g.dim ? "," : ")");
        throw Error(s);
      }
    });
  }
  return out;
}

namespace {

MetricField shift_by_dt2(const MetricField& g_eps, double lambda, ConeMode mode) {
  MetricField out = g_eps;
  double s = (mode == ConeMode::inner) ? lambda : -lambda;
  Mat d(g_eps.dim);
  const Vec& c = g_eps.temporal_covector;
  for (int i = 0; i < g_eps.dim; ++i)
    for (int j = 0; j < g_eps.dim; ++j) d(i, j) = c[i] * c[j];
  if (out.analytic) out.analytic->constant_part = out.analytic->constant_part + s * d;
  if (out.sampled) {
    SampledField& sf = *out.sampled;
    const int n = g_eps.dim;
    for (std::int64_t p = 0; p < sf.grid.npoints(); ++p)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sf.at(p, i * n + j) += s * d(i, j);
  }
  out.name = g_eps.name + (mode == ConeMode::inner ? "_inner" : "_outer");
  return out;
}

bool nesting_holds(const MetricField& adj, const MetricField& g, ConeMode mode, const Box& region,
                   const AuditConfig& cfg, double* margin) {
  ConeReport rep = (mode == ConeMode::inner) ? cones_narrower(adj, g, region, cfg)
                                             : cones_narrower(g, adj, region, cfg);
  *margin = rep.min_margin;
  return rep.holds;
}

}  // namespace

ConeAdjustResult adjust_cones(const MetricField& g_eps, const MetricField& g, ConeMode mode,
                              const Box& region, const AuditConfig& cfg, double lambda_floor,
                              double lambda_cap) {
  double lambda = lambda_floor;
  double margin = 0;
  while (lambda <= lambda_cap) {
    MetricField adj = shift_by_dt2(g_eps, lambda, mode);
    if (nesting_holds(adj, g, mode, region, cfg, &margin)) {
      double lam = 1.5 * lambda;
      ConeAdjustResult r;
      r.adjusted = shift_by_dt2(g_eps, lam, mode);
      r.lambda = lam;
      nesting_holds(r.adjusted, g, mode, region, cfg, &r.min_margin);
      return r;
    }
    lambda *= 2.0;
  }
  throw Error("adjust_cones: no lambda below cap " + std::to_string(lambda_cap) +
              " achieves nesting (metric too wild for this epsilon)");
}

std::vector<double> default_schedule(double eps0, int entries) {
  std::vector<double> s(entries);
  for (int k = 0; k < entries; ++k) s[k] = eps0 * std::pow(2.0, -k);
  return s;
}

RegularizedFamily build_family(const SpacetimeModel& model, const std::vector<double>& schedule,
                               Profile profile, const Grid& grid, const Box& audit_region,
                               const AuditConfig& cfg, bool sample_on_grid) {
  for (size_t k = 0; k + 1 < schedule.size(); ++k)
    if (!(schedule[k] > schedule[k + 1]))
      throw Error("build_family: schedule must be strictly decreasing");
  RegularizedFamily fam;
  fam.base = model;
  fam.profile = profile;
  fam.schedule = schedule;
  for (double eps : schedule) {
    MollifierKernel kernel = make_kernel(profile, eps, grid);
    MetricField geps = regularize_metric(model.metric, kernel, sample_on_grid);
    auto in = adjust_cones(geps, model.metric, ConeMode::inner, audit_region, cfg);
    auto outr = adjust_cones(geps, model.metric, ConeMode::outer, audit_region, cfg);
    fam.smoothed.push_back(std::move(geps));
    fam.inner.push_back(std::move(in.adjusted));
    fam.outer.push_back(std::move(outr.adjusted));
    fam.lambda_inner.push_back(in.lambda);
    fam.lambda_outer.push_back(outr.lambda);
    fam.margin_inner.push_back(in.min_margin);
    fam.margin_outer.push_back(outr.min_margin);
  }
  // monotone post-pass: larger-eps inner metrics must have strictly narrower
  // cones than the next entry; bump lambdas until the audit passes
  const int K = static_cast<int>(schedule.size());
  for (int k = K - 2; k >= 0; --k) {
    for (int it = 0; it < 80; ++it) {
      ConeReport rep = cones_narrower(fam.inner[k], fam.inner[k + 1], audit_region, cfg);
      ConeReport vs_g = cones_narrower(fam.inner[k], model.metric, audit_region, cfg);
      if (rep.holds && vs_g.holds && fam.lambda_inner[k] > fam.lambda_inner[k + 1]) break;
      fam.lambda_inner[k] = std::max(fam.lambda_inner[k] * 1.3,
                                     fam.lambda_inner[k + 1] * 1.3 + 1e-12);
      fam.inner[k] = shift_by_dt2(fam.smoothed[k], fam.lambda_inner[k], ConeMode::inner);
    }
  }
  for (int k = K - 2; k >= 0; --k) {
    for (int it = 0; it < 80; ++it) {
      ConeReport rep = cones_narrower(fam.outer[k + 1], fam.outer[k], audit_region, cfg);
      ConeReport vs_g = cones_narrower(model.metric, fam.outer[k], audit_region, cfg);
      if (rep.holds && vs_g.holds && fam.lambda_outer[k] > fam.lambda_outer[k + 1]) break;
      fam.lambda_outer[k] = std::max(fam.lambda_outer[k] * 1.3,
                                     fam.lambda_outer[k + 1] * 1.3 + 1e-12);
      fam.outer[k] = shift_by_dt2(fam.smoothed[k], fam.lambda_outer[k], ConeMode::outer);
    }
  }
  return fam;
}

std::pair<SampledField, SampledField> friedrichs_weighted_convolve(const SampledField& a,
                                                                   const SampledField& f,
                                                                   const MollifierKernel& kernel) {
  const Grid& g = a.grid;
  if (g.dim != f.grid.dim) throw Error("friedrichs_weighted_convolve: grid mismatch");
  for (int ax = 0; ax < g.dim; ++ax)
    if (g.res[ax] != f.grid.res[ax] || g.lo[ax] != f.grid.lo[ax] || g.hi[ax] != f.grid.hi[ax])
      throw Error("friedrichs_weighted_convolve: grid mismatch");
  SampledField f_conv = convolve(f, kernel);
  SampledField first = f_conv;
  for (std::int64_t p = 0; p < g.npoints(); ++p) first.at(p, 0) = a.at(p, 0) * f_conv.at(p, 0);
  SampledField af = a;
  for (std::int64_t p = 0; p < g.npoints(); ++p) af.at(p, 0) = a.at(p, 0) * f.at(p, 0);
  SampledField second = convolve(af, kernel);
  first.valid = second.valid;
  return {first, second};
}

}  // namespace liplab

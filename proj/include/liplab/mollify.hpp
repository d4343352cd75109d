// liplab - regularized metrics g_eps and cone-adjusted approximants
#ifndef LIPLAB_MOLLIFY_HPP
#define LIPLAB_MOLLIFY_HPP

#include "liplab/metric.hpp"

namespace liplab {

/// g_eps = g * rho_eps. Analytic one-axis sources are convolved exactly along
/// the variation axis with the kernel's marginal; the result is also sampled
/// on the kernel grid and its Lorentzian signature is verified pointwise on
/// the shrunken valid region (throws with the offending point on failure).
MetricField regularize_metric(const MetricField& g, const MollifierKernel& kernel,
                              bool sample_on_grid = true);

enum class ConeMode { inner, outer };

struct ConeAdjustResult {
  MetricField adjusted;
  double lambda = 0;
  double min_margin = 0;  // audited nesting margin
};

/// Shifts g_eps by +-lambda dt(x)dt (inner: +, narrower cones; outer: -, wider),
/// with lambda the smallest value in a geometric search such that the audited
/// nesting holds, times a 1.5 safety factor. Throws if no lambda below the hard
/// cap achieves nesting.
ConeAdjustResult adjust_cones(const MetricField& g_eps, const MetricField& g, ConeMode mode,
                              const Box& region, const AuditConfig& cfg,
                              double lambda_floor = 1e-8, double lambda_cap = 1.0);

/// g, its mollifications and cone-adjusted approximants along an eps schedule.
struct RegularizedFamily {
  SpacetimeModel base;
  Profile profile = Profile::standard_bump;
  std::vector<double> schedule;  // strictly decreasing
  std::vector<MetricField> smoothed, inner, outer;
  std::vector<double> lambda_inner, lambda_outer;
  std::vector<double> margin_inner, margin_outer;
};

/// Default schedule eps_k = eps0 * 2^-k.
std::vector<double> default_schedule(double eps0 = 0.2, int entries = 5);

/// Builds the family on `grid` (kernel discretization + sampling grid) with an
/// audited monotone post-pass: inner cones nest increasingly (Lemma-2.1(iv)
/// style subsequence behavior), enforced by bumping lambdas where the audit
/// fails. Audit uses a fixed seed so the vector set is shared across entries.
RegularizedFamily build_family(const SpacetimeModel& model, const std::vector<double>& schedule,
                               Profile profile, const Grid& grid, const Box& audit_region,
                               const AuditConfig& cfg, bool sample_on_grid = false);

/// The two products of Eq.-3.2 shape: (a * (f conv rho), (a f) conv rho).
std::pair<SampledField, SampledField> friedrichs_weighted_convolve(const SampledField& a,
                                                                   const SampledField& f,
                                                                   const MollifierKernel& kernel);

}  // namespace liplab

#endif

// liplab - metric fields, causal classification, cone comparison, model catalog
#ifndef LIPLAB_METRIC_HPP
#define LIPLAB_METRIC_HPP

#include <map>
#include <optional>
#include <random>
#include <string>

#include "liplab/mollifier.hpp"

namespace liplab {

/// Analytic metric whose coefficients vary along at most one coordinate axis:
///   g(x) = constant_part + sum_k profiles[k].second(x[axis]) * profiles[k].first.
/// Covers every catalog model, its mollification and its cone-adjusted variants.
struct OneAxisMetric {
  int dim = 0;
  int axis = -1;  // -1: constant metric
  Mat constant_part;
  std::vector<std::pair<Mat, Piecewise1D>> profiles;

  Mat g(const Vec& x, int side = 0) const;
  Mat dg(const Vec& x, int a, int side = 0) const;
  Mat ddg(const Vec& x, int a, int b, int side = 0) const;
  std::vector<double> breaks() const;
};

struct KinkInfo {
  int axis = 0;
  double value = 0;
};

/// Lorentzian metric on a chart: analytic source, sampled source, or both.
struct MetricField {
  int dim = 0;
  std::string name;
  std::optional<OneAxisMetric> analytic;
  std::optional<SampledField> sampled;  // rank (0,2), symmetric
  std::optional<KinkInfo> kink;         // coordinate-aligned Lipschitz kink locus
  /// Future time orientation (coordinate components of a timelike field).
  std::function<Vec(const Vec&)> time_orientation;
  /// Constant covector dt of a global temporal function (cone adjustment
  /// shifts the metric by multiples of dt (x) dt). Defaults to e^0.
  Vec temporal_covector;
  /// Positive guard that vanishes at a singular locus (e.g. the GRW scale
  /// factor); integrators halt when it drops below threshold. Empty: none.
  std::function<double(const Vec&)> singular_guard;
  std::optional<double> lipschitz_estimate;  // per-component, on the trust region

  Mat g_at(const Vec& x, int side = 0) const;
  Mat dg_at(const Vec& x, int a, int side = 0) const;
  Mat ddg_at(const Vec& x, int a, int b, int side = 0) const;
  bool has_analytic() const { return analytic.has_value(); }
};

/// Cofactor-based inverse of the coordinate matrix at x.
Mat inverse_at(const MetricField& g, const Vec& x);

enum class Character { timelike, null_vec, spacelike };
struct CharacterResult {
  Character character;
  double value;  // g_x(v,v)
  bool future;   // g_x(v, time_orientation) < 0
};
CharacterResult causal_character(const MetricField& g, const Vec& x, const Vec& v);

/// Audit configuration for sample-based open-condition checks.
struct AuditConfig {
  int points = 64;           // random points in the region
  int dirs_timelike = 8;     // per point
  int dirs_near_null = 8;
  int dirs_spacelike = 16;
  double near_null_shift = 1e-3;
  double margin_floor = 1e-9;  // reject if min margin below this
  std::uint64_t seed = 20240915;
};

struct Box {  // coordinate box (not index box)
  std::array<double, kMaxDim> lo{}, hi{};
};

struct ConeReport {
  bool holds = false;
  double min_margin = 0;  // min over g1-causal X of -g2(X,X), h-normalized
  Vec witness_x, witness_v;
  int causal_samples = 0;
};

/// Checks "every g1-causal vector is g2-timelike" on stratified random samples.
ConeReport cones_narrower(const MetricField& g1, const MetricField& g2, const Box& region,
                          const AuditConfig& cfg);

/// Closed-form facts a model certifies about itself. Every entry carries the
/// derivation identifier in `provenance`; tests re-derive them numerically.
struct KnownFacts {
  std::string provenance;
  /// a.e. Ricci as a one-axis tensor (same representation as the metric).
  std::optional<OneAxisMetric> ricci_regular;
  /// Coefficient matrix of the surface-delta part of Ricci on the kink.
  std::optional<Mat> ricci_delta_coeff;
  /// Mean curvature of {t=const} slices.
  std::function<double(double)> mean_curvature_of_t;
  std::optional<double> singularity_time;
  /// rho for the distributional SEC certificate Ric >= -(n-1) rho g (timelike).
  std::optional<double> sec_rho;
  enum class TauForm { none, flat, comoving } tau_form = TauForm::none;
  /// GRW scale factor and derivatives, when the model is a warped product.
  std::function<double(double)> scale_a, scale_da, scale_dda;
};

struct SpacetimeModel {
  std::string name;
  int dim = 0;
  MetricField metric;
  KnownFacts known;
};

/// Model names: minkowski, grw_smooth, grw_eds_collapse, grw_two_slope,
/// pp_impulsive_rosen. Parameters are validated against documented ranges.
SpacetimeModel catalog(const std::string& name, const std::map<std::string, double>& params);

// typed constructors used throughout the tests/experiments
SpacetimeModel make_minkowski(int dim);
SpacetimeModel make_grw_smooth(int dim, const std::string& kind, double p0 = 1.0,
                               double p1 = 0.0);  // kind: cosh | exp | linear(a0,slope)
SpacetimeModel make_grw_eds_collapse(int dim, double ts);
SpacetimeModel make_grw_two_slope(int dim, double m1, double m2);
SpacetimeModel make_pp_impulsive_rosen();

/// Stratified audit directions at a point: timelike/near-null/spacelike w.r.t. g.
std::vector<Vec> audit_directions(const MetricField& g, const Vec& x, const AuditConfig& cfg,
                                  std::mt19937_64& rng);

/// Random point in a coordinate box.
Vec random_point(const Box& b, int dim, std::mt19937_64& rng);

/// Future null vector of g at x in spatial direction w (solves the quadratic
/// along the time orientation); returns zero vector if it fails.
Vec null_vector(const MetricField& g, const Vec& x, const Vec& w);

}  // namespace liplab

#endif

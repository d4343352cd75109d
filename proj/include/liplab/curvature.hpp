// liplab - Christoffel symbols and Ricci tensors, FD and analytic routes
#ifndef LIPLAB_CURVATURE_HPP
#define LIPLAB_CURVATURE_HPP

#include "liplab/metric.hpp"

namespace liplab {

/// Rank-3 coefficients Gamma^i_{jk} at a point (i*n*n + j*n + k layout).
struct Ten3 {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> a{};
  double& operator()(int i, int j, int k) { return a[(i * n + j) * n + k]; }
  double operator()(int i, int j, int k) const { return a[(i * n + j) * n + k]; }
};

struct CurvatureBundle {
  SampledField gamma;  // rank (1,2)
  SampledField ricci;  // rank (0,2)
  IndexBox valid;      // trust region after two derivative losses
  bool has_ricci = false;
};

/// FD route on a sampled metric (rank (0,2), symmetric).
CurvatureBundle christoffel_fd(const SampledField& g, FdScheme scheme = FdScheme::central2);
CurvatureBundle ricci_fd(const SampledField& g, FdScheme scheme = FdScheme::central2);

/// Analytic route from exact metric derivatives (side-aware at kinks).
Ten3 christoffel_at(const MetricField& g, const Vec& x, int side = 0);
Mat ricci_at(const MetricField& g, const Vec& x, int side = 0);

struct RicciMinConfig {
  double unit_bound = 8.0;    // h-norm cap D on audited unit timelike vectors
  int sphere_dirs = 26;       // spatial directions on the unit hyperboloid scan
  int rapidity_steps = 24;
  int refine_iters = 40;
  std::uint64_t seed = 7;
};

/// min over g-unit timelike X (g(X,X) = -1, ||X||_h <= D) of Ric_x(X,X):
/// eigen-direction candidates plus a stratified hyperboloid scan.
double ricci_quadratic_min(const Mat& ric, const Mat& g_mat, const Vec& time_or,
                           const RicciMinConfig& cfg);

/// Scan over region points (analytic metric route).
double ricci_timelike_min(const MetricField& g, const std::vector<Vec>& points,
                          const RicciMinConfig& cfg);

/// Scan over the valid region of an FD bundle (sampled route).
double ricci_timelike_min(const CurvatureBundle& bundle, const MetricField& g,
                          const IndexBox& region, const RicciMinConfig& cfg);

}  // namespace liplab

#endif

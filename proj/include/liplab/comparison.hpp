// liplab - comparison constants, index form, segment inequality, Hawking runs
#ifndef LIPLAB_COMPARISON_HPP
#define LIPLAB_COMPARISON_HPP

#include "liplab/causal.hpp"
#include "liplab/curvature.hpp"

namespace liplab {

struct ComparisonParams {
  int n = 4;          // dimension >= 2
  double kappa = -1;  // timelike Ricci lower bound Ric >= n kappa, kappa < 0
  double beta = -1;   // mean curvature bound, < 0
  double rho = 0;     // SEC shift
  double eta = 0.5;   // > 0
  double T = 1;       // > 0
};

/// Backwards area comparison constant
/// (sinh(eta sqrt|kappa|)/sinh((T+eta) sqrt|kappa|))^{n-1}.
double const_CA_minus(const ComparisonParams& p);

/// K(beta,T,rho), three branches; domain errors on sqrt(rho) T > pi/2, T <= 0.
double const_K(const ComparisonParams& p);

/// alpha(beta,rho): the root of K in T. rho<0 requires |beta| > (n-1) sqrt|rho|.
double const_alpha(double beta, double rho, int n);

struct IndexFormInput {
  enum class H { affine, sinh_h, sin_h, custom } kind = H::affine;
  std::function<double(double)> h, hdot;  // custom only
  int panels = 10000;
};

/// |beta| + int_0^T [-(n-1) hdot^2 + h^2 ricci_profile(t)] dt - K(beta,T,rho).
/// With the canonical h and profile == (n-1) rho this evaluates to zero.
double index_form(const IndexFormInput& input, const ComparisonParams& p,
                  const std::function<double(double)>& ricci_profile);

struct SegmentSetup {
  MetricField metric;  // smooth
  HypersurfaceSpec sigma;
  std::function<double(const Vec&)> f;  // nonnegative
  double T = 1;
  double eta = 0.2;
  int tsteps = 96;
  double tol = 0.02;  // PASS iff LHS <= RHS (1+tol)
  TauSearchConfig tau_cfg;
  RicciMinConfig ricci_cfg;
};

struct SegmentReport {
  bool pass = false;
  bool precondition_ok = false;  // B inside Reg_eta^+(T), audited via the cut check
  double lhs = 0, rhs = 0;
  double slack_rel = 0;  // (rhs - lhs)/rhs
  double kappa = 0, ca_minus = 0, sigma_b = 0, omega_integral = 0;
  double ricci_floor = 0;
  std::vector<Vec> near_cut;  // base points with c+ within 2 tol of T+eta
  std::string note;
};

/// Eq. 2.6 check: inf_x int f along normal geodesics vs the worldvolume bound.
SegmentReport segment_check(const SegmentSetup& s);

struct HawkingSetup {
  SpacetimeModel model;
  double t0 = -0.5;  // Sigma = {t = t0}
  std::vector<std::pair<double, double>> patch_bounds{{-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}};
  std::vector<int> patch_res{3, 3, 3};
  double beta = 0;  // 0: derive from the certified H(t0) with beta_slack
  double beta_slack = 0.005;
  double rho = 0;
  std::vector<double> schedule = {0.2, 0.1, 0.05, 0.025, 0.0125};
  Profile profile = Profile::standard_bump;
  int probes = 5;
  std::uint64_t seed = 42;
  double unit_bound = 8.0;
  int floor_samples = 160;
};

struct HawkingReport {
  bool verdict = false;
  bool preconditions_ok = false;
  std::string note;
  double beta = 0, alpha = 0, h_oracle = 0;
  double delta_coeff_min = 0;  // min audited contraction of the kink delta part
  std::vector<double> schedule;
  std::vector<double> curvature_floor;   // per eps, inner approximants
  std::vector<double> negpart_l1;        // per eps, Lemma 5.7 integrand
  std::vector<double> lambda_inner;
  MeanConvergenceReport mean_conv;
  std::vector<double> probe_t;
  std::vector<double> tau_sigma_probe;
  double sup_tau_sigma = 0;
  double oracle_sup_tau = 0;
  bool saturation_expected = false;
  bool saturated = false;
  std::uint64_t seed = 0;
};

/// Theorem 5.1 pipeline on a catalog model: SEC certificate audit, family,
/// per-eps curvature floors and Lemma-5.7 negative parts, mean curvature
/// transfer, tau_Sigma probes approaching the singular locus, verdict.
HawkingReport hawking_experiment(const HawkingSetup& s);

}  // namespace liplab

#endif

// liplab - Filippov geodesics, normal exponential map, time-separation search
#ifndef LIPLAB_CAUSAL_HPP
#define LIPLAB_CAUSAL_HPP

#include "liplab/slab.hpp"

namespace liplab {

/// Broken causal path: ordered chart-coordinate nodes, per-segment affine.
struct CausalPath {
  std::vector<Vec> nodes;
  /// min over audited segment samples of -g(dot,dot)/|dot|^2
  double min_character = 0;
};

/// Lorentzian arc length, per-segment Gauss quadrature (segments straddling a
/// declared kink are split at the crossing for quadrature exactness).
double path_length(const MetricField& g, const std::vector<Vec>& nodes);

/// Future-directed causal audit of one segment (quadrature-node sampling).
bool segment_causal(const MetricField& g, const Vec& a, const Vec& b, double margin,
                    double* min_char = nullptr);

enum class GeodesicStatus { reached_T, left_domain, hit_singularity };

struct GeodesicResult {
  std::vector<double> params;
  std::vector<Vec> points;
  std::vector<Vec> velocities;
  GeodesicStatus status = GeodesicStatus::reached_T;
  std::string metric_tag;
  bool unit_speed = false;
  double length = 0;  // accumulated g-proper time for unit-speed runs
};

struct GeodesicOptions {
  double step = 1.0 / 256.0;
  std::optional<Box> domain;        // exit detection
  double singular_floor = 1e-4;     // halt when the model guard drops below
  bool normalize_unit = true;       // rescale v0 to g(v0,v0) = -1
  int max_steps = 2000000;
};

/// RK4 on the geodesic ODE; for catalog metrics with a coordinate-aligned kink
/// the crossing is event-detected (bisection to 1e-10) and the integration
/// restarts with position and velocity continuous (the C^1 Filippov contract).
GeodesicResult geodesic(const MetricField& g, const Vec& x0, const Vec& v0, double T,
                        const GeodesicOptions& opts = {});

/// Future unit normal of Sigma at the base point with spatial coords xs.
Vec sigma_unit_normal(const MetricField& g, const HypersurfaceSpec& sigma, const Vec& xs);

/// exp_Sigma^+(t, x): unit-speed normal geodesic from the base point.
Vec normal_exponential(const MetricField& g, const HypersurfaceSpec& sigma, const Vec& xs,
                       double t, const GeodesicOptions& opts = {});

struct TauSearchConfig {
  int m0 = 16;
  int m_max = 128;
  double gain_tol = 1e-4;
  double causal_margin = 1e-9;
  int passes_per_level = 24;
  std::uint64_t seed = 12345;
  std::vector<Vec> seed_path;  // optional custom seed (endpoints included)
  bool base_on_sigma = false;  // first node slides along Sigma (tau_Sigma mode)
  const HypersurfaceSpec* sigma = nullptr;
};

struct TauEstimate {
  double value = 0;  // certified lower bound (length of the best found path)
  CausalPath witness;
  std::vector<std::pair<int, double>> refinement_log;
  std::uint64_t seed = 0;
  Vec base_point;  // for tau_Sigma: the witness base on Sigma
};

/// sup of path lengths over found future-directed causal paths p -> q
/// (two-phase: straight/bent seeds, then node-wise ascent with causality
/// projection and node doubling). Returns 0 with an empty witness if no
/// causal seed is found.
TauEstimate tau(const MetricField& g, const Vec& p, const Vec& q, const TauSearchConfig& cfg = {});

/// sup over q in Sigma of tau(q, p): coarse base scan + constrained ascent.
TauEstimate tau_sigma(const MetricField& g, const HypersurfaceSpec& sigma, const Vec& p,
                      const TauSearchConfig& cfg = {});

struct TauChainRow {
  Vec p, q;
  std::vector<double> tau_k;  // per family entry (inner approximants)
  double tau_g = 0;
  bool chain_ok = false;
  double final_gap_rel = 0;
};
struct TauChainReport {
  std::vector<TauChainRow> rows;
  bool all_chains_ok = false;
  double max_final_gap_rel = 0;
  std::uint64_t seed = 0;
};

/// Lemma-5.4 style check on sampled causal pairs: tau_1 <= ... <= tau_K <= tau
/// within 1e-6 + search-noise tolerance; successive searches are warm-started
/// with the previous witness (any g_k-causal path is g_{k+1}- and g-causal).
TauChainReport tau_monotonicity_check(const SpacetimeModel& model,
                                      const RegularizedFamily& family, int num_pairs,
                                      std::uint64_t seed, double noise_tol = 0.005);

struct CutResult {
  double t = 0;
  bool domain_exit = false;
};
/// Largest t <= Tmax with tau_Sigma(exp(x,t)) <= t (1+tol), by bisection.
CutResult cut_function(const MetricField& g, const HypersurfaceSpec& sigma, const Vec& xs,
                       double Tmax, double tol = 0.005, const TauSearchConfig& cfg = {});

struct OrthogonalityRow {
  Vec target;
  double defect_deg = 0;  // asin of the normalized worst tangential inner product
  double tau_value = 0;
};
struct OrthogonalityReport {
  std::vector<OrthogonalityRow> rows;
  double max_defect_deg = 0;
  /// per-iteration (value, defect) trace of the last run when a custom
  /// non-orthogonal seed is supplied
  std::vector<std::pair<double, double>> trace;
};

/// Lemma-5.8 check: tau_Sigma witnesses start orthogonally to Sigma.
OrthogonalityReport orthogonality_check(const MetricField& g, const HypersurfaceSpec& sigma,
                                        const std::vector<Vec>& targets,
                                        const TauSearchConfig& cfg = {});

/// Future normal congruence over the Sigma patch: positions, velocities (the
/// U field), area elements A(t,x) from FD Jacobians across the base lattice.
struct NormalCongruence {
  Grid base_grid;  // (n-1)-dim lattice over the Sigma patch
  int tsteps = 0;
  double T = 0;
  std::vector<std::vector<Vec>> pos, vel;
  std::vector<std::vector<double>> area;
  std::vector<std::vector<std::uint8_t>> alive;
  std::vector<double> sigma_density;  // sqrt(det G(0,x)) per base point

  double t_of(int it) const { return T * it / tsteps; }
  /// nearest-sample velocity lookup (resampling of the U field)
  Vec velocity_near(const Vec& p) const;
};

NormalCongruence normal_congruence(const MetricField& g, const HypersurfaceSpec& sigma, double T,
                                   int tsteps, const GeodesicOptions& opts = {});

/// vol_g(Omega_T^+(B)) = int_B int_0^{min(T, cap(x))} A(t,x) dt dsigma(x).
/// cap: optional per-base-point parameter cap (e.g. the cut function).
double omega_volume(const NormalCongruence& cong,
                    const std::function<double(const Vec&)>& cap = {});

/// sigma(B): induced surface measure of the patch.
double sigma_area(const NormalCongruence& cong);

}  // namespace liplab

#endif

// liplab - Friedrichs commutator fields, kernel-mass diagnostics, Ricci commutators
#ifndef LIPLAB_FRIEDRICHS_HPP
#define LIPLAB_FRIEDRICHS_HPP

#include "liplab/mollify.hpp"

namespace liplab {

enum class AEpsMode { frozen, mollified, true_inverse };

/// One commutator case: a Lipschitz (plays g^{ij}), f bounded with compact
/// support (plays xi d_k g_{lm}), K the trust region.
struct FriedrichsCase {
  Grid grid;
  SampledField a;
  SampledField f;
  IndexBox K;
  double lip_a = 0;  // Lipschitz estimate on K'
  AEpsMode mode = AEpsMode::mollified;
  std::function<SampledField(double)> true_inverse_provider;
  std::vector<double> schedule;
  std::vector<double> p_list{1, 2, 4};
  Profile profile = Profile::standard_bump;
};

/// Canonical kink pair a=|x|, f=sign(x) on [-1,1] (frozen a_eps).
FriedrichsCase kink_case(int resolution = 3201, const std::vector<double>& schedule = {});
/// Two-slope-GRW-derived pair: a = g^{xx} = 1/a(t)^2, f = xi * d_t g_xx,
/// with the true-inverse a_eps provider (components of (g conv rho_eps)^{-1}).
FriedrichsCase two_slope_case(double m1, double m2, int resolution = 3201,
                              const std::vector<double>& schedule = {});

struct Commutator0Result {
  SampledField field;
  double sup = 0;    // L^inf(K)
  double bound = 0;  // Lip(a,K') * eps * ||f||_inf(K')
};
/// a_eps (f*rho_eps) - (a f)*rho_eps and its sup norm on K.
Commutator0Result commutator0(const FriedrichsCase& c, double eps);

/// d_j of the zero-order commutator field.
SampledField commutator1_field(const FriedrichsCase& c, double eps, int axis = 0);

/// Per-(eps, p) norm table with trend flags.
struct NormReport {
  std::vector<double> schedule;
  std::vector<double> p_list;
  std::vector<std::vector<double>> lp;  // [k][ip]
  std::vector<double> linf;             // [k]
  std::string note;

  double final_over_initial(int ip) const;
  bool monotone_decreasing(int ip, double uptick_tol = 1.05) const;
  double linf_median() const;
  bool linf_bounded(double factor = 3.0) const;
};

NormReport commutator1_sweep(const FriedrichsCase& c, int axis = 0);

/// Eq. 3.11 masses of k_eps(x,y) = da(x) rho_eps(x-y) + (a(x)-a(y)) d rho_eps:
/// (max_y int_K |k| dx, max_{x in K} int |k| dy). 1D grids only.
std::pair<double, double> kernel_mass(const FriedrichsCase& c, double eps, int axis = 0);
/// The Eq. 3.14 constant (1 + int |rho'|) Lip(a, K').
double kernel_mass_bound(const FriedrichsCase& c);

/// || Ric[g_eps] - Ric[g] conv rho_eps ||_{L^p(K)} over the schedule, using the
/// model's certified decomposition (regular part + surface delta on the kink).
/// K is a coordinate box; fields vary along the model's variation axis only.
NormReport ricci_commutator(const SpacetimeModel& model, const RegularizedFamily& family,
                            const std::vector<double>& p_list, const Box& K, int t_samples = 4001);

/// Cor-3.4 commutator with vector fields whose coefficients depend only on the
/// variation axis: (Ric[g] conv rho)(X,Y) - (Ric[g](X,Y)) conv rho.
NormReport ricci_commutator_fields(const SpacetimeModel& model, const RegularizedFamily& family,
                                   const std::function<Vec(double)>& X,
                                   const std::function<Vec(double)>& Y,
                                   const std::vector<double>& p_list, const Box& K,
                                   int t_samples = 4001);

/// Closed-form surface mollification of the kink delta: coeff * m_eps(t - kink).
double delta_layer_value(const SpacetimeModel& model, const Marginal1D& marginal, double eps,
                         double t);

}  // namespace liplab

#endif

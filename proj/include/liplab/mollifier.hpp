// liplab - mollifier kernels rho_eps, axis marginals, grid and 1D convolution
#ifndef LIPLAB_MOLLIFIER_HPP
#define LIPLAB_MOLLIFIER_HPP

#include <memory>
#include <vector>

#include "liplab/grid.hpp"

namespace liplab {

enum class Profile { standard_bump, polynomial_bump };

Profile profile_from_name(const std::string& name);
std::string profile_name(Profile p);

/// Radial profile phi(r) on [0,1] (unnormalized) and its derivative.
double profile_value(Profile p, double r);
double profile_deriv(Profile p, double r);

/// One-axis marginal of the unit-mass n-dim kernel: m(u) = int rho(u,y) dy,
/// even, unit mass, supported on [-1,1]. For n=1 this is the normalized profile
/// itself. Backed by a cubic spline table; derivatives come from the spline.
struct Marginal1D {
  int chart_dim = 1;
  Profile profile = Profile::standard_bump;

  double value(double u) const;
  double deriv(double u) const;
  /// int |m'(u)| du over [-1,1]  (enters the Friedrichs kernel-mass bound)
  double abs_deriv_mass() const;
  /// int u^k m(u) du, k-th moment
  double moment(int k) const;
  /// int |u|^k m(u) du
  double abs_moment(int k) const;

  struct Table;
  std::shared_ptr<const Table> table;
};

Marginal1D make_marginal(Profile p, int chart_dim);

/// Discretized mollifier at scale eps on a grid: lattice stencil with
/// renormalized weights (sum exactly 1), support radius exactly eps.
struct MollifierKernel {
  Profile profile = Profile::standard_bump;
  double epsilon = 0;
  int chart_dim = 1;
  Grid grid;
  Marginal1D marginal;  // marginal of the chart_dim kernel

  struct Entry {
    std::array<int, kMaxDim> offset;
    double weight;
  };
  std::vector<Entry> stencil;                 // full radial stencil on the grid
  std::array<int, kMaxDim> halfwidth{};       // per-axis stencil halfwidth in cells

  /// 1D renormalized stencil of the axis marginal at this grid's spacing.
  std::vector<double> axis_stencil(int axis) const;  // size 2*halfwidth[axis]+1
};

/// Refuses eps < 4 * max axis spacing (under-resolved) and eps <= 0.
MollifierKernel make_kernel(Profile p, double epsilon, const Grid& g);

/// Grid convolution (f * rho_eps) by direct truncated stencil. The valid region
/// shrinks by the stencil halfwidth on every axis. If `axes` is nonempty the
/// convolution runs only along those axes using the 1D axis marginal, which for
/// fields constant along the omitted axes agrees with the full convolution.
SampledField convolve(const SampledField& f, const MollifierKernel& k,
                      const std::vector<int>& axes = {});

/// ---- exact 1D convolution of piecewise-smooth functions ----

/// One smooth piece: value and first two derivatives.
struct Piece {
  std::function<double(double)> v;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// Piecewise-smooth function of one variable. pieces[i] covers
/// (breaks[i-1], breaks[i]) with breaks[-1]=-inf, breaks[size]=+inf.
struct Piecewise1D {
  std::vector<double> breaks;
  std::vector<Piece> pieces;

  /// side: 0 = automatic (right limit at a break), -1/+1 forces the side.
  int piece_index(double t, int side = 0) const;
  double v(double t, int side = 0) const;
  double d1(double t, int side = 0) const;
  double d2(double t, int side = 0) const;
};

/// Polynomial helper: coefficients low->high per piece.
Piecewise1D polynomial_pieces(const std::vector<double>& breaks,
                              const std::vector<std::vector<double>>& coeffs);
Piecewise1D single_piece(std::function<double(double)> v, std::function<double(double)> d1,
                         std::function<double(double)> d2);

/// Smooth convolution (q * m_eps)(t) with exact derivative bookkeeping:
/// d/dt includes jump terms jump(q at s) * m_eps(t-s); d2 likewise for
/// jumps of q'. Evaluation: per-subinterval Gauss-Legendre against the
/// spline-tabulated marginal, exact for polynomial pieces.
Piecewise1D convolve_piecewise(const Piecewise1D& q, const Marginal1D& m, double eps);

}  // namespace liplab

#endif

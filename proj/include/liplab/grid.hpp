// liplab - rectangular lattices, sampled tensor fields, finite differences, quadrature
#ifndef LIPLAB_GRID_HPP
#define LIPLAB_GRID_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "liplab/linalg.hpp"

namespace liplab {

/// Rectangular coordinate lattice on a chart box. Immutable after construction.
struct Grid {
  int dim = 0;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
  std::array<int, kMaxDim> res{};

  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (res[axis] - 1); }
  double max_spacing() const {
    double h = 0;
    for (int a = 0; a < dim; ++a) h = std::max(h, spacing(a));
    return h;
  }
  std::int64_t npoints() const {
    std::int64_t n = 1;
    for (int a = 0; a < dim; ++a) n *= res[a];
    return n;
  }
  double coord(int axis, int i) const { return lo[axis] + i * spacing(axis); }
  Vec point(const std::array<int, kMaxDim>& idx) const {
    Vec x(dim);
    for (int a = 0; a < dim; ++a) x[a] = coord(a, idx[a]);
    return x;
  }
  std::int64_t flat(const std::array<int, kMaxDim>& idx) const {
    std::int64_t f = 0;
    for (int a = 0; a < dim; ++a) f = f * res[a] + idx[a];
    return f;
  }
  std::array<int, kMaxDim> unflat(std::int64_t f) const {
    std::array<int, kMaxDim> idx{};
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(f % res[a]);
      f /= res[a];
    }
    return idx;
  }
  /// Index of the lattice point nearest to x (clamped to the box).
  std::array<int, kMaxDim> nearest(const Vec& x) const;
};

/// bounds: per-axis [lo,hi], resolution: per-axis sample counts (>= 2).
Grid make_grid(const std::vector<std::pair<double, double>>& bounds,
               const std::vector<int>& resolution);

/// Inclusive per-axis index range.
struct IndexBox {
  std::array<int, kMaxDim> lo{};
  std::array<int, kMaxDim> hi{};

  static IndexBox full(const Grid& g) {
    IndexBox b;
    for (int a = 0; a < g.dim; ++a) b.lo[a] = 0, b.hi[a] = g.res[a] - 1;
    return b;
  }
  IndexBox shrunk(const Grid& g, const std::array<int, kMaxDim>& margin) const {
    IndexBox b = *this;
    for (int a = 0; a < g.dim; ++a) b.lo[a] += margin[a], b.hi[a] -= margin[a];
    return b;
  }
  bool contains(const std::array<int, kMaxDim>& idx, int dim) const {
    for (int a = 0; a < dim; ++a)
      if (idx[a] < lo[a] || idx[a] > hi[a]) return false;
    return true;
  }
  bool empty(int dim) const {
    for (int a = 0; a < dim; ++a)
      if (lo[a] > hi[a]) return true;
    return false;
  }
};

/// Interior index box whose coordinate margin covers eps_max plus `stencils`
/// finite-difference stencil halfwidths on every side (the K inside K' nesting).
IndexBox trust_region(const Grid& g, double eps_max, int stencils);

/// Dense tensor-valued samples on a Grid. Layout: row-major over lattice points,
/// then components (dim^(rank_up+rank_down) per point).
struct SampledField {
  Grid grid;
  int rank_up = 0;
  int rank_down = 0;
  bool symmetric = false;
  IndexBox valid;  // region where values are trustworthy (convolution shrinks it)
  std::vector<double> values;

  int comp_count() const {
    int c = 1;
    for (int k = 0; k < rank_up + rank_down; ++k) c *= grid.dim;
    return c;
  }
  double& at(std::int64_t flat_point, int comp) { return values[flat_point * comp_count() + comp]; }
  double at(std::int64_t flat_point, int comp) const {
    return values[flat_point * comp_count() + comp];
  }
  /// Checked access: throws outside the valid region.
  double at_valid(const std::array<int, kMaxDim>& idx, int comp) const;

  /// Matrix view of a rank-(0,2) or (2,0) field at a lattice point.
  Mat matrix_at(std::int64_t flat_point) const;
  /// Multilinear interpolation of one component at an arbitrary point.
  double interp(const Vec& x, int comp) const;
};

SampledField make_field(const Grid& g, int rank_up, int rank_down, bool symmetric = false);

/// Pointwise sampler; fn fills comp_count() values per lattice point.
/// Throws (with the offending index) if fn produces a non-finite value.
SampledField sample(const std::function<void(const Vec&, double*)>& fn, const Grid& g,
                    int rank_up = 0, int rank_down = 0, bool symmetric = false);
/// Scalar convenience overload.
SampledField sample_scalar(const std::function<double(const Vec&)>& fn, const Grid& g);

enum class FdScheme { central2, central4, one_sided2 };

/// Partial derivative along `axis`. Interior points use the named stencil,
/// boundary points fall back to one-sided stencils of matching order.
SampledField fd_partial(const SampledField& f, int axis, FdScheme scheme = FdScheme::central2);

/// Composite trapezoid quadrature of one component over an index sub-box.
double integrate(const SampledField& f, const IndexBox& region, int comp = 0);
double integrate(const SampledField& f, int comp = 0);
/// Mask variant: integrand zeroed where mask (per lattice point) is false.
double integrate_masked(const SampledField& f, const std::vector<std::uint8_t>& mask,
                        int comp = 0);

/// L^p norm of the pointwise Frobenius norm over all components; p<=0 means sup norm.
double lp_norm(const SampledField& f, const IndexBox& region, double p);

/// Self-describing binary serialization (header + row-major float64).
void save_field(const SampledField& f, const std::string& path);
SampledField load_field(const std::string& path);

/// CSV export of a 1D/2D slice: free axes vary, others pinned at `pin` indices.
void export_csv_slice(const SampledField& f, const std::string& path,
                      const std::vector<int>& free_axes, const std::array<int, kMaxDim>& pin,
                      int comp = 0);

/// Iterate all index tuples in a box (fixed order, last axis fastest).
void for_each_index(const Grid& g, const IndexBox& box,
                    const std::function<void(const std::array<int, kMaxDim>&)>& body);

}  // namespace liplab

#endif

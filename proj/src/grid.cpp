#include "liplab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace liplab {

std::array<int, kMaxDim> Grid::nearest(const Vec& x) const {
  std::array<int, kMaxDim> idx{};
  for (int a = 0; a < dim; ++a) {
    int i = static_cast<int>(std::lround((x[a] - lo[a]) / spacing(a)));
    idx[a] = std::clamp(i, 0, res[a] - 1);
  }
  return idx;
}

Grid make_grid(const std::vector<std::pair<double, double>>& bounds,
               const std::vector<int>& resolution) {
  if (bounds.empty() || bounds.size() != resolution.size() ||
      bounds.size() > static_cast<size_t>(kMaxDim))
    throw Error("make_grid: need 1.." + std::to_string(kMaxDim) +
                " axes with matching bounds/resolution");
  Grid g;
  g.dim = static_cast<int>(bounds.size());
  for (int a = 0; a < g.dim; ++a) {
    if (!(bounds[a].second > bounds[a].first))
      throw Error("make_grid: degenerate interval on axis " + std::to_string(a));
    if (resolution[a] < 2)
      throw Error("make_grid: resolution < 2 on axis " + std::to_string(a));
    g.lo[a] = bounds[a].first;
    g.hi[a] = bounds[a].second;
    g.res[a] = resolution[a];
  }
  return g;
}

IndexBox trust_region(const Grid& g, double eps_max, int stencils) {
  IndexBox b = IndexBox::full(g);
  for (int a = 0; a < g.dim; ++a) {
    int cells = static_cast<int>(std::ceil(eps_max / g.spacing(a))) + 2 * stencils;
    b.lo[a] += cells;
    b.hi[a] -= cells;
    if (b.lo[a] > b.hi[a])
      throw Error("trust_region: empty after margin on axis " + std::to_string(a));
  }
  return b;
}

void for_each_index(const Grid& g, const IndexBox& box,
                    const std::function<void(const std::array<int, kMaxDim>&)>& body) {
  std::array<int, kMaxDim> idx = box.lo;
  if (box.empty(g.dim)) return;
  while (true) {
    body(idx);
    int a = g.dim - 1;
    while (a >= 0) {
      if (++idx[a] <= box.hi[a]) break;
      idx[a] = box.lo[a];
      --a;
    }
    if (a < 0) break;
  }
}

double SampledField::at_valid(const std::array<int, kMaxDim>& idx, int comp) const {
  if (!valid.contains(idx, grid.dim))
    throw Error("SampledField: access outside valid region");
  return at(grid.flat(idx), comp);
}

Mat SampledField::matrix_at(std::int64_t flat_point) const {
  if (rank_up + rank_down != 2) throw Error("matrix_at: field is not rank 2");
  Mat m(grid.dim);
  const int n = grid.dim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = at(flat_point, i * n + j);
  return m;
}

double SampledField::interp(const Vec& x, int comp) const {
  const int d = grid.dim;
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int a = 0; a < d; ++a) {
    double s = (x[a] - grid.lo[a]) / grid.spacing(a);
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, grid.res[a] - 2);
    base[a] = i;
    frac[a] = s - i;
  }
  double acc = 0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1;
    std::array<int, kMaxDim> idx = base;
    for (int a = 0; a < d; ++a) {
      if (corner & (1 << a)) {
        idx[a] += 1;
        w *= frac[a];
      } else {
        w *= 1.0 - frac[a];
      }
    }
    acc += w * at(grid.flat(idx), comp);
  }
  return acc;
}

SampledField make_field(const Grid& g, int rank_up, int rank_down, bool symmetric) {
  SampledField f;
  f.grid = g;
  f.rank_up = rank_up;
  f.rank_down = rank_down;
  f.symmetric = symmetric;
  f.valid = IndexBox::full(g);
  f.values.assign(static_cast<size_t>(g.npoints()) * f.comp_count(), 0.0);
  return f;
}

SampledField sample(const std::function<void(const Vec&, double*)>& fn, const Grid& g,
                    int rank_up, int rank_down, bool symmetric) {
  SampledField f = make_field(g, rank_up, rank_down, symmetric);
  const int cc = f.comp_count();
  std::vector<double> buf(cc);
  for_each_index(g, IndexBox::full(g), [&](const std::array<int, kMaxDim>& idx) {
    Vec x = g.point(idx);
    fn(x, buf.data());
    std::int64_t fp = g.flat(idx);
    for (int c = 0; c < cc; ++c) {
      if (!std::isfinite(buf[c])) {
        std::string s = "sample: non-finite value at index (";
        for (int a = 0; a < g.dim; ++a) s += std::to_string(idx[a]) + (a + 1 < g.dim ? "," : ")");
        throw Error(s + " comp " + std::to_string(c));
      }
      f.at(fp, c) = buf[c];
    }
  });
  return f;
}

SampledField sample_scalar(const std::function<double(const Vec&)>& fn, const Grid& g) {
  return sample([&fn](const Vec& x, double* out) { out[0] = fn(x); }, g, 0, 0, false);
}

namespace {

// value = sum coeff[k] * f[i + offset[k]] / h
struct Stencil1 {
  int width;
  const int* offsets;
  const double* coeffs;
};

// second order
const int c2_off[] = {-1, 1};
const double c2_co[] = {-0.5, 0.5};
const int fwd2_off[] = {0, 1, 2};
const double fwd2_co[] = {-1.5, 2.0, -0.5};
const int bwd2_off[] = {-2, -1, 0};
const double bwd2_co[] = {0.5, -2.0, 1.5};
// fourth order
const int c4_off[] = {-2, -1, 1, 2};
const double c4_co[] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
const int fwd4_off[] = {0, 1, 2, 3, 4};
const double fwd4_co[] = {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -0.25};
const int off1f4_off[] = {-1, 0, 1, 2, 3};
const double off1f4_co[] = {-0.25, -5.0 / 6, 1.5, -0.5, 1.0 / 12};
const int bwd4_off[] = {-4, -3, -2, -1, 0};
const double bwd4_co[] = {0.25, -4.0 / 3, 3.0, -4.0, 25.0 / 12};
const int off1b4_off[] = {-3, -2, -1, 0, 1};
const double off1b4_co[] = {-1.0 / 12, 0.5, -1.5, 5.0 / 6, 0.25};

Stencil1 pick_stencil(FdScheme scheme, int i, int n) {
  switch (scheme) {
    case FdScheme::one_sided2:
      if (i + 2 < n) return {3, fwd2_off, fwd2_co};
      return {3, bwd2_off, bwd2_co};
    case FdScheme::central2:
      if (i == 0) return {3, fwd2_off, fwd2_co};
      if (i == n - 1) return {3, bwd2_off, bwd2_co};
      return {2, c2_off, c2_co};
    case FdScheme::central4:
      if (i == 0) return {5, fwd4_off, fwd4_co};
      if (i == 1) return {5, off1f4_off, off1f4_co};
      if (i == n - 1) return {5, bwd4_off, bwd4_co};
      if (i == n - 2) return {5, off1b4_off, off1b4_co};
      return {4, c4_off, c4_co};
  }
  throw Error("fd_partial: unknown scheme");
}

int scheme_min_res(FdScheme scheme) {
  switch (scheme) {
    case FdScheme::one_sided2:
    case FdScheme::central2:
      return 3;
    case FdScheme::central4:
      return 5;
  }
  return 3;
}

}  // namespace

SampledField fd_partial(const SampledField& f, int axis, FdScheme scheme) {
  const Grid& g = f.grid;
  if (axis < 0 || axis >= g.dim) throw Error("fd_partial: axis out of range");
  if (g.res[axis] < scheme_min_res(scheme))
    throw Error("fd_partial: grid too small for stencil on axis " + std::to_string(axis));
  SampledField out = make_field(g, f.rank_up, f.rank_down, false);
  out.valid = f.valid;
  const int cc = f.comp_count();
  const double invh = 1.0 / g.spacing(axis);
  // stride of one step along `axis` in flat numbering
  std::int64_t stride = 1;
  for (int a = g.dim - 1; a > axis; --a) stride *= g.res[a];
  for_each_index(g, IndexBox::full(g), [&](const std::array<int, kMaxDim>& idx) {
    Stencil1 st = pick_stencil(scheme, idx[axis], g.res[axis]);
    std::int64_t fp = g.flat(idx);
    for (int c = 0; c < cc; ++c) {
      double acc = 0;
      for (int k = 0; k < st.width; ++k) acc += st.coeffs[k] * f.at(fp + st.offsets[k] * stride, c);
      out.at(fp, c) = acc * invh;
    }
  });
  return out;
}

namespace {

inline double trap_weight(int i, int lo, int hi) {
  return (i == lo || i == hi) ? 0.5 : 1.0;
}

}  // namespace

double integrate(const SampledField& f, const IndexBox& region, int comp) {
  const Grid& g = f.grid;
  if (region.empty(g.dim)) throw Error("integrate: empty region");
  for (int a = 0; a < g.dim; ++a)
    if (region.lo[a] < 0 || region.hi[a] > g.res[a] - 1)
      throw Error("integrate: region outside grid");
  double cellvol = 1;
  for (int a = 0; a < g.dim; ++a) cellvol *= g.spacing(a);
  double acc = 0;
  for_each_index(g, region, [&](const std::array<int, kMaxDim>& idx) {
    double w = 1;
    for (int a = 0; a < g.dim; ++a) w *= trap_weight(idx[a], region.lo[a], region.hi[a]);
    acc += w * f.at(g.flat(idx), comp);
  });
  return acc * cellvol;
}

double integrate(const SampledField& f, int comp) {
  return integrate(f, IndexBox::full(f.grid), comp);
}

double integrate_masked(const SampledField& f, const std::vector<std::uint8_t>& mask, int comp) {
  const Grid& g = f.grid;
  if (mask.size() != static_cast<size_t>(g.npoints()))
    throw Error("integrate_masked: mask size mismatch");
  bool any = false;
  for (auto m : mask)
    if (m) {
      any = true;
      break;
    }
  if (!any) throw Error("integrate_masked: empty region");
  IndexBox full = IndexBox::full(g);
  double cellvol = 1;
  for (int a = 0; a < g.dim; ++a) cellvol *= g.spacing(a);
  double acc = 0;
  for_each_index(g, full, [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = g.flat(idx);
    if (!mask[fp]) return;
    double w = 1;
    for (int a = 0; a < g.dim; ++a) w *= trap_weight(idx[a], full.lo[a], full.hi[a]);
    acc += w * f.at(fp, comp);
  });
  return acc * cellvol;
}

double lp_norm(const SampledField& f, const IndexBox& region, double p) {
  const Grid& g = f.grid;
  const int cc = f.comp_count();
  if (p <= 0) {  // sup norm
    double s = 0;
    for_each_index(g, region, [&](const std::array<int, kMaxDim>& idx) {
      std::int64_t fp = g.flat(idx);
      double q = 0;
      for (int c = 0; c < cc; ++c) q += f.at(fp, c) * f.at(fp, c);
      s = std::max(s, q);
    });
    return std::sqrt(s);
  }
  double cellvol = 1;
  for (int a = 0; a < g.dim; ++a) cellvol *= g.spacing(a);
  double acc = 0;
  for_each_index(g, region, [&](const std::array<int, kMaxDim>& idx) {
    std::int64_t fp = g.flat(idx);
    double q = 0;
    for (int c = 0; c < cc; ++c) q += f.at(fp, c) * f.at(fp, c);
    double w = 1;
    for (int a = 0; a < g.dim; ++a) w *= trap_weight(idx[a], region.lo[a], region.hi[a]);
    acc += w * std::pow(std::sqrt(q), p);
  });
  return std::pow(acc * cellvol, 1.0 / p);
}

void save_field(const SampledField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("save_field: cannot open " + path);
  const char magic[4] = {'S', 'F', 'L', 'D'};
  os.write(magic, 4);
  std::uint32_t ver = 1, dim = f.grid.dim, ru = f.rank_up, rd = f.rank_down,
                sym = f.symmetric ? 1 : 0;
  os.write(reinterpret_cast<char*>(&ver), 4);
  os.write(reinterpret_cast<char*>(&dim), 4);
  for (int a = 0; a < f.grid.dim; ++a) {
    double lo = f.grid.lo[a], hi = f.grid.hi[a];
    std::uint64_t n = f.grid.res[a];
    os.write(reinterpret_cast<char*>(&lo), 8);
    os.write(reinterpret_cast<char*>(&hi), 8);
    os.write(reinterpret_cast<char*>(&n), 8);
  }
  os.write(reinterpret_cast<char*>(&ru), 4);
  os.write(reinterpret_cast<char*>(&rd), 4);
  os.write(reinterpret_cast<char*>(&sym), 4);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * 8));
  if (!os) throw Error("save_field: write failed for " + path);
}

SampledField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("load_field: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, "SFLD", 4) != 0) throw Error("load_field: bad magic in " + path);
  std::uint32_t ver, dim, ru, rd, sym;
  is.read(reinterpret_cast<char*>(&ver), 4);
  is.read(reinterpret_cast<char*>(&dim), 4);
  if (ver != 1 || dim == 0 || dim > static_cast<unsigned>(kMaxDim))
    throw Error("load_field: unsupported header in " + path);
  std::vector<std::pair<double, double>> bounds(dim);
  std::vector<int> res(dim);
  for (unsigned a = 0; a < dim; ++a) {
    double lo, hi;
    std::uint64_t n;
    is.read(reinterpret_cast<char*>(&lo), 8);
    is.read(reinterpret_cast<char*>(&hi), 8);
    is.read(reinterpret_cast<char*>(&n), 8);
    bounds[a] = {lo, hi};
    res[a] = static_cast<int>(n);
  }
  is.read(reinterpret_cast<char*>(&ru), 4);
  is.read(reinterpret_cast<char*>(&rd), 4);
  is.read(reinterpret_cast<char*>(&sym), 4);
  SampledField f = make_field(make_grid(bounds, res), ru, rd, sym != 0);
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * 8));
  if (!is) throw Error("load_field: truncated data in " + path);
  return f;
}

void export_csv_slice(const SampledField& f, const std::string& path,
                      const std::vector<int>& free_axes, const std::array<int, kMaxDim>& pin,
                      int comp) {
  if (free_axes.empty() || free_axes.size() > 2)
    throw Error("export_csv_slice: need 1 or 2 free axes");
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw Error("export_csv_slice: cannot open " + path);
  const Grid& g = f.grid;
  if (free_axes.size() == 1) {
    int ax = free_axes[0];
    std::fprintf(fp, "x%d,value\n", ax);
    std::array<int, kMaxDim> idx = pin;
    for (int i = 0; i < g.res[ax]; ++i) {
      idx[ax] = i;
      std::fprintf(fp, "%.17g,%.17g\n", g.coord(ax, i), f.at(g.flat(idx), comp));
    }
  } else {
    int ax = free_axes[0], ay = free_axes[1];
    std::fprintf(fp, "x%d,x%d,value\n", ax, ay);
    std::array<int, kMaxDim> idx = pin;
    for (int i = 0; i < g.res[ax]; ++i)
      for (int j = 0; j < g.res[ay]; ++j) {
        idx[ax] = i;
        idx[ay] = j;
        std::fprintf(fp, "%.17g,%.17g,%.17g\n", g.coord(ax, i), g.coord(ay, j),
                     f.at(g.flat(idx), comp));
      }
  }
  std::fclose(fp);
}

}  // namespace liplab

// liplab - small dense linear algebra for chart dimensions n <= 4
#ifndef LIPLAB_LINALG_HPP
#define LIPLAB_LINALG_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace liplab {

constexpr int kMaxDim = 4;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Fixed-capacity coordinate vector (runtime dimension n <= 4).
struct Vec {
  int n = 0;
  std::array<double, kMaxDim> c{};

  Vec() = default;
  explicit Vec(int dim) : n(dim) {}
  Vec(std::initializer_list<double> xs) {
    n = static_cast<int>(xs.size());
    int i = 0;
    for (double x : xs) c[i++] = x;
  }
  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
};

inline Vec operator+(Vec a, const Vec& b) {
  for (int i = 0; i < a.n; ++i) a.c[i] += b.c[i];
  return a;
}
inline Vec operator-(Vec a, const Vec& b) {
  for (int i = 0; i < a.n; ++i) a.c[i] -= b.c[i];
  return a;
}
inline Vec operator*(double s, Vec a) {
  for (int i = 0; i < a.n; ++i) a.c[i] *= s;
  return a;
}
inline double dot_euclid(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.n; ++i) s += a.c[i] * b.c[i];
  return s;
}
inline double norm_euclid(const Vec& a) { return std::sqrt(dot_euclid(a, a)); }

/// Fixed-capacity square matrix (runtime dimension n <= 4), row major.
struct Mat {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  Mat() = default;
  explicit Mat(int dim) : n(dim) {}
  double& operator()(int i, int j) { return a[i * n + j]; }
  double operator()(int i, int j) const { return a[i * n + j]; }

  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
  static Mat diag(std::initializer_list<double> ds) {
    Mat m(static_cast<int>(ds.size()));
    int i = 0;
    for (double d : ds) m(i, i) = d, ++i;
    return m;
  }
};

inline Mat operator+(Mat a, const Mat& b) {
  for (int i = 0; i < a.n * a.n; ++i) a.a[i] += b.a[i];
  return a;
}
inline Mat operator-(Mat a, const Mat& b) {
  for (int i = 0; i < a.n * a.n; ++i) a.a[i] -= b.a[i];
  return a;
}
inline Mat operator*(double s, Mat a) {
  for (int i = 0; i < a.n * a.n; ++i) a.a[i] *= s;
  return a;
}
inline Mat matmul(const Mat& a, const Mat& b) {
  Mat r(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int k = 0; k < a.n; ++k) {
      double aik = a(i, k);
      for (int j = 0; j < a.n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}
inline Vec matvec(const Mat& m, const Vec& v) {
  Vec r(m.n);
  for (int i = 0; i < m.n; ++i) {
    double s = 0;
    for (int j = 0; j < m.n; ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}
/// Quadratic form v^T m w.
inline double qform(const Mat& m, const Vec& v, const Vec& w) {
  double s = 0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) s += m(i, j) * v[i] * w[j];
  return s;
}
inline double qform(const Mat& m, const Vec& v) { return qform(m, v, v); }

double det(const Mat& m);

/// Cofactor (adjugate) based inverse; throws on |det| < tol.
Mat inverse_cofactor(const Mat& m, double tol = 1e-12, double* det_out = nullptr);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending order.
std::array<double, kMaxDim> sym_eigenvalues(Mat m);

/// True iff the symmetric matrix is positive definite (Cholesky succeeds).
bool cholesky_posdef(const Mat& m);

/// Signature check: exactly one negative eigenvalue, none within tol of zero.
bool is_lorentzian_signature(const Mat& m, double tol = 1e-12);

inline double frobenius(const Mat& m) {
  double s = 0;
  for (int i = 0; i < m.n * m.n; ++i) s += m.a[i] * m.a[i];
  return std::sqrt(s);
}
inline double max_abs(const Mat& m) {
  double s = 0;
  for (int i = 0; i < m.n * m.n; ++i) s = std::max(s, std::abs(m.a[i]));
  return s;
}

}  // namespace liplab

#endif

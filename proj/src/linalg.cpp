#include "liplab/linalg.hpp"

#include <algorithm>

namespace liplab {

namespace {

double det_recursive(const double* a, int n, int stride) {
  if (n == 1) return a[0];
  if (n == 2) return a[0] * a[stride + 1] - a[1] * a[stride];
  double s = 0.0, sign = 1.0;
  // expand along first row, minors copied into scratch
  double minor[kMaxDim * kMaxDim];
  for (int j = 0; j < n; ++j) {
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor[(r - 1) * (n - 1) + cc++] = a[r * stride + c];
      }
    }
    s += sign * a[j] * det_recursive(minor, n - 1, n - 1);
    sign = -sign;
  }
  return s;
}

}  // namespace

double det(const Mat& m) { return det_recursive(m.a.data(), m.n, m.n); }

Mat inverse_cofactor(const Mat& m, double tol, double* det_out) {
  const int n = m.n;
  double d = det(m);
  if (det_out) *det_out = d;
  if (std::abs(d) < tol)
    throw Error("inverse_cofactor: near-singular matrix, |det|=" + std::to_string(std::abs(d)));
  Mat inv(n);
  if (n == 1) {
    inv(0, 0) = 1.0 / d;
    return inv;
  }
  double minor[kMaxDim * kMaxDim];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int rr = 0;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        int cc = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          minor[rr * (n - 1) + cc++] = m(r, c);
        }
        ++rr;
      }
      double cof = det_recursive(minor, n - 1, n - 1);
      if ((i + j) % 2 != 0) cof = -cof;
      inv(j, i) = cof / d;  // adjugate transpose
    }
  }
  return inv;
}

std::array<double, kMaxDim> sym_eigenvalues(Mat m) {
  const int n = m.n;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(m(p, q)) < 1e-300) continue;
        double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
  }
  std::array<double, kMaxDim> ev{};
  for (int i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.begin() + n);
  return ev;
}

bool cholesky_posdef(const Mat& m) {
  const int n = m.n;
  Mat l(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

bool is_lorentzian_signature(const Mat& m, double tol) {
  auto ev = sym_eigenvalues(m);
  int neg = 0;
  for (int i = 0; i < m.n; ++i) {
    if (std::abs(ev[i]) <= tol) return false;
    if (ev[i] < 0) ++neg;
  }
  return neg == 1;
}

}  // namespace liplab

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cylwave/common.hpp"

namespace cylwave {

/// Dense row-major n x n matrix, sized for the fiber (5x5), spacetime (4x4)
/// and field-space (N x N) operators used throughout. Nothing clever: the
/// dimensions never exceed a few dozen.
class Mat {
public:
  Mat() : n_(0) {}
  explicit Mat(int n, double diag = 0.0) : n_(n), a_(std::size_t(n) * n, 0.0) {
    for (int i = 0; i < n; ++i) (*this)(i, i) = diag;
  }
  static Mat identity(int n) { return Mat(n, 1.0); }

  int n() const { return n_; }
  double& operator()(int i, int j) { return a_[std::size_t(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[std::size_t(i) * n_ + j]; }

  Mat& operator+=(const Mat& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Mat& operator*=(double c) {
    for (double& x : a_) x *= c;
    return *this;
  }
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, double c) { return a *= c; }
  friend Mat operator*(double c, Mat a) { return a *= c; }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat c(a.n_);
    for (int i = 0; i < a.n_; ++i)
      for (int k = 0; k < a.n_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (int j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0;
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  Mat transposed() const {
    Mat t(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const {
    double m = 0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
  }

  /// induced 1-norm (max column sum)
  double norm1() const {
    double m = 0;
    for (int j = 0; j < n_; ++j) {
      double s = 0;
      for (int i = 0; i < n_; ++i) s += std::abs((*this)(i, j));
      m = std::max(m, s);
    }
    return m;
  }

  /// Frobenius norm
  double frob() const {
    double s = 0;
    for (double x : a_) s += x * x;
    return std::sqrt(s);
  }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

private:
  int n_;
  std::vector<double> a_;
};

/// LU factorization with partial pivoting; enough for the N x N flow
/// Jacobians and 5x5 fiber blocks.
struct Lu {
  Mat lu;
  std::vector<int> piv;
  bool singular = false;

  explicit Lu(Mat a) : lu(std::move(a)), piv(lu.n()) {
    const int n = lu.n();
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
      int p = k;
      for (int i = k + 1; i < n; ++i)
        if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
      if (p != k) {
        for (int j = 0; j < n; ++j) std::swap(lu(p, j), lu(k, j));
        std::swap(piv[p], piv[k]);
      }
      if (lu(k, k) == 0.0) {
        singular = true;
        continue;
      }
      for (int i = k + 1; i < n; ++i) {
        lu(i, k) /= lu(k, k);
        const double lik = lu(i, k);
        for (int j = k + 1; j < n; ++j) lu(i, j) -= lik * lu(k, j);
      }
    }
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    const int n = lu.n();
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
      x[i] /= lu(i, i);
    }
    return x;
  }
};

inline Mat inverse(const Mat& a) {
  const int n = a.n();
  Lu f(a);
  if (f.singular) throw std::domain_error("inverse: singular matrix");
  Mat inv(n);
  std::vector<double> e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    auto col = f.solve(e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

/// 1-norm condition number computed from the explicit inverse.
inline double cond1(const Mat& a, const Mat& ainv) {
  return a.norm1() * ainv.norm1();
}

/// Symmetric check up to absolute tolerance.
inline bool is_symmetric(const Mat& a, double tol) {
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations.
inline std::vector<double> sym_eigenvalues(Mat a, int sweeps = 64) {
  const int n = a.n();
  for (int s = 0; s < sweeps; ++s) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += sq(a(i, j));
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1.0 / std::sqrt(t * t + 1), sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace cylwave

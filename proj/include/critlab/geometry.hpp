#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace critlab {

// Small fixed-capacity vector for points in R^n, n <= kMaxDim.
inline constexpr int kMaxDim = 6;

struct Vec {
  std::array<double, kMaxDim> c{};
  int n = 0;

  Vec() = default;
  explicit Vec(int dim) : n(dim) { assert(dim >= 0 && dim <= kMaxDim); }
  Vec(std::initializer_list<double> xs) {
    assert(static_cast<int>(xs.size()) <= kMaxDim);
    for (double x : xs) c[n++] = x;
  }
  static Vec zero(int dim) { return Vec(dim); }

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
  int size() const { return n; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n; ++i) c[i] *= s;
    return *this;
  }
  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

  double norm2() const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += c[i] * c[i];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }
  double normInf() const {
    double m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(c[i]));
    return m;
  }
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.n; ++i) s += a[i] * b[i];
  return s;
}

inline double distInf(const Vec& a, const Vec& b) { return (a - b).normInf(); }

// Dense n x n matrix, row major, same capacity as Vec.
struct Mat {
  std::array<double, kMaxDim * kMaxDim> m{};
  int n = 0;

  Mat() = default;
  explicit Mat(int dim) : n(dim) { assert(dim >= 0 && dim <= kMaxDim); }
  static Mat identity(int dim) {
    Mat I(dim);
    for (int i = 0; i < dim; ++i) I(i, i) = 1.0;
    return I;
  }

  double& operator()(int r, int c) { return m[r * n + c]; }
  double operator()(int r, int c) const { return m[r * n + c]; }

  double maxAbsEntry() const {
    double v = 0;
    for (int i = 0; i < n * n; ++i) v = std::max(v, std::fabs(m[i]));
    return v;
  }

  friend Mat operator-(const Mat& a, const Mat& b) {
    Mat r(a.n);
    for (int i = 0; i < a.n * a.n; ++i) r.m[i] = a.m[i] - b.m[i];
    return r;
  }
  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat r(a.n);
    for (int i = 0; i < a.n; ++i)
      for (int k = 0; k < a.n; ++k) {
        double aik = a(i, k);
        for (int j = 0; j < a.n; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }
  Vec apply(const Vec& x) const {
    Vec y(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }
};

inline double det(const Mat& a) {
  switch (a.n) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default:
      throw std::domain_error("det: dimension " + std::to_string(a.n) + " unsupported");
  }
}

// Cofactor matrix: d det(A)[H] = <cof(A), H>_F.
inline Mat cofactor(const Mat& a) {
  Mat c(a.n);
  switch (a.n) {
    case 1:
      c(0, 0) = 1.0;
      return c;
    case 2:
      c(0, 0) = a(1, 1);
      c(0, 1) = -a(1, 0);
      c(1, 0) = -a(0, 1);
      c(1, 1) = a(0, 0);
      return c;
    case 3:
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
          int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
          c(i, j) = a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0);
        }
      return c;
    default:
      throw std::domain_error("cofactor: dimension unsupported");
  }
}

// Smallest singular value via eigenvalues of A^T A (n <= 3).
double minSingularValue(const Mat& a);

// Axis-aligned box.
struct Cube {
  Vec lo, hi;

  int dim() const { return lo.n; }
  double side(int i) const { return hi[i] - lo[i]; }
  double volume() const {
    double v = 1;
    for (int i = 0; i < dim(); ++i) v *= side(i);
    return v;
  }
  Vec center() const {
    Vec c(dim());
    for (int i = 0; i < dim(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
  }
  bool contains(const Vec& x, double pad = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
    return true;
  }
  double maxSide() const {
    double s = 0;
    for (int i = 0; i < dim(); ++i) s = std::max(s, side(i));
    return s;
  }
  static Cube centered(const Vec& c, double halfSide) {
    Cube q;
    q.lo = c;
    q.hi = c;
    for (int i = 0; i < c.n; ++i) {
      q.lo[i] -= halfSide;
      q.hi[i] += halfSide;
    }
    return q;
  }
  static Cube symmetric(int dim, double halfSide) {
    return centered(Vec::zero(dim), halfSide);
  }
};

// Deterministic low-discrepancy points in a cube (Halton bases 2,3,5,...).
std::vector<Vec> haltonPoints(const Cube& box, int count, int skip = 32);

// Kahan compensated accumulator.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace critlab

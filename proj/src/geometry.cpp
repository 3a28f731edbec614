#include "critlab/geometry.hpp"

namespace critlab {

namespace {

// Eigenvalues of a symmetric matrix, n <= 3. For n == 3 uses the
// trigonometric closed form on the deflated matrix; stable enough for
// the well-conditioned Gram matrices we feed it.
std::array<double, 3> symEigenvalues(const Mat& s) {
  std::array<double, 3> ev{0, 0, 0};
  if (s.n == 1) {
    ev[0] = s(0, 0);
    return ev;
  }
  if (s.n == 2) {
    double tr = s(0, 0) + s(1, 1);
    double dt = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - dt));
    ev[0] = 0.5 * tr - disc;
    ev[1] = 0.5 * tr + disc;
    return ev;
  }
  double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
  double q = (s(0, 0) + s(1, 1) + s(2, 2)) / 3.0;
  if (p1 == 0.0) {
    ev = {s(0, 0), s(1, 1), s(2, 2)};
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  double p2 = 0;
  for (int i = 0; i < 3; ++i) {
    double d = s(i, i) - q;
    p2 += d * d;
  }
  p2 += 2.0 * p1;
  double p = std::sqrt(p2 / 6.0);
  Mat b(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (s(i, j) - (i == j ? q : 0.0)) / p;
  double r = det(b) / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  double phi = std::acos(r) / 3.0;
  ev[2] = q + 2.0 * p * std::cos(phi);
  ev[0] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  ev[1] = 3.0 * q - ev[0] - ev[2];
  std::sort(ev.begin(), ev.end());
  return ev;
}

double haltonScalar(uint64_t index, uint32_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

double minSingularValue(const Mat& a) {
  Mat g(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) {
      double s = 0;
      for (int k = 0; k < a.n; ++k) s += a(k, i) * a(k, j);
      g(i, j) = s;
    }
  auto ev = symEigenvalues(g);
  return std::sqrt(std::max(0.0, ev[0]));
}

std::vector<Vec> haltonPoints(const Cube& box, int count, int skip) {
  static constexpr uint32_t bases[kMaxDim] = {2, 3, 5, 7, 11, 13};
  std::vector<Vec> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vec p(box.dim());
    for (int j = 0; j < box.dim(); ++j) {
      double u = haltonScalar(static_cast<uint64_t>(i + skip), bases[j]);
      p[j] = box.lo[j] + u * box.side(j);
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace critlab

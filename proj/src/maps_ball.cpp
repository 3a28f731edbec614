#include "critlab/maps_ball.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

namespace critlab {

BallMap::BallMap(int n, double q, double a, double beta)
    : n_(n), q_(q), a_(a), beta_(beta) {
    if (n < 2 || n > kMaxDim) throw PreconditionError("ball: dim out of range");
    if (q <= 0.0 || a <= 0.0) throw PreconditionError("ball: needs q > 0 and a > 0");
    const double lo = 2.0 - (n - 1) / q, hi = (n - 1) / a;
    if (!(beta > lo && beta < hi))
        throw PreconditionError("ball: beta outside the finite-energy window (" +
                                std::to_string(lo) + ", " + std::to_string(hi) + ")");
}

Cube BallMap::domain() const {
    Cube c = Cube::symmetric(n_, 1.0);
    c.lo[n_ - 1] = -2.0;
    c.hi[n_ - 1] = 2.0;
    return c;
}

Vec BallMap::value(const Vec& x) const {
    requireInside(x);
    double rb2 = 0.0;
    for (int j = 0; j + 1 < n_; ++j) rb2 += x[j] * x[j];
    const double rb = std::sqrt(rb2);
    const double xn = x[n_ - 1], axn = std::abs(xn);
    Vec y = x;
    if (axn <= 1.0) {
        y[n_ - 1] = std::pow(rb, beta_) * xn;
    } else {
        const double g = (axn - 1.0) * (axn - 1.0) + std::pow(rb, beta_) * axn;
        y[n_ - 1] = (xn >= 0.0 ? g : -g);
    }
    return y;
}

Mat BallMap::grad(const Vec& x) const {
    requireInside(x);
    double rb2 = 0.0;
    for (int j = 0; j + 1 < n_; ++j) rb2 += x[j] * x[j];
    const double rb = std::sqrt(rb2);
    const double xn = x[n_ - 1], axn = std::abs(xn);
    Mat g = Mat::identity(n_);
    if (rb == 0.0 && beta_ < 1.0)
        throw PreconditionError("ball: gradient singular on the axis for beta < 1");
    const double rbm2 = rb > 0.0 ? std::pow(rb, beta_ - 2.0) : 0.0;
    for (int j = 0; j + 1 < n_; ++j) g(n_ - 1, j) = beta_ * rbm2 * x[j] * xn;
    if (axn <= 1.0)
        g(n_ - 1, n_ - 1) = std::pow(rb, beta_);
    else
        g(n_ - 1, n_ - 1) = 2.0 * (axn - 1.0) + std::pow(rb, beta_);
    return g;
}

double BallMap::jac(const Vec& x) const {
    requireInside(x);
    double rb2 = 0.0;
    for (int j = 0; j + 1 < n_; ++j) rb2 += x[j] * x[j];
    const double rb = std::sqrt(rb2);
    const double axn = std::abs(x[n_ - 1]);
    if (axn <= 1.0) return std::pow(rb, beta_);
    return 2.0 * (axn - 1.0) + std::pow(rb, beta_);
}

double BallMap::d2Norm(const Vec& x) const {
    requireInside(x);
    double rb2 = 0.0;
    for (int j = 0; j + 1 < n_; ++j) rb2 += x[j] * x[j];
    const double rb = std::sqrt(rb2);
    if (rb == 0.0) return std::numeric_limits<double>::infinity();
    const double xn = x[n_ - 1], axn = std::abs(xn);
    const double rbm2 = std::pow(rb, beta_ - 2.0), rbm4 = std::pow(rb, beta_ - 4.0);
    double v = axn > 1.0 ? 2.0 : 0.0;
    for (int j = 0; j + 1 < n_; ++j) {
        v = std::max(v, std::abs(beta_ * rbm2 * x[j]));
        for (int l = 0; l + 1 < n_; ++l) {
            double e = beta_ * xn * (beta_ - 2.0) * rbm4 * x[j] * x[l];
            if (j == l) e += beta_ * xn * rbm2;
            v = std::max(v, std::abs(e));
        }
    }
    return v;
}

bool BallMap::d2Tensor(const Vec& x, double T[kMaxDim][kMaxDim][kMaxDim]) const {
    requireInside(x);
    double rb2 = 0.0;
    for (int j = 0; j + 1 < n_; ++j) rb2 += x[j] * x[j];
    const double rb = std::sqrt(rb2);
    if (rb == 0.0)
        throw PreconditionError("ball: second derivatives singular on the axis");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) T[i][j][k] = 0.0;
    const double xn = x[n_ - 1], axn = std::abs(xn);
    const double rbm2 = std::pow(rb, beta_ - 2.0), rbm4 = std::pow(rb, beta_ - 4.0);
    const int nn = n_ - 1;
    T[nn][nn][nn] = axn > 1.0 ? 2.0 * (xn >= 0.0 ? 1.0 : -1.0) : 0.0;
    for (int j = 0; j < nn; ++j) {
        T[nn][nn][j] = T[nn][j][nn] = beta_ * rbm2 * x[j];
        for (int l = 0; l < nn; ++l) {
            double e = beta_ * xn * (beta_ - 2.0) * rbm4 * x[j] * x[l];
            if (j == l) e += beta_ * xn * rbm2;
            T[nn][j][l] = e;
        }
    }
    return true;
}

double BallMap::singularDistance(const Vec& x) const {
    double rb2 = 0.0;
    for (int j = 0; j + 1 < n_; ++j) rb2 += x[j] * x[j];
    const double seam = std::abs(std::abs(x[n_ - 1]) - 1.0);
    return std::min(std::sqrt(rb2), seam);
}

std::string BallMap::lociDescription() const {
    return "axis {xb = 0} (J = 0 on the core segment); seams {|xn| = 1} are C^1 only";
}

nlohmann::json BallMap::spec() const {
    return {{"family", "ball"},
            {"n", n_},
            {"params", {{"q", q_}, {"a", a_}, {"beta", beta_}}}};
}

}  // namespace critlab

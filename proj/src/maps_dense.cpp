#include "critlab/maps_dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

namespace critlab {

SqueezeProfile::SqueezeProfile(double r)
    : r_(r),
      L_(-std::log(r)),
      tail_(r, r, {1.5 * r, 2.0 * r},
            {1.0 + 1.0 / -std::log(r), 1.0 - 1.0 / -std::log(r), 1.0}, 0.25 * r) {
    if (!(r > 0.0) || r > 0.125)
        throw PreconditionError("squeeze profile: radius must lie in (0, 1/8]");
}

double SqueezeProfile::value(double t) const {
    if (t <= 0.0) return 0.0;
    if (t < r_) return t * L_ / -std::log(t);
    if (t < 1.25 * r_) return (1.0 + 1.0 / L_) * t - r_ / L_;
    return tail_.value(t);
}

double SqueezeProfile::d1(double t) const {
    if (t <= 0.0) return 0.0;
    if (t < r_) {
        const double u = -std::log(t);
        return L_ * (u + 1.0) / (u * u);
    }
    if (t < 1.25 * r_) return 1.0 + 1.0 / L_;
    return tail_.d1(t);
}

double SqueezeProfile::d2(double t) const {
    if (t <= 0.0) return 0.0;
    if (t < r_) {
        const double u = -std::log(t);
        return L_ * (u + 2.0) / (t * u * u * u);
    }
    if (t < 1.25 * r_) return 0.0;
    return tail_.d2(t);
}

Vec DenseFactor::value(const Vec& y) const {
    Vec d = y - center;
    const double t = d.norm();
    if (t >= profile->support()) return y;
    if (t == 0.0) return center;
    const double h = profile->value(t);
    d *= h / t;
    return center + d;
}

Mat DenseFactor::grad(const Vec& y) const {
    const int n = y.size();
    Vec d = y - center;
    const double t = d.norm();
    if (t >= profile->support()) return Mat::identity(n);
    Mat g = Mat::identity(n);
    if (t == 0.0) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = 0.0;
        return g;
    }
    const double sPar = profile->d1(t), sPerp = profile->value(t) / t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = (i == j ? sPerp : 0.0) + (sPar - sPerp) * d[i] * d[j] / (t * t);
    return g;
}

double DenseFactor::jacAt(const Vec& y) const {
    const double t = (y - center).norm();
    if (t >= profile->support()) return 1.0;
    if (t == 0.0) return 0.0;
    return profile->d1(t) * profile->value(t) / t;
}

double DenseFactor::d2NormAt(const Vec& y) const {
    const double t = (y - center).norm();
    if (t >= profile->support()) return 0.0;
    if (t == 0.0) return std::numeric_limits<double>::infinity();
    const double sPar = profile->d1(t), sPerp = profile->value(t) / t;
    return std::max(std::abs(profile->d2(t)), std::abs(sPar - sPerp) / t);
}

double DenseFactor::dfNormAt(const Vec& y) const {
    const double t = (y - center).norm();
    if (t >= profile->support()) return 1.0;
    if (t == 0.0) return 0.0;
    return std::max(std::abs(profile->d1(t)), std::abs(profile->value(t) / t));
}

DenseMap::DenseMap(std::vector<Vec> centers, std::vector<double> radii, double q, double a)
    : q_(q), a_(a) {
    if (centers.empty()) throw PreconditionError("dense: needs at least one center");
    if (q <= 1.0 || a <= 0.0) throw PreconditionError("dense: needs q > 1 and a > 0");
    for (const Vec& c : centers) {
        if (c.size() != 2) throw PreconditionError("dense: centers must be planar");
        if (c.norm() >= 1.0) throw PreconditionError("dense: centers must lie in the open unit disk");
    }
    for (size_t i = 0; i < centers.size(); ++i)
        for (size_t j = i + 1; j < centers.size(); ++j)
            if ((centers[i] - centers[j]).norm() < 1e-6)
                throw PreconditionError("dense: centers too close together");

    if (radii.empty()) radii = chooseRadii(centers, q, a);
    if (radii.size() != centers.size())
        throw PreconditionError("dense: radii/centers size mismatch");

    for (size_t i = 0; i < centers.size(); ++i) {
        double minSep = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < centers.size(); ++j)
            if (j != i) minSep = std::min(minSep, (centers[i] - centers[j]).norm());
        const double capSep = centers.size() > 1
                                  ? std::pow(4.0, -static_cast<double>(i)) * minSep * minSep / 6.0
                                  : std::numeric_limits<double>::infinity();
        const double cap = std::min({(1.0 - centers[i].norm()) / 6.0, capSep,
                                     std::pow(8.0, -static_cast<double>(i) - 1.0)});
        if (!(radii[i] > 0.0) || radii[i] > cap * (1.0 + 1e-12))
            throw PreconditionError("dense: radius " + std::to_string(i) +
                                    " violates the separation rule");
        double d2Mass, jacMass;
        factorBudget(radii[i], a, d2Mass, jacMass);
        const double lvl = static_cast<double>(i) + 1.0;
        if (std::pow(4.0, lvl - 1.0) * d2Mass > std::pow(2.0, -lvl) ||
            jacMass > std::pow(2.0, -2.0 * lvl))
            throw PreconditionError("dense: radius " + std::to_string(i) +
                                    " violates the energy budget");
    }

    radii_ = radii;
    for (size_t i = 0; i < centers.size(); ++i)
        factors_.push_back({centers[i], std::make_shared<SqueezeProfile>(radii[i])});
}

Vec DenseMap::value(const Vec& x) const {
    requireInside(x);
    Vec y = x;
    for (const auto& f : factors_) y = f.value(y);
    return y;
}

Mat DenseMap::grad(const Vec& x) const {
    requireInside(x);
    Vec y = x;
    Mat g = Mat::identity(2);
    for (const auto& f : factors_) {
        g = f.grad(y) * g;
        y = f.value(y);
    }
    return g;
}

double DenseMap::jac(const Vec& x) const {
    requireInside(x);
    Vec y = x;
    double j = 1.0;
    for (const auto& f : factors_) {
        j *= f.jacAt(y);
        y = f.value(y);
    }
    return j;
}

double DenseMap::d2Norm(const Vec& x) const {
    requireInside(x);
    Vec y = x;
    double d2 = 0.0, df = 1.0;
    for (const auto& f : factors_) {
        d2 = f.d2NormAt(y) * df * df + f.dfNormAt(y) * d2;
        df *= f.dfNormAt(y);
        y = f.value(y);
    }
    return d2;
}

double DenseMap::singularDistance(const Vec& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < factors_.size(); ++i) {
        const double t = (x - factors_[i].center).norm();
        d = std::min({d, t, std::abs(t - radii_[i])});
    }
    return d;
}

std::string DenseMap::lociDescription() const {
    return "the centers (J = 0, unbounded curvature) and the circles |x - x_i| = r_i";
}

nlohmann::json DenseMap::spec() const {
    nlohmann::json centers = nlohmann::json::array();
    for (const auto& f : factors_) centers.push_back({f.center[0], f.center[1]});
    return {{"family", "dense"},
            {"n", 2},
            {"params", {{"q", q_}, {"a", a_}, {"centers", centers}, {"radii", radii_}}}};
}

double DenseMap::factorDfBound(int i) const {
    const auto& p = *factors_.at(i).profile;
    double b = 0.0;
    const int N = 4000;
    for (int k = 1; k <= N; ++k) {
        // log-spaced into the contraction zone plus linear over the tail
        const double tLog = p.r() * std::exp(-12.0 * (N - k) / double(N));
        const double tLin = p.r() * (1.0 + 1.25 * k / double(N));
        for (double t : {tLog, tLin})
            b = std::max({b, std::abs(p.d1(t)), p.value(t) / t});
    }
    return b;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

const double kGlx8[8] = {-0.9602898564975362, -0.7966664774136267, -0.525532409916329,
                         -0.1834346424956498, 0.1834346424956498,  0.525532409916329,
                         0.7966664774136267,  0.9602898564975362};
const double kGlw8[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                         0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                         0.2223810344533745, 0.1012285362903763};

template <typename F>
double gl8(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += kGlw8[i] * f(mid + half * kGlx8[i]);
    return s * half;
}

// Radial integral int_0^{2.25 r} g(t) 2 pi t dt with geometric grading into
// the log-contraction zone and fine panels across the mollified kinks.
template <typename F>
double radialMass(const SqueezeProfile& p, F&& g) {
    const double r = p.r();
    double total = 0.0;
    double hi = r;
    for (int j = 0; j < 120 && hi > 1e-300; ++j) {
        const double lo = 0.5 * hi;
        total += gl8([&](double t) { return g(t) * 2.0 * kPi * t; }, lo, hi);
        hi = lo;
    }
    const int panels = 40;
    for (int k = 0; k < panels; ++k) {
        const double lo = r + 1.25 * r * k / panels;
        const double up = r + 1.25 * r * (k + 1) / panels;
        total += gl8([&](double t) { return g(t) * 2.0 * kPi * t; }, lo, up);
    }
    return total;
}

}  // namespace

void DenseMap::factorBudget(double r, double a, double& d2Mass, double& jacMass) {
    SqueezeProfile p(r);
    d2Mass = radialMass(p, [&](double t) {
        const double sPar = p.d1(t), sPerp = p.value(t) / t;
        return std::max(std::abs(p.d2(t)), std::abs(sPar - sPerp) / t);
    });
    jacMass = radialMass(p, [&](double t) {
        const double j = p.d1(t) * p.value(t) / t;
        return std::pow(j, -a) - 1.0;
    });
}

double DenseMap::d2SquaredMass(double r) {
    SqueezeProfile p(r);
    return radialMass(p, [&](double t) {
        const double sPar = p.d1(t), sPerp = p.value(t) / t;
        const double m = std::max(std::abs(p.d2(t)), std::abs(sPar - sPerp) / t);
        return m * m;
    });
}

std::vector<double> DenseMap::chooseRadii(const std::vector<Vec>& centers, double /*q*/, double a) {
    std::vector<double> radii;
    for (size_t i = 0; i < centers.size(); ++i) {
        double minSep = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < centers.size(); ++j)
            if (j != i) minSep = std::min(minSep, (centers[i] - centers[j]).norm());
        double r = std::pow(8.0, -static_cast<double>(i) - 1.0);
        r = std::min(r, (1.0 - centers[i].norm()) / 6.0);
        if (centers.size() > 1)
            r = std::min(r, std::pow(4.0, -static_cast<double>(i)) * minSep * minSep / 6.0);
        const double lvl = static_cast<double>(i) + 1.0;
        for (int halvings = 0;; ++halvings) {
            if (halvings > 200)
                throw PreconditionError("dense: radius selection failed to meet the budget");
            double d2Mass, jacMass;
            factorBudget(r, a, d2Mass, jacMass);
            if (std::pow(4.0, lvl - 1.0) * d2Mass <= std::pow(2.0, -lvl) &&
                jacMass <= std::pow(2.0, -2.0 * lvl))
                break;
            r *= 0.5;
        }
        radii.push_back(r);
    }
    return radii;
}

std::vector<Vec> denseDefaultCenters(int k) {
    static const std::vector<Vec> all = {
        Vec{0.0, 0.0},    Vec{0.5, 0.0},    Vec{-0.3, 0.4},  Vec{0.2, -0.45},
        Vec{-0.5, -0.3},  Vec{0.35, 0.35},  Vec{-0.15, -0.6}, Vec{0.6, -0.25}};
    if (k < 1 || k > static_cast<int>(all.size()))
        throw PreconditionError("dense: default center count must be 1..8");
    return {all.begin(), all.begin() + k};
}

}  // namespace critlab

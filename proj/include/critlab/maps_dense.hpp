#pragma once

#include "critlab/map.hpp"
#include "critlab/profiles.hpp"

#include <memory>
#include <vector>

namespace critlab {

// Radial squeeze profile used by one factor of the dense-critical-set map.
// With L = log(1/r) and u = log(1/t),
//   (0, r]:        h(t) = t L / u            (h(0+) = 0, h'(0+) = 0)
//   [r, 3r/2]:     h(t) = (1 + 1/L) t - r/L
//   [3r/2, 2r]:    h(t) = (1 - 1/L) t + 2r/L
//   [2r, inf):     h(t) = t
// and the kinks at 3r/2 and 2r are smoothed by convolution at radius r/4, so
// h is C^2 on (0, inf), h(t) = t exactly for t >= 9r/4, and
// sup h' <= 1 + 1/L. Requires r <= 1/8 so that L >= log 8 > 2.
class SqueezeProfile {
public:
    SqueezeProfile(double r);
    double value(double t) const;
    double d1(double t) const;
    double d2(double t) const;
    double r() const { return r_; }
    double L() const { return L_; }
    double support() const { return 2.25 * r_; }  // identity beyond this

private:
    double r_, L_;
    MollifiedPwLinear tail_;
};

// One radial factor f(y) = x + h(|y - x|) (y - x)/|y - x|: the identity far
// from x, a logarithmic contraction toward x, Df(x) = 0.
struct DenseFactor {
    Vec center;
    std::shared_ptr<SqueezeProfile> profile;

    Vec value(const Vec& y) const;
    Mat grad(const Vec& y) const;
    double jacAt(const Vec& y) const;
    double d2NormAt(const Vec& y) const;
    double dfNormAt(const Vec& y) const;
};

// Composition F = f_k o ... o f_1 of factors centered at a prescribed list of
// points in the open unit disk (n = 2). Radii shrink fast enough that each
// factor is the identity near every other center, so J_F vanishes exactly at
// every center, while the curvature mass and the |J|^{-a} energy stay finite
// (each factor adds a summably small increment).
class DenseMap final : public Map {
public:
    // radii empty: choose them by the constructive rule (see chooseRadii).
    DenseMap(std::vector<Vec> centers, std::vector<double> radii, double q, double a);

    std::string family() const override { return "dense"; }
    int dim() const override { return 2; }
    Cube domain() const override { return Cube::symmetric(2, 1.0); }

    Vec value(const Vec& x) const override;
    Mat grad(const Vec& x) const override;
    double jac(const Vec& x) const override;
    double d2Norm(const Vec& x) const override;  // composition upper bound

    double singularDistance(const Vec& x) const override;
    std::string lociDescription() const override;
    nlohmann::json spec() const override;

    int factorCount() const { return static_cast<int>(factors_.size()); }
    const DenseFactor& factor(int i) const { return factors_[i]; }

    // sup over the i-th factor of max(h', h/t), sampled densely; <= 1 + 1/L.
    double factorDfBound(int i) const;

    // Starting radius for center i under the separation rule
    //   r_i = min{ (1-|x_i|)/6, 4^{1-i} min_{j != i} |x_i - x_j|^2 / 6, 8^{-i} }
    // (i is 1-based), then halved until the budget checks pass:
    //   4^{i-1} * int_{B(x_i, 2.25 r_i)} |D^2 f_i|      <= 2^{-i}
    //   int_{B(x_i, 2.25 r_i)} (J_{f_i}^{-a} - 1)       <= 2^{-2i}
    // (4^{i-1} covers the chain-rule growth through the earlier factors, whose
    // Lipschitz product stays below 2^{i-1}).
    static std::vector<double> chooseRadii(const std::vector<Vec>& centers, double q, double a);

    // The two budget integrals for a single factor of radius r (1-D radial
    // quadrature of the closed forms).
    static void factorBudget(double r, double a, double& d2Mass, double& jacMass);

    // int_{B(0, 2.25 r)} |D^2 f|^2 for a single factor of radius r.
    static double d2SquaredMass(double r);

private:
    std::vector<DenseFactor> factors_;
    double q_, a_;
    std::vector<double> radii_;
};

// Deterministic default center list (k points, first at the origin).
std::vector<Vec> denseDefaultCenters(int k);

}  // namespace critlab

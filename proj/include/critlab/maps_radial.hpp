#pragma once

#include "critlab/map.hpp"

namespace critlab {

// Radial maps f(x) = rho(|x|) x/|x|, evaluated through the scale function
// S(s) = rho(sqrt(s))/sqrt(s) with s = |x|^2, so that
//   f_i = S x_i,   Df = S I + 2 S' x x^T,   J = S^{n-1} (S + 2 S' |x|^2),
//   d^2 f_i/dx_j dx_k = 2 S'(d_ij x_k + d_ik x_j + d_jk x_i) + 4 S'' x_i x_j x_k.
// Profiles:
//   power   rho(t) = t^p          (p = 1 is the identity; p != 1 singular at 0)
//   cubic   rho(t) = t (1 + c t^2) (smooth everywhere, near-identity for small c)
//   ballbump rho(t) = t * amp * exp(-1/(1 - (t^2/R^2)^2)) for t < R, else 0.
//            A compactly supported test field (vanishes with all derivatives at
//            |x| = R), not an invertible map; used as a perturbation direction.
struct RadialProfile {
    std::string kind = "power";
    double p = 1.0;
    double c = 0.0;
    double amp = 0.0;
    double R = 1.0;

    // S, S', S'' at s = |x|^2.
    void scale(double s, double& S, double& S1, double& S2) const;
    // rho, rho', rho'' at t = |x|, the radius-to-radius profile.
    void rho(double t, double& r0, double& r1, double& r2) const;
    bool smoothAtOrigin() const;
};

class RadialMap final : public Map {
public:
    RadialMap(int n, RadialProfile prof);

    std::string family() const override { return "radial"; }
    int dim() const override { return n_; }
    Cube domain() const override { return Cube::symmetric(n_, 1.0); }

    Vec value(const Vec& x) const override;
    Mat grad(const Vec& x) const override;
    double jac(const Vec& x) const override;
    double d2Norm(const Vec& x) const override;  // max{|rho''|, |rho/r^2 - rho'/r|}
    bool d2Tensor(const Vec& x, double T[kMaxDim][kMaxDim][kMaxDim]) const override;

    double dfNorm(const Vec& x) const;  // max{rho/r, |rho'|}
    double singularDistance(const Vec& x) const override;
    std::string lociDescription() const override;
    Cube supportCube() const override;

    nlohmann::json spec() const override;
    const RadialProfile& profile() const { return prof_; }

private:
    void check(const Vec& x) const;
    int n_;
    RadialProfile prof_;
};

}  // namespace critlab

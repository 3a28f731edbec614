#pragma once

#include "critlab/map.hpp"

namespace critlab {

// Axis squeeze on [-1,1]^{n-1} x [-2,2]. Writing x = (xb, xn) with xb the
// leading n-1 coordinates and rb = |xb|,
//   core  |xn| <= 1:     f = (xb, rb^beta xn),            J = rb^beta
//   outer 1 < |xn| <= 2:  fn = sgn(xn) ((|xn|-1)^2 + rb^beta |xn|),
//                         J = 2(|xn|-1) + rb^beta
// The two pieces agree to first order across |xn| = 1. J vanishes exactly on
// the core axis segment {xb = 0, |xn| <= 1}; the map collapses that segment
// to the origin while staying a homeomorphism outside it.
// Finite energy at (q, a) needs (n-1)/a > beta > 2 - (n-1)/q, enforced here.
class BallMap final : public Map {
public:
    BallMap(int n, double q, double a, double beta);

    std::string family() const override { return "ball"; }
    int dim() const override { return n_; }
    Cube domain() const override;

    Vec value(const Vec& x) const override;
    Mat grad(const Vec& x) const override;
    double jac(const Vec& x) const override;
    double d2Norm(const Vec& x) const override;
    bool d2Tensor(const Vec& x, double T[kMaxDim][kMaxDim][kMaxDim]) const override;

    double singularDistance(const Vec& x) const override;
    std::string lociDescription() const override;
    nlohmann::json spec() const override;

    double beta() const { return beta_; }

private:
    int n_;
    double q_, a_, beta_;
};

}  // namespace critlab

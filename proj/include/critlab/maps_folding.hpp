#pragma once

#include "critlab/map.hpp"

#include <vector>

namespace critlab {

// Sign-breaking fold on [-1,1]^n. Writing x = (x1, xt) with xt the trailing
// n-1 coordinates, the map keeps xt fixed and pushes x1 through a piecewise
// power profile that depends on the depth function
//   h(xt) = min{0, -(1 - |xt|^2)^3 / 2}  in [-1/2, 0].
// With m = (-h)^alpha the first component is
//   x1 >= 0:          F = x1^alpha
//   h/2 < x1 < 0:     F = 2^{alpha-1} (-x1)^alpha
//   h <= x1 <= h/2:   F = -2^{alpha-1} (x1 - h)^alpha + m
//   x1 < h:           F = M(h) (h - x1)^alpha + m,  M = (-1 - m)/(h + 1)^alpha
// F is C^1 across the seams, F(-1, xt) = -1, and the Jacobian J = dF/dx1 is
// negative exactly on {h < x1 < 0} and zero on {x1 = 0} u {x1 = h}.
// The admissible exponent window for finite energy at (q, a) is
// 2 - 1/q < alpha < 1 + 1/a; out-of-window alpha is accepted (and reported by
// admissible()) so the sharpness experiments can drive the energy divergent.
class FoldingMap final : public Map {
public:
    FoldingMap(int n, double q, double a, double alpha);

    std::string family() const override { return "folding"; }
    int dim() const override { return n_; }
    Cube domain() const override { return Cube::symmetric(n_, 1.0); }

    Vec value(const Vec& x) const override;
    Mat grad(const Vec& x) const override;
    double jac(const Vec& x) const override;
    double d2Norm(const Vec& x) const override;
    bool d2Tensor(const Vec& x, double T[kMaxDim][kMaxDim][kMaxDim]) const override;

    double singularDistance(const Vec& x) const override;
    std::string lociDescription() const override;
    nlohmann::json spec() const override;

    double alpha() const { return alpha_; }
    bool admissible() const { return admissible_; }

    // Depth function at the trailing coordinates and its derivatives with
    // respect to them (dh has n-1 entries; d2h is (n-1)x(n-1)).
    double depth(const Vec& x, double* dh = nullptr, double* d2h = nullptr) const;

    // First component F(x1; h) of the fold, with dF/dx1 on request.
    double foldProfile(double x1, double h, double* dF1 = nullptr) const;

    // Count distinct preimages of y on the domain. Preimages share the
    // trailing coordinates with y, so candidates are located by clustering a
    // 1-D grid scan of F(.; h(yt)) and polished by per-branch bisection.
    // outsideRange is set when the first coordinate misses the image interval.
    // tangentialWarning is set when a root has |dF/dx1| below 1e-8 and the
    // count falls back to the cluster count.
    int preimageCount(const Vec& y, int gridRes, std::vector<Vec>* roots = nullptr,
                      bool* outsideRange = nullptr, bool* tangentialWarning = nullptr) const;

private:
    struct Parts;  // branch values and partials at a point
    void eval(const Vec& x, Parts& p, bool second) const;

    int n_;
    double q_, a_, alpha_;
    bool admissible_;
};

}  // namespace critlab

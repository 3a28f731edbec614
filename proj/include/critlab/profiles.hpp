#pragma once

#include <vector>

namespace critlab {

// Normalized C-infinity bump on (-1,1):  phi(u) = c * exp(-1/(1-u^2)),
// with c chosen so that the integral over (-1,1) is 1.
//
// Besides the pointwise value and derivatives, the kernel exposes its
// antiderivatives cdf(u) = \int_{-1}^u phi and moment(u) = \int_{-1}^u s phi(s) ds.
// These two make convolutions of piecewise-linear functions exact:
//   (max(.,0) * phi_eps)(t) = eps * ramp(t/eps),   ramp(u) = u*cdf(u) - moment(u).
// cdf/moment are tabulated once on a dense grid and interpolated with cubic
// Hermite polynomials using the exact derivative data (phi and u*phi), so the
// interpolation error is far below 1e-12.
class BumpKernel {
public:
    static const BumpKernel& instance();

    double value(double u) const;   // phi(u)
    double d1(double u) const;      // phi'(u)
    double d2(double u) const;      // phi''(u)
    double cdf(double u) const;     // in [0,1], exact 0/1 outside (-1,1)
    double moment(double u) const;  // odd kernel moment, 0 at |u|>=1
    double ramp(double u) const;    // u*cdf(u) - moment(u); 0 for u<=-1, u for u>=1

    double normConstant() const { return c_; }

private:
    BumpKernel();
    double interp(const std::vector<double>& table, bool isCdf, double u) const;

    int n_;
    double h_;                   // grid spacing 2/n_
    double c_;                   // normalization constant
    std::vector<double> F_, M_;  // cdf / moment values at grid nodes
};

// C-infinity monotone step: 0 for u <= 0, 1 for u >= 1, built from
// B(u) = exp(-1/u) as B(u) / (B(u) + B(1-u)).
struct SmoothStep {
    static double value(double u);
    static double d1(double u);
    static double d2(double u);
};

// C-infinity cutoff lambda_{a,b}: identically 1 on (-inf, a], identically 0 on
// [b, inf), strictly decreasing on (a, b).
class CutoffWindow {
public:
    CutoffWindow(double a, double b);
    double value(double t) const;
    double d1(double t) const;
    double d2(double t) const;
    double left() const { return a_; }
    double right() const { return b_; }

private:
    double a_, b_, inv_;
};

// Continuous piecewise-linear function smoothed by convolution with the bump
// kernel at radius eps.  The function is anchored at (t0, v0) with initial
// slope slopes[0]; slope changes to slopes[k+1] at kinks[k].  value/d1/d2
// evaluate the exact convolution via the kernel's ramp decomposition; raw gives
// the unsmoothed function.  With eps = 0 the two coincide.
class MollifiedPwLinear {
public:
    MollifiedPwLinear(double t0, double v0, std::vector<double> kinks,
                      std::vector<double> slopes, double eps);

    double value(double t) const;
    double d1(double t) const;
    double d2(double t) const;
    double raw(double t) const;
    double rawD1(double t) const;

    double eps() const { return eps_; }
    const std::vector<double>& kinks() const { return kinks_; }
    const std::vector<double>& slopes() const { return slopes_; }

private:
    double t0_, v0_;
    std::vector<double> kinks_, slopes_, jumps_;
    double eps_;
};

}  // namespace critlab

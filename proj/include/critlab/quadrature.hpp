#pragma once

#include "critlab/cantor.hpp"
#include "critlab/map.hpp"
#include "critlab/regimes.hpp"

#include <functional>
#include <vector>

namespace critlab {

// Integrand selectors for the two energy channels. MaxEntryQ uses the
// max-entry second-derivative magnitude every family provides; FrobeniusQ
// needs the full tensor (and is what the Euler-Lagrange residual
// differentiates). AbsDetNegA integrates |det|^{-a}; DetNegA keeps the sign
// and goes non-finite on orientation-reversing regions.
enum class PsiKind { MaxEntryQ, FrobeniusQ };
enum class PhiKind { AbsDetNegA, DetNegA };

struct EnergyParams {
    double q = 2.0;
    double a = 1.0;
    double tolRel = 1e-3;
    long maxCells = 400000;
    PsiKind psi = PsiKind::MaxEntryQ;
    PhiKind phi = PhiKind::AbsDetNegA;

    void validate() const;  // tolRel in [1e-6, 1e-1], maxCells in [64, 1e8]
};

// One generation of the squeeze-map energy series. The D2 channel is kept in
// norm form, term_i = (2^{ni} |Q'_v| 2^{q(n/d - beta) i})^{1/q}, whose
// generation ratio is 2^{seriesExpD2}; the Jacobian channel is the energy
// itself, term_i = 2^{ni} |Q'_v| 2^{a beta i}, ratio 2^{seriesExpJac}.
// numeric* are the matching quadrature values over the generation-i annuli
// (zero when not requested).
struct GenTerm {
    int i = 0;
    double analyticD2 = 0.0, analyticJac = 0.0;
    double numericD2 = 0.0, numericJac = 0.0;
};

struct EnergyReport {
    double d2Integral = 0.0;
    double jacNegIntegral = 0.0;
    double d2ErrEst = 0.0;
    double jacErrEst = 0.0;
    bool converged = false;
    bool d2Converged = false;
    bool jacConverged = false;
    long cellsUsed = 0;
    std::vector<GenTerm> perGeneration;
};

// Adaptive tensor Gauss quadrature of int |D^2 f|^q and int |J_f|^{-a} over
// the box. Cells are bisected along their longest axis, worst estimated
// error first; a cell's error is |GL5 - GL3| per channel, floored at |GL5|
// when the cell touches a registered singular locus. Non-finite node values
// contribute zero and force refinement of their cell. The converged flag is
// honest: false means the budget ran out first.
EnergyReport energy(const Map& f, const EnergyParams& p, const Cube& domain,
                    int threads = 1);

// Analytic per-generation series of a squeeze schedule plus, for generations
// i <= numericGens, adaptive quadrature of the local map over the annulus
// Q(0, a_{i-1}/2) \ Q(0, a_i) scaled by the 2^{ni} cell count. Throws when
// either series ratio is >= 1 (the construction would not converge).
EnergyReport cantor_series(const CantorSchedule& s, const EnergyParams& p,
                           int numericGens = 0, int threads = 1);

// Weak Euler-Lagrange residual
//   int  q |T_f|_F^{q-2} <T_f, T_phi>  +  dPhi(J_f) <cof Df, Dphi>  dx
// over the support of phi (which must sit strictly inside the domain and away
// from singular loci). Both maps must provide second-derivative tensors.
// When fdOracle is non-null it receives the central difference
// (E(f + h phi) - E(f - h phi)) / 2h evaluated on the same cells and nodes,
// so the quadrature error cancels and the two values are comparable at the
// fd-truncation level.
double el_residual(const Map& f, const Map& phi, const EnergyParams& p,
                   const Cube& domain, double* fdOracle = nullptr,
                   double fdStep = 1e-4, int threads = 1);

// Scalar field with closed-form gradient for the pointwise-estimate checks.
// singularAngles lists polar directions (from a zero of the field) along
// which the integrands blow up; the polar integrator grades its angular
// panels toward them.
struct ScalarField {
    int n = 2;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
    std::vector<double> singularAngles;
};

struct KeyEstimateRow {
    Vec zero;
    double r = 0.0;
    double lhs = 0.0;   // r^{n - a(1 - n/b)} / (int_B |Dg|^b)^{a/b}
    double rhs = 0.0;   // int_B |g|^{-a}
    double ratio = 0.0; // lhs / rhs, the implied constant
};

// Ratio table of the pointwise zero-set estimate
//   r^{n - a(1 - n/b)} / (int_B |Dg|^b)^{a/b}  <=  C int_B |g|^{-a}
// over balls B(zero, r) for each listed zero and radius. Nodes where an
// integrand is non-finite are skipped, so divergent integrals surface as
// grading-dependent large values rather than errors. n = 2 only.
std::vector<KeyEstimateRow> key_estimate_check(const ScalarField& g,
                                               const std::vector<Vec>& zeros,
                                               const RegimeParams& p, double b,
                                               const std::vector<double>& radii);

}  // namespace critlab

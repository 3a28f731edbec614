#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

namespace critlab {

// All regime comparisons run in exact rational arithmetic.  Doubles are binary
// rationals, so converting them is lossless and boundary cases (exact equality
// between the competing exponents) can never flip from rounding.
using Rat = boost::multiprecision::cpp_rational;

Rat ratOf(double x);

struct RegimeParams {
    int n = 2;       // space dimension, >= 2
    double q = 2.0;  // integrability exponent of the second gradient, > 1
    double a = 1.0;  // exponent of the inverse-Jacobian penalty, > 0
    double d = 1.0;  // target dimension of the critical set, 0 < d < n

    void validate() const;  // throws std::invalid_argument on violation
};

struct DerivedExponents {
    std::optional<double> b;  // Sobolev exponent of J_f; only for n^2/(2n-1) < q <= n
    double beta = 0.0;        // squeeze exponent (midpoint of the admissible interval)
    double seriesExpD2 = 0.0; // per-generation exponent of the W^{2,q}-norm series
    double seriesExpJac = 0.0;// per-generation exponent of the |J|^{-a} energy series
};

struct RegimeVerdict {
    bool hkApplies = false;          // q > n and (1 - n/q) a >= n
    bool mainApplies = false;        // homeomorphism criterion (dimension-dependent cases)
    bool criticalSetNull = false;    // H^d({J_f = 0}) = 0 criterion
    bool signConstant = false;       // a.e. one-signed Jacobian criterion (d = n-1)
    bool counterexampleExists = false; // (1 - (n-d)/q) a < n - d
    bool undeterminedGap = false;    // q <= n and neither direction applies
    std::string notes;
};

// b = nq / (n^2 - nq + q); only defined for n^2/(2n-1) < q <= n.
// Throws std::domain_error outside that window.
double b_exponent(int n, double q);

// Exact-rational versions of the derived exponents, exposed so tests can make
// identity assertions instead of tolerance assertions.
Rat betaRational(const RegimeParams& p);
Rat seriesExpD2Rational(const RegimeParams& p);
Rat seriesExpJacRational(const RegimeParams& p);

DerivedExponents derive_exponents(const RegimeParams& p);

RegimeVerdict classify(const RegimeParams& p);

struct SweepRow {
    RegimeParams params;
    DerivedExponents exps;
    RegimeVerdict verdict;
};

struct RangeSpec {
    double lo = 0.0, hi = 0.0, step = 1.0;  // inclusive endpoints, positive step
    std::vector<double> values() const;      // throws on empty range
};

// One row per grid point, ordered lexicographically in (q, a, d).
std::vector<SweepRow> sweep(int n, const RangeSpec& qRange, const RangeSpec& aRange,
                            const RangeSpec& dRange);

}  // namespace critlab

#include "critlab/regimes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace critlab {

Rat ratOf(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("ratOf: non-finite input");
    return Rat(x);  // exact: doubles are binary rationals
}

void RegimeParams::validate() const {
    if (n < 2) throw std::invalid_argument("RegimeParams: need n >= 2");
    if (!(q > 1.0)) throw std::invalid_argument("RegimeParams: need q > 1");
    if (!(a > 0.0)) throw std::invalid_argument("RegimeParams: need a > 0");
    if (!(d > 0.0 && d < n)) throw std::invalid_argument("RegimeParams: need 0 < d < n");
}

double b_exponent(int n, double q) {
    const Rat N(n), Q = ratOf(q);
    // Window n^2/(2n-1) < q <= n, below which the denominator changes sign and
    // the exponent loses its meaning.
    if (!(Q > N * N / (2 * N - 1) && Q <= N))
        throw std::domain_error("b_exponent: q outside (n^2/(2n-1), n]");
    const Rat b = N * Q / (N * N - N * Q + Q);
    return static_cast<double>(b);
}

Rat betaRational(const RegimeParams& p) {
    p.validate();
    const Rat N(p.n), Q = ratOf(p.q), A = ratOf(p.a), D = ratOf(p.d);
    return (N / D) * (Q - N + D) / (2 * Q) + (N / D) * (N - D) / (2 * A);
}

Rat seriesExpD2Rational(const RegimeParams& p) {
    const Rat N(p.n), Q = ratOf(p.q), D = ratOf(p.d);
    return (N / D - betaRational(p)) - N * N / (Q * D) + N / Q;
}

Rat seriesExpJacRational(const RegimeParams& p) {
    const Rat N(p.n), A = ratOf(p.a), D = ratOf(p.d);
    return A * betaRational(p) - N * N / D + N;
}

DerivedExponents derive_exponents(const RegimeParams& p) {
    p.validate();
    DerivedExponents e;
    const Rat N(p.n), Q = ratOf(p.q);
    if (Q > N * N / (2 * N - 1) && Q <= N) e.b = b_exponent(p.n, p.q);
    e.beta = static_cast<double>(betaRational(p));
    e.seriesExpD2 = static_cast<double>(seriesExpD2Rational(p));
    e.seriesExpJac = static_cast<double>(seriesExpJacRational(p));
    return e;
}

RegimeVerdict classify(const RegimeParams& p) {
    p.validate();
    RegimeVerdict v;
    const Rat N(p.n), Q = ratOf(p.q), A = ratOf(p.a), D = ratOf(p.d);
    const Rat lowQ = N * N / (2 * N - 1);
    std::ostringstream notes;
    notes << "exact-rational comparisons; ";

    // q > n and (1 - n/q) a >= n  (weak inequality as printed).
    v.hkApplies = (Q > N) && ((1 - N / Q) * A >= N);

    // Homeomorphism criterion.  n = 2: q > 4/3, a >= 1 and (3/2 - 2/q) a >= 1.
    // n >= 3: strict a > n-1 for q > n; (1 - n/q + 1/(n-1)) a > 1 (strict) for
    // n-1 < q <= n.  The mix of weak and strict comparators is deliberate:
    // the statements are sharp exactly at these boundaries.
    if (p.n == 2) {
        v.mainApplies = (Q > Rat(4, 3)) && (A >= 1) &&
                        ((Rat(3, 2) - 2 / Q) * A >= 1);
    } else {
        if (Q > N)
            v.mainApplies = A > N - 1;
        else if (Q > N - 1)
            v.mainApplies = (1 - N / Q + 1 / (N - 1)) * A > 1;
        else
            v.mainApplies = false;
    }

    // Null-critical-set criterion, two branches in q.
    if (Q > N) {
        v.criticalSetNull = (1 - (N - D) / Q) * A >= N - D;
    } else if (Q > lowQ) {
        v.criticalSetNull = (N - D + D / N - (N / Q) * (N - D)) * A >= N - D;
    } else {
        v.criticalSetNull = false;
    }

    // Sign constancy (the d = n-1 specialization of the two branches above).
    if (Q > N) {
        v.signConstant = (1 - 1 / Q) * A >= 1;
    } else if (Q > lowQ) {
        v.signConstant = (2 - 1 / N - N / Q) * A >= 1;
    } else {
        v.signConstant = false;
    }

    // Counterexample regime: (1 - (n-d)/q) a < n - d.
    v.counterexampleExists = (1 - (N - D) / Q) * A < N - D;

    if (Q <= N && !v.criticalSetNull && !v.counterexampleExists) {
        v.undeterminedGap = true;
        notes << "undetermined: q <= n gap between positive result and counterexample; ";
    }
    if (!(Q > lowQ && Q <= N)) notes << "b undefined (q outside (n^2/(2n-1), n]); ";
    v.notes = notes.str();
    return v;
}

std::vector<double> RangeSpec::values() const {
    if (!(step > 0.0)) throw std::invalid_argument("RangeSpec: step must be positive");
    if (hi < lo) throw std::invalid_argument("RangeSpec: empty range");
    std::vector<double> out;
    // Walk by integer multiples so accumulated rounding cannot drop the endpoint.
    const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

std::vector<SweepRow> sweep(int n, const RangeSpec& qRange, const RangeSpec& aRange,
                            const RangeSpec& dRange) {
    std::vector<SweepRow> rows;
    for (double q : qRange.values())
        for (double a : aRange.values())
            for (double d : dRange.values()) {
                RegimeParams p{n, q, a, d};
                SweepRow row{p, derive_exponents(p), classify(p)};
                rows.push_back(std::move(row));
            }
    return rows;
}

}  // namespace critlab

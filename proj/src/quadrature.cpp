#include "critlab/quadrature.hpp"

#include "critlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <thread>

namespace critlab {

void EnergyParams::validate() const {
    if (!(tolRel >= 1e-6 && tolRel <= 1e-1))
        throw PreconditionError("EnergyParams: tolRel must lie in [1e-6, 1e-1]");
    if (!(maxCells >= 64 && maxCells <= 100000000L))
        throw PreconditionError("EnergyParams: maxCells must lie in [64, 1e8]");
    if (!(q > 1.0) || !(a > 0.0))
        throw PreconditionError("EnergyParams: need q > 1 and a > 0");
}

namespace {

constexpr double kGl3Node[] = {-0.7745966692414833770, 0.0, 0.7745966692414833770};
constexpr double kGl3Weight[] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

constexpr double kGl5Node[] = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                               0.5384693101056830910, 0.9061798459386639928};
constexpr double kGl5Weight[] = {0.2369268850561890875, 0.4786286704993664681,
                                 0.5688888888888888889, 0.4786286704993664681,
                                 0.2369268850561890875};

constexpr double kGl8Node[] = {-0.9602898564975362317, -0.7966664774136267396,
                               -0.5255324099163289859, -0.1834346424956498049,
                               0.1834346424956498049,  0.5255324099163289859,
                               0.7966664774136267396,  0.9602898564975362317};
constexpr double kGl8Weight[] = {0.1012285362903762592, 0.2223810344533744705,
                                 0.3137066458778872873, 0.3626837833783619830,
                                 0.3626837833783619830, 0.3137066458778872873,
                                 0.2223810344533744705, 0.1012285362903762592};

// Point integrand for the two channels; sets finite = false (and zeros the
// values) where either channel is not a finite number.
using PairIntegrand = std::function<void(const Vec&, double&, double&, bool&)>;
using LocusDist = std::function<double(const Vec&)>;
// Called with (totA, errA, totB, errB) running sums; true = stop refining.
using StopRule = std::function<bool(double, double, double, double)>;

struct CellRec {
    Cube box;
    double aQ = 0.0, bQ = 0.0;      // GL5 estimates per channel
    double aErr = 0.0, bErr = 0.0;  // |GL5 - GL3| with singular-cell floors
    long seq = 0;
    bool refined = false;
};

// Tensor Gauss rule over the box; m = number of 1-D nodes.
void tensorRule(const PairIntegrand& g, const Cube& box, int m, const double* node,
                const double* weight, double& outA, double& outB, bool& dirty) {
    const int n = box.dim();
    double mid[kMaxDim], half[kMaxDim];
    for (int c = 0; c < n; ++c) {
        mid[c] = 0.5 * (box.lo[c] + box.hi[c]);
        half[c] = 0.5 * (box.hi[c] - box.lo[c]);
    }
    double scale = 1.0;
    for (int c = 0; c < n; ++c) scale *= half[c];

    long total = 1;
    for (int c = 0; c < n; ++c) total *= m;
    double sumA = 0.0, sumB = 0.0;
    for (long t = 0; t < total; ++t) {
        long rem = t;
        Vec x(n);
        double w = scale;
        for (int c = 0; c < n; ++c) {
            const int k = static_cast<int>(rem % m);
            rem /= m;
            x[c] = mid[c] + half[c] * node[k];
            w *= weight[k];
        }
        double va = 0.0, vb = 0.0;
        bool finite = true;
        g(x, va, vb, finite);
        if (!finite) {
            dirty = true;
            continue;
        }
        sumA += w * va;
        sumB += w * vb;
    }
    outA = sumA;
    outB = sumB;
}

void evalCell(const PairIntegrand& g, const LocusDist& locus, CellRec& c) {
    double a3 = 0, b3 = 0, a5 = 0, b5 = 0;
    bool dirty = false;
    tensorRule(g, c.box, 3, kGl3Node, kGl3Weight, a3, b3, dirty);
    tensorRule(g, c.box, 5, kGl5Node, kGl5Weight, a5, b5, dirty);
    c.aQ = a5;
    c.bQ = b5;
    c.aErr = std::abs(a5 - a3);
    c.bErr = std::abs(b5 - b3);

    const int n = c.box.dim();
    double maxHalf = 0.0;
    for (int d = 0; d < n; ++d) maxHalf = std::max(maxHalf, 0.5 * c.box.side(d));
    const double dist = locus(c.box.center());
    if (dist <= maxHalf * (1.0 + 1e-12)) {
        // The polynomial rule cannot certify itself across a singular locus;
        // keep such cells refining until their own mass is negligible.
        c.aErr = std::max(c.aErr, std::abs(a5));
        c.bErr = std::max(c.bErr, std::abs(b5));
    }
    if (dirty) {
        c.aErr = std::max({c.aErr, std::abs(a5), std::abs(a3), c.box.volume()});
        c.bErr = std::max({c.bErr, std::abs(b5), std::abs(b3), c.box.volume()});
    }
}

struct HeapItem {
    double key;
    long seq;
    std::size_t idx;
    bool operator<(const HeapItem& o) const {
        if (key != o.key) return key < o.key;
        return seq > o.seq;  // deterministic tie-break: older cell first
    }
};

struct AdaptiveResult {
    double totA = 0, totB = 0, errA = 0, errB = 0;
    bool budget = false;
    long cells = 0;
    std::vector<CellRec> store;  // leaves are the entries with !refined
};

void runChunks(long count, int threads, const std::function<void(long)>& body) {
    if (threads <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    const int used = static_cast<int>(std::min<long>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (int t = 0; t < used; ++t) {
        pool.emplace_back([&, t]() {
            for (long i = t; i < count; i += used) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

AdaptiveResult adaptiveIntegrate(const PairIntegrand& g, const LocusDist& locus,
                                 const Cube& domain, long maxCells, int threads,
                                 const StopRule& stop) {
    AdaptiveResult res;
    const int n = domain.dim();
    std::priority_queue<HeapItem> heap;
    long seq = 0;
    double errA = 0, errB = 0;
    KahanSum totA, totB;

    auto pushCell = [&](CellRec&& c) {
        c.seq = seq++;
        errA += c.aErr;
        errB += c.bErr;
        totA.add(c.aQ);
        totB.add(c.bQ);
        const double sA = std::max(std::abs(totA.value()), 1e-12);
        const double sB = std::max(std::abs(totB.value()), 1e-12);
        const double key = c.aErr / sA + c.bErr / sB;
        res.store.push_back(std::move(c));
        heap.push(HeapItem{key, res.store.back().seq, res.store.size() - 1});
    };

    // Initial 2-per-axis grid; keeps domain-symmetric loci off cell centers.
    {
        const long initial = 1L << n;
        std::vector<CellRec> init(initial);
        for (long t = 0; t < initial; ++t) {
            Cube b = domain;
            for (int c = 0; c < n; ++c) {
                const double mid = 0.5 * (domain.lo[c] + domain.hi[c]);
                if ((t >> c) & 1)
                    b.lo[c] = mid;
                else
                    b.hi[c] = mid;
            }
            init[t].box = b;
        }
        runChunks(initial, threads, [&](long i) { evalCell(g, locus, init[i]); });
        for (auto& c : init) pushCell(std::move(c));
    }

    const int kBatch = 64;
    long sinceRebuild = 0;
    long leafCount = 1L << n;
    while (!stop(totA.value(), errA, totB.value(), errB)) {
        if (heap.empty()) break;
        const long batch = std::min<long>(kBatch, static_cast<long>(heap.size()));
        if (leafCount + batch > maxCells) {
            res.budget = true;
            break;
        }
        std::vector<std::size_t> parents;
        parents.reserve(batch);
        for (long i = 0; i < batch && !heap.empty(); ++i) {
            const HeapItem top = heap.top();
            heap.pop();
            if (res.store[top.idx].aErr == 0.0 && res.store[top.idx].bErr == 0.0) continue;
            parents.push_back(top.idx);
        }
        if (parents.empty()) break;  // only exact cells remain

        std::vector<CellRec> kids(parents.size() * 2);
        for (std::size_t p = 0; p < parents.size(); ++p) {
            CellRec& par = res.store[parents[p]];
            int axis = 0;
            for (int c = 1; c < n; ++c)
                if (par.box.side(c) > par.box.side(axis)) axis = c;
            const double mid = 0.5 * (par.box.lo[axis] + par.box.hi[axis]);
            kids[2 * p].box = par.box;
            kids[2 * p].box.hi[axis] = mid;
            kids[2 * p + 1].box = par.box;
            kids[2 * p + 1].box.lo[axis] = mid;
        }
        runChunks(static_cast<long>(kids.size()), threads,
                  [&](long i) { evalCell(g, locus, kids[i]); });

        for (std::size_t p = 0; p < parents.size(); ++p) {
            CellRec& par = res.store[parents[p]];
            par.refined = true;
            errA -= par.aErr;
            errB -= par.bErr;
            totA.add(-par.aQ);
            totB.add(-par.bQ);
        }
        for (auto& k : kids) pushCell(std::move(k));
        leafCount += static_cast<long>(parents.size());

        // Paranoia against drift in the incrementally maintained error sums.
        if (++sinceRebuild >= 4096) {
            sinceRebuild = 0;
            errA = errB = 0;
            for (const auto& c : res.store)
                if (!c.refined) {
                    errA += c.aErr;
                    errB += c.bErr;
                }
        }
    }

    // Deterministic final accumulation in insertion order.
    KahanSum fa, fb;
    double ea = 0, eb = 0;
    long leaves = 0;
    for (const auto& c : res.store) {
        if (c.refined) continue;
        fa.add(c.aQ);
        fb.add(c.bQ);
        ea += c.aErr;
        eb += c.bErr;
        ++leaves;
    }
    res.totA = fa.value();
    res.totB = fb.value();
    res.errA = ea;
    res.errB = eb;
    res.cells = leaves;
    return res;
}

double frobeniusNorm(const Map& f, const Vec& x) {
    double T[kMaxDim][kMaxDim][kMaxDim];
    if (!f.d2Tensor(x, T))
        throw PreconditionError("energy: FrobeniusQ needs a second-derivative tensor, "
                                "which family \"" + f.family() + "\" does not provide");
    const int n = f.dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) s += T[i][j][k] * T[i][j][k];
    return std::sqrt(s);
}

bool relConverged(double tot, double err, double tolRel) {
    return err <= tolRel * std::max(std::abs(tot), 1e-12);
}

}  // namespace

EnergyReport energy(const Map& f, const EnergyParams& p, const Cube& domain, int threads) {
    p.validate();
    if (domain.dim() != f.dim())
        throw PreconditionError("energy: domain dimension does not match the map");
    f.requireInside(domain.center());
    if (p.psi == PsiKind::FrobeniusQ) {
        // Availability probe for the tensor, at an interior point chosen off
        // the coordinate planes (symmetric loci often pass through the center).
        Vec probe = domain.lo;
        for (int c = 0; c < domain.dim(); ++c) probe[c] += 0.37 * domain.side(c);
        frobeniusNorm(f, probe);
    }

    PairIntegrand g = [&](const Vec& x, double& va, double& vb, bool& finite) {
        const double d2 = (p.psi == PsiKind::MaxEntryQ) ? f.d2Norm(x) : frobeniusNorm(f, x);
        const double j = f.jac(x);
        va = std::pow(d2, p.q);
        vb = (p.phi == PhiKind::AbsDetNegA) ? std::pow(std::abs(j), -p.a)
                                            : std::pow(j, -p.a);
        finite = std::isfinite(va) && std::isfinite(vb);
        if (!finite) va = vb = 0.0;
    };
    LocusDist locus = [&](const Vec& x) { return f.quadratureLocusDistance(x); };
    StopRule stop = [&](double ta, double ea, double tb, double eb) {
        return relConverged(ta, ea, p.tolRel) && relConverged(tb, eb, p.tolRel);
    };

    const AdaptiveResult r = adaptiveIntegrate(g, locus, domain, p.maxCells, threads, stop);
    EnergyReport rep;
    rep.d2Integral = r.totA;
    rep.jacNegIntegral = r.totB;
    rep.d2ErrEst = r.errA;
    rep.jacErrEst = r.errB;
    rep.d2Converged = relConverged(r.totA, r.errA, p.tolRel);
    rep.jacConverged = relConverged(r.totB, r.errB, p.tolRel);
    rep.converged = rep.d2Converged && rep.jacConverged && !r.budget;
    rep.cellsUsed = r.cells;
    return rep;
}

EnergyReport cantor_series(const CantorSchedule& s, const EnergyParams& p, int numericGens,
                           int threads) {
    p.validate();
    const RegimeParams& rp = s.params();
    if (p.q != rp.q || p.a != rp.a)
        throw PreconditionError(
            "cantor_series: energy exponents must match the schedule parameters");
    if (numericGens < 0 || numericGens > s.maxGen())
        throw PreconditionError("cantor_series: numericGens out of range");

    const Rat expD2 = seriesExpD2Rational(rp);
    const Rat expJac = seriesExpJacRational(rp);
    if (expD2 >= 0 || expJac >= 0)
        throw PreconditionError("cantor_series: non-contractive series ratio (exponent >= 0); "
                                "the construction does not converge at these parameters");

    const int n = rp.n;
    const double beta = s.beta();
    EnergyReport rep;
    KahanSum sumD2, sumJac;
    for (int i = 1; i <= s.maxGen(); ++i) {
        GenTerm t;
        t.i = i;
        const double volQp = std::pow(s.gen(i - 1).a, n);  // |Q'_v| = (2 a_{i-1}/2)^n
        t.analyticD2 =
            std::pow(std::exp2(n * i + rp.q * (static_cast<double>(n) / rp.d - beta) * i) *
                         volQp,
                     1.0 / rp.q);
        t.analyticJac = std::exp2(n * i + rp.a * beta * i) * volQp;
        sumD2.add(t.analyticD2);
        sumJac.add(t.analyticJac);
        rep.perGeneration.push_back(t);
    }
    rep.d2Integral = sumD2.value();
    rep.jacNegIntegral = sumJac.value();
    const double ratioD2 = std::exp2(static_cast<double>(expD2));
    const double ratioJac = std::exp2(static_cast<double>(expJac));
    rep.d2ErrEst = rep.perGeneration.back().analyticD2 * ratioD2 / (1.0 - ratioD2);
    rep.jacErrEst = rep.perGeneration.back().analyticJac * ratioJac / (1.0 - ratioJac);
    rep.d2Converged = rep.jacConverged = true;

    // Numeric cross-check: per generation, integrate the local map over the
    // annulus Q(0, a_{i-1}/2) \ Q(0, a_i) split into 2n face slabs, and scale
    // by the 2^{ni} cell count.
    bool allConverged = true;
    for (int i = 1; i <= numericGens; ++i) {
        const double apHalf = 0.5 * s.gen(i - 1).a;
        const double ai = s.gen(i).a;
        PairIntegrand g = [&, i](const Vec& y, double& va, double& vb, bool& finite) {
            const LocalEval e = s.localEval(i, y, true);
            va = std::pow(e.d2, p.q);
            vb = std::pow(std::abs(e.jac), -p.a);
            finite = std::isfinite(va) && std::isfinite(vb);
            if (!finite) va = vb = 0.0;
        };
        // The local map is C^2 on the slab with J > 0, so no cell needs an
        // error floor (cf. CantorMap::quadratureLocusDistance).
        LocusDist locus = [](const Vec&) { return std::numeric_limits<double>::infinity(); };
        StopRule stop = [&](double ta, double ea, double tb, double eb) {
            return relConverged(ta, ea, p.tolRel) && relConverged(tb, eb, p.tolRel);
        };
        KahanSum slabD2, slabJac;
        for (int c = 0; c < n; ++c) {
            for (int sideSign = -1; sideSign <= 1; sideSign += 2) {
                Cube slab{Vec(n), Vec(n)};
                for (int j = 0; j < n; ++j) {
                    if (j < c) {
                        slab.lo[j] = -ai;
                        slab.hi[j] = ai;
                    } else if (j > c) {
                        slab.lo[j] = -apHalf;
                        slab.hi[j] = apHalf;
                    }
                }
                slab.lo[c] = (sideSign > 0) ? ai : -apHalf;
                slab.hi[c] = (sideSign > 0) ? apHalf : -ai;
                const AdaptiveResult r =
                    adaptiveIntegrate(g, locus, slab, p.maxCells, threads, stop);
                slabD2.add(r.totA);
                slabJac.add(r.totB);
                rep.cellsUsed += r.cells;
                if (r.budget) allConverged = false;
            }
        }
        const double count = std::exp2(static_cast<double>(n) * i);
        rep.perGeneration[i - 1].numericD2 = std::pow(count * slabD2.value(), 1.0 / p.q);
        rep.perGeneration[i - 1].numericJac = count * slabJac.value();
    }
    rep.converged = allConverged;
    return rep;
}

double el_residual(const Map& f, const Map& phi, const EnergyParams& p, const Cube& domain,
                   double* fdOracle, double fdStep, int threads) {
    p.validate();
    if (f.dim() != phi.dim())
        throw PreconditionError("el_residual: map and test field dimensions differ");
    const int n = f.dim();
    const Cube supp = phi.supportCube();
    for (int c = 0; c < n; ++c) {
        if (!(supp.lo[c] >= domain.lo[c] && supp.hi[c] <= domain.hi[c]))
            throw PreconditionError(
                "el_residual: test-field support is not strictly inside the domain");
    }
    {
        double T[kMaxDim][kMaxDim][kMaxDim];
        if (!f.d2Tensor(supp.center(), T) || !phi.d2Tensor(supp.center(), T))
            throw PreconditionError(
                "el_residual: both maps must provide second-derivative tensors");
        if (!(f.singularDistance(supp.center()) > 0.0))
            throw PreconditionError("el_residual: support touches a singular locus");
    }

    auto pointResidual = [&](const Vec& x) {
        double Tf[kMaxDim][kMaxDim][kMaxDim], Tp[kMaxDim][kMaxDim][kMaxDim];
        if (f.singularDistance(x) <= 0.0)
            throw PreconditionError("el_residual: support touches a singular locus");
        f.d2Tensor(x, Tf);
        phi.d2Tensor(x, Tp);
        double frob2 = 0.0, inner = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    frob2 += Tf[i][j][k] * Tf[i][j][k];
                    inner += Tf[i][j][k] * Tp[i][j][k];
                }
        const Mat Gf = f.grad(x), Gp = phi.grad(x);
        const double j = det(Gf);
        const Mat cf = cofactor(Gf);
        double cofInner = 0.0;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) cofInner += cf(r, c) * Gp(r, c);
        const double psiTerm = p.q * std::pow(frob2, 0.5 * (p.q - 2.0)) * inner;
        const double dphi = (p.phi == PhiKind::AbsDetNegA)
                                ? -p.a * std::pow(std::abs(j), -p.a - 1.0) *
                                      (j < 0 ? -1.0 : 1.0)
                                : -p.a * std::pow(j, -p.a - 1.0);
        return psiTerm + dphi * cofInner;
    };

    PairIntegrand g = [&](const Vec& x, double& va, double& vb, bool& finite) {
        va = pointResidual(x);
        vb = std::abs(va);
        finite = std::isfinite(va);
        if (!finite) va = vb = 0.0;
    };
    LocusDist locus = [&](const Vec& x) { return f.singularDistance(x); };
    // Residuals of near-minimizers hover around zero, so convergence is
    // measured against the magnitude integral int |R|, not the signed total.
    StopRule stop = [&](double, double ea, double tb, double eb) {
        const double scale = std::max(std::abs(tb), 1e-12);
        return ea <= p.tolRel * scale && eb <= p.tolRel * scale;
    };
    const AdaptiveResult r =
        adaptiveIntegrate(g, locus, supp, p.maxCells, threads, stop);

    if (fdOracle) {
        if (!(fdStep > 0.0 && fdStep <= 1e-2))
            throw PreconditionError("el_residual: fdStep must lie in (0, 1e-2]");
        // Central difference of the energy evaluated on the identical cells
        // and nodes, so the quadrature discretization cancels in the
        // difference to first order.
        auto energyAt = [&](const Vec& x, double h) {
            double Tf[kMaxDim][kMaxDim][kMaxDim], Tp[kMaxDim][kMaxDim][kMaxDim];
            f.d2Tensor(x, Tf);
            phi.d2Tensor(x, Tp);
            double frob2 = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        const double v = Tf[i][j][k] + h * Tp[i][j][k];
                        frob2 += v * v;
                    }
            Mat G = f.grad(x);
            const Mat Gp = phi.grad(x);
            for (int rr = 0; rr < n; ++rr)
                for (int cc = 0; cc < n; ++cc) G(rr, cc) += h * Gp(rr, cc);
            const double j = det(G);
            const double phiVal = (p.phi == PhiKind::AbsDetNegA)
                                      ? std::pow(std::abs(j), -p.a)
                                      : std::pow(j, -p.a);
            return std::pow(frob2, 0.5 * p.q) + phiVal;
        };
        KahanSum ePlus, eMinus;
        for (const auto& c : r.store) {
            if (c.refined) continue;
            bool dirty = false;
            double plus = 0, minus = 0;
            PairIntegrand pg = [&](const Vec& x, double& va, double& vb, bool& finite) {
                va = energyAt(x, fdStep);
                vb = energyAt(x, -fdStep);
                finite = true;
                if (!std::isfinite(va) || !std::isfinite(vb))
                    throw PreconditionError(
                        "el_residual: perturbed energy non-finite at a quadrature node");
            };
            tensorRule(pg, c.box, 5, kGl5Node, kGl5Weight, plus, minus, dirty);
            ePlus.add(plus);
            eMinus.add(minus);
        }
        *fdOracle = (ePlus.value() - eMinus.value()) / (2.0 * fdStep);
    }
    return r.totA;
}

namespace {

// Panels (midpoint, half-width) with dyadic grading from singEnd toward
// otherEnd; half-width carries the orientation sign, so nodes
// mid + half * xi stay inside the panel and |half| is the quadrature weight.
void addGradedPanels(double singEnd, double otherEnd, int levels,
                     std::vector<std::pair<double, double>>& panels) {
    const double len = otherEnd - singEnd;
    double farU = 1.0;
    for (int j = 0; j <= levels; ++j) {
        const double nearU = (j == levels) ? 0.0 : std::exp2(-(j + 1.0));
        panels.push_back({singEnd + len * 0.5 * (nearU + farU), len * 0.5 * (farU - nearU)});
        farU = nearU;
    }
}

}  // namespace

std::vector<KeyEstimateRow> key_estimate_check(const ScalarField& g,
                                               const std::vector<Vec>& zeros,
                                               const RegimeParams& p, double b,
                                               const std::vector<double>& radii) {
    if (g.n != 2) throw PreconditionError("key_estimate_check: implemented for n = 2 only");
    if (!(b > 0.0)) throw PreconditionError("key_estimate_check: need b > 0");
    if (zeros.empty() || radii.empty())
        throw PreconditionError("key_estimate_check: need at least one zero and one radius");
    constexpr double kTwoPi = 6.28318530717958647692;

    std::vector<double> angles = g.singularAngles;
    for (double& t : angles) {
        t = std::fmod(t, kTwoPi);
        if (t < 0) t += kTwoPi;
    }
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());

    // Angular panel layout is radius independent: graded toward each
    // singular direction, or uniform when the field registers none.
    std::vector<std::pair<double, double>> ang;
    if (angles.empty()) {
        for (int s = 0; s < 16; ++s)
            ang.push_back({kTwoPi * (s + 0.5) / 16.0, kTwoPi * 0.5 / 16.0});
    } else {
        for (std::size_t s = 0; s < angles.size(); ++s) {
            const double t0 = angles[s];
            const double t1 = (s + 1 < angles.size()) ? angles[s + 1] : angles[0] + kTwoPi;
            if (!(t1 > t0)) continue;
            const double mid = 0.5 * (t0 + t1);
            addGradedPanels(t0, mid, 9, ang);
            addGradedPanels(t1, mid, 9, ang);
        }
    }

    std::vector<KeyEstimateRow> rows;
    for (const Vec& z : zeros) {
        if (std::abs(g.value(z)) > 1e-9)
            throw PreconditionError("key_estimate_check: field does not vanish at a listed zero");
        for (double r : radii) {
            if (!(r > 0)) throw PreconditionError("key_estimate_check: radii must be positive");
            std::vector<std::pair<double, double>> rad;
            addGradedPanels(0.0, r, 12, rad);

            // One polar sweep accumulates both integrals; each node costs one
            // value and one gradient evaluation.
            KahanSum gradInt, invInt;
            for (const auto& ap : ang) {
                for (int k = 0; k < 8; ++k) {
                    const double theta = ap.first + ap.second * kGl8Node[k];
                    const double wAng = std::abs(ap.second) * kGl8Weight[k];
                    const double cs = std::cos(theta), sn = std::sin(theta);
                    for (const auto& rp : rad) {
                        for (int m = 0; m < 8; ++m) {
                            const double rho = rp.first + rp.second * kGl8Node[m];
                            const double w = wAng * std::abs(rp.second) * kGl8Weight[m] * rho;
                            Vec x = z;
                            x[0] += rho * cs;
                            x[1] += rho * sn;
                            const double gv = std::pow(g.grad(x).norm(), b) * w;
                            const double iv = std::pow(std::abs(g.value(x)), -p.a) * w;
                            if (std::isfinite(gv)) gradInt.add(gv);
                            if (std::isfinite(iv)) invInt.add(iv);
                        }
                    }
                }
            }

            KeyEstimateRow row;
            row.zero = z;
            row.r = r;
            const double expo = p.n - p.a * (1.0 - p.n / b);
            row.lhs = std::pow(r, expo) / std::pow(gradInt.value(), p.a / b);
            row.rhs = invInt.value();
            row.ratio = row.lhs / row.rhs;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace critlab

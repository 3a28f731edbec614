#include "critlab/cantor.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

namespace critlab {

namespace {

double distInfToCube(const Vec& x, const Cube& c) {
    double d = 0.0;
    for (int i = 0; i < c.dim(); ++i) {
        d = std::max(d, c.lo[i] - x[i]);
        d = std::max(d, x[i] - c.hi[i]);
    }
    return std::max(d, 0.0);
}

}  // namespace

CantorSchedule CantorSchedule::build(const RegimeParams& p, int maxGen) {
    p.validate();
    const RegimeVerdict v = classify(p);
    if (!v.counterexampleExists)
        throw PreconditionError(
            "schedule: parameters admit no near-critical construction "
            "((1-(n-d)/q) a >= n-d)");
    if (maxGen < 0 || maxGen > 24)
        throw PreconditionError("schedule: generation count must lie in [0, 24]");
    const double nd = p.n / p.d;
    if (nd * maxGen > 60.0)
        throw PreconditionError("schedule: deepest cell scale underflows (a_k < 2^-60)");

    CantorSchedule s;
    s.p_ = p;
    s.beta_ = static_cast<double>(betaRational(p));
    s.k_ = maxGen;
    s.g_.push_back({1.0, 1.0, 0.0});
    for (int i = 1; i <= maxGen; ++i) {
        const double a = std::exp2(-nd * i);
        const double b = std::exp2(-(nd + s.beta_) * i);
        const double ap = s.g_[i - 1].a;
        const double delta = 0.5 * ap - a;
        const double r = delta / 16.0;
        s.g_.push_back({a, b, r});
        const double s1 = b / a;
        const double s3 = s.g_[i - 1].b / ap;
        const double k1 = a + 0.25 * delta;
        const double k2 = 0.5 * ap - 0.25 * delta;
        const double smid = (s3 * k2 - s1 * k1) / (k2 - k1);
        s.h_.emplace_back(0.0, 0.0, std::vector<double>{k1, k2},
                          std::vector<double>{s1, smid, s3}, r);
        s.lam_.emplace_back(0.375 * ap - 0.25 * a, 0.4375 * ap - 0.125 * a);
    }
    return s;
}

namespace {
void checkGen(int i, int k) {
    if (i < 1 || i > k) throw PreconditionError("schedule: generation index out of range");
}
}  // namespace

double CantorSchedule::profileH(int i, double t) const {
    checkGen(i, k_);
    const double hi = 0.5 * g_[i - 1].a;
    if (t < 0.0 || t > hi * (1.0 + 1e-12))
        throw PreconditionError("schedule: profile argument outside [0, a_{i-1}/2]");
    return h_[i - 1].value(t);
}

double CantorSchedule::profileH1(int i, double t) const {
    checkGen(i, k_);
    const double hi = 0.5 * g_[i - 1].a;
    if (t < 0.0 || t > hi * (1.0 + 1e-12))
        throw PreconditionError("schedule: profile argument outside [0, a_{i-1}/2]");
    return h_[i - 1].d1(t);
}

double CantorSchedule::profileH2(int i, double t) const {
    checkGen(i, k_);
    const double hi = 0.5 * g_[i - 1].a;
    if (t < 0.0 || t > hi * (1.0 + 1e-12))
        throw PreconditionError("schedule: profile argument outside [0, a_{i-1}/2]");
    return h_[i - 1].d2(t);
}

double CantorSchedule::cutoff(int i, double t) const {
    checkGen(i, k_);
    return lam_[i - 1].value(t);
}
double CantorSchedule::cutoff1(int i, double t) const {
    checkGen(i, k_);
    return lam_[i - 1].d1(t);
}
double CantorSchedule::cutoff2(int i, double t) const {
    checkGen(i, k_);
    return lam_[i - 1].d2(t);
}

double CantorSchedule::kink1(int i) const {
    checkGen(i, k_);
    return g_[i].a + 0.25 * (0.5 * g_[i - 1].a - g_[i].a);
}
double CantorSchedule::kink2(int i) const {
    checkGen(i, k_);
    return 0.5 * g_[i - 1].a - 0.25 * (0.5 * g_[i - 1].a - g_[i].a);
}
double CantorSchedule::windowLeft(int i) const {
    checkGen(i, k_);
    return lam_[i - 1].left();
}
double CantorSchedule::windowRight(int i) const {
    checkGen(i, k_);
    return lam_[i - 1].right();
}

double CantorSchedule::slopeRatio() const {
    if (k_ < 1) return 1.0;
    const auto& sl = h_[0].slopes();
    return sl[1] / sl[0];
}

LocalEval CantorSchedule::localEval(int i, const Vec& y, bool needD2) const {
    checkGen(i, k_);
    const int n = p_.n;
    const double half = 0.5 * g_[i - 1].a;
    for (int c = 0; c < n; ++c)
        if (std::abs(y[c]) > half * (1.0 + 1e-9))
            throw PreconditionError("schedule: offset outside the generation cell");

    const double s3 = g_[i - 1].b / g_[i - 1].a;
    const MollifiedPwLinear& h = h_[i - 1];
    const CutoffWindow& lam = lam_[i - 1];

    double lv[kMaxDim], ld1[kMaxDim], ld2[kMaxDim];
    double P = 1.0;
    for (int j = 0; j < n - 1; ++j) {
        const double t = std::abs(y[j]);
        const double sg = y[j] >= 0.0 ? 1.0 : -1.0;
        lv[j] = lam.value(t);
        ld1[j] = sg * lam.d1(t);
        ld2[j] = lam.d2(t);
        P *= lv[j];
    }

    const double tn = std::abs(y[n - 1]);
    const double sgn = y[n - 1] >= 0.0 ? 1.0 : -1.0;
    const double hv = h.value(tn);
    const double h1 = h.d1(tn);
    const double hs = sgn * hv;

    LocalEval e;
    e.value = y;
    e.value[n - 1] = hs * P + (1.0 - P) * s3 * y[n - 1];
    e.jac = h1 * P + (1.0 - P) * s3;

    e.grad = Mat::identity(n);
    const double gap = hs - s3 * y[n - 1];
    double prodOthers[kMaxDim];
    for (int j = 0; j < n - 1; ++j) {
        double pr = 1.0;
        for (int l = 0; l < n - 1; ++l)
            if (l != j) pr *= lv[l];
        prodOthers[j] = pr;
        e.grad(n - 1, j) = ld1[j] * pr * gap;
    }
    e.grad(n - 1, n - 1) = e.jac;

    e.d2 = 0.0;
    if (needD2) {
        const double h2 = h.d2(tn);
        e.d2 = std::abs(h2) * P;
        for (int j = 0; j < n - 1; ++j) {
            e.d2 = std::max(e.d2, std::abs(ld1[j] * prodOthers[j] * (h1 - s3)));
            e.d2 = std::max(e.d2, std::abs(ld2[j] * prodOthers[j] * gap));
            for (int l = j + 1; l < n - 1; ++l) {
                double pr = 1.0;
                for (int m = 0; m < n - 1; ++m)
                    if (m != j && m != l) pr *= lv[m];
                e.d2 = std::max(e.d2, std::abs(ld1[j] * ld1[l] * pr * gap));
            }
        }
    }
    return e;
}

double CantorSchedule::transitionDistance(int i, const Vec& y) const {
    checkGen(i, k_);
    const int n = p_.n;
    const double wl = windowLeft(i), wr = windowRight(i);
    const double r = g_[i].r;
    const double k1 = kink1(i), k2 = kink2(i);
    double d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n - 1; ++j) {
        const double t = std::abs(y[j]);
        d = std::min(d, t < wl ? wl - t : (t > wr ? t - wr : 0.0));
    }
    const double tn = std::abs(y[n - 1]);
    for (double kk : {k1, k2}) {
        const double lo = kk - r, hi = kk + r;
        d = std::min(d, tn < lo ? lo - tn : (tn > hi ? tn - hi : 0.0));
    }
    return d;
}

std::vector<CellPair> cantor_set_points(const CantorSchedule& s, int gen) {
    const int n = s.params().n;
    if (gen < 1 || gen > s.maxGen())
        throw PreconditionError("cells: generation index out of range");
    if (n * gen > 20)
        throw PreconditionError("cells: enumeration larger than 2^20 refused");

    const long total = 1L << (n * gen);
    std::vector<CellPair> out;
    out.reserve(total);

    std::vector<int> word(gen, 0);
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int lev = 0; lev < gen; ++lev) {
            word[lev] = static_cast<int>((rem >> (n * (gen - 1 - lev))) & ((1 << n) - 1));
        }
        Vec z(n), zt(n);
        for (int lev = 0; lev < gen; ++lev) {
            const double ha = 0.5 * s.gen(lev).a;
            const double hb = 0.5 * s.gen(lev).b;
            for (int c = 0; c < n; ++c) {
                const double w = (word[lev] >> c) & 1 ? 1.0 : -1.0;
                z[c] += ha * w;
                zt[c] += (c == n - 1 ? hb : ha) * w;
            }
        }
        CellPair cp;
        cp.word = word;
        cp.gen = gen;
        cp.zv = z;
        cp.ztv = zt;
        const double outerHalf = 0.5 * s.gen(gen - 1).a;
        const double innerHalf = s.gen(gen).a;
        cp.Qpv = Cube::centered(z, outerHalf);
        cp.Qv = Cube::centered(z, innerHalf);
        Cube rp = Cube::centered(zt, outerHalf);
        rp.lo[n - 1] = zt[n - 1] - 0.5 * s.gen(gen - 1).b;
        rp.hi[n - 1] = zt[n - 1] + 0.5 * s.gen(gen - 1).b;
        cp.Rpv = rp;
        Cube ri = Cube::centered(zt, innerHalf);
        ri.lo[n - 1] = zt[n - 1] - s.gen(gen).b;
        ri.hi[n - 1] = zt[n - 1] + s.gen(gen).b;
        cp.Rv = ri;
        out.push_back(std::move(cp));
    }
    return out;
}

CantorMap::CantorMap(CantorSchedule s) : schedule_(std::move(s)) {
    if (schedule_.maxGen() < 1)
        throw PreconditionError("map: schedule needs at least one generation");
}

void CantorMap::descend(const Vec& x, int& level, Vec& z, Vec& zt) const {
    requireInside(x, 1e-12);
    const int n = dim();
    const int k = schedule_.maxGen();
    z = Vec(n);
    zt = Vec(n);
    level = 0;
    while (true) {
        const double ha = 0.5 * schedule_.gen(level).a;
        const double hb = 0.5 * schedule_.gen(level).b;
        for (int c = 0; c < n; ++c) {
            const double w = x[c] - z[c] >= 0.0 ? 1.0 : -1.0;
            z[c] += ha * w;
            zt[c] += (c == n - 1 ? hb : ha) * w;
        }
        ++level;
        if (level >= k) break;
        const double inner = schedule_.gen(level).a;
        bool insideInner = true;
        for (int c = 0; c < n; ++c)
            if (std::abs(x[c] - z[c]) > inner) { insideInner = false; break; }
        if (!insideInner) break;
    }
}

Vec CantorMap::value(const Vec& x) const {
    int m;
    Vec z, zt;
    descend(x, m, z, zt);
    const LocalEval e = schedule_.localEval(m, x - z);
    return zt + e.value;
}

Mat CantorMap::grad(const Vec& x) const {
    int m;
    Vec z, zt;
    descend(x, m, z, zt);
    return schedule_.localEval(m, x - z).grad;
}

double CantorMap::jac(const Vec& x) const {
    int m;
    Vec z, zt;
    descend(x, m, z, zt);
    return schedule_.localEval(m, x - z).jac;
}

double CantorMap::d2Norm(const Vec& x) const {
    int m;
    Vec z, zt;
    descend(x, m, z, zt);
    return schedule_.localEval(m, x - z, true).d2;
}

double CantorMap::singularDistance(const Vec& x) const {
    int m;
    Vec z, zt;
    descend(x, m, z, zt);
    double d = schedule_.transitionDistance(m, x - z);
    const int k = schedule_.maxGen();
    if (m < k) {
        // Deeper transition zones live inside the inner cube Q_m, at least
        // margin(m+1) away from its boundary planes.
        const Cube inner = Cube::centered(z, schedule_.gen(m).a);
        const double ap = schedule_.gen(m).a;
        const double ai = schedule_.gen(m + 1).a;
        const double delta = 0.5 * ap - ai;
        const double margin =
            std::min(3.0 * delta / 16.0, ap / 16.0 + ai / 8.0);
        d = std::min(d, std::max(distInfToCube(x, inner), margin));
    }
    return d;
}

double CantorMap::quadratureLocusDistance(const Vec&) const {
    // The bands reported by singularDistance carry the whole second
    // derivative mass, so flooring cells inside them would pin the error
    // estimate at the total and the integrator could never certify.  The map
    // is C^2 with J > 0 there; plain rule agreement is sound.
    return std::numeric_limits<double>::infinity();
}

std::string CantorMap::lociDescription() const {
    return "no zeros of J; stiff transition bands around the cutoff windows "
           "and smoothed profile kinks of each generation";
}

double CantorMap::minSingularHint() const {
    const int k = schedule_.maxGen();
    const double s1 = schedule_.gen(k).b / schedule_.gen(k).a;
    return s1 / std::pow(8.0, dim() - 1);
}

nlohmann::json CantorMap::spec() const {
    const RegimeParams& p = schedule_.params();
    return {{"family", "cantor"},
            {"n", p.n},
            {"params",
             {{"q", p.q}, {"a", p.a}, {"d", p.d}, {"maxGen", schedule_.maxGen()}}}};
}

}  // namespace critlab

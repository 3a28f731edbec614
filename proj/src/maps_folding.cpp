#include "critlab/maps_folding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace critlab {

namespace {
constexpr double kSeamTol = 1e-9;
}

FoldingMap::FoldingMap(int n, double q, double a, double alpha)
    : n_(n), q_(q), a_(a), alpha_(alpha) {
    if (n < 2 || n > kMaxDim) throw PreconditionError("folding: dim out of range");
    if (q <= 1.0 || a <= 0.0) throw PreconditionError("folding: needs q > 1 and a > 0");
    if (alpha <= 1.0 || alpha >= 4.0)
        throw PreconditionError("folding: alpha out of sane range (1, 4)");
    admissible_ = (alpha > 2.0 - 1.0 / q) && (alpha < 1.0 + 1.0 / a);
}

double FoldingMap::depth(const Vec& x, double* dh, double* d2h) const {
    const int m = n_ - 1;
    double s = 0.0;
    for (int j = 1; j < n_; ++j) s += x[j] * x[j];
    if (dh) std::memset(dh, 0, sizeof(double) * m);
    if (d2h) std::memset(d2h, 0, sizeof(double) * m * m);
    if (s >= 1.0) return 0.0;
    const double w = 1.0 - s;
    if (dh)
        for (int j = 0; j < m; ++j) dh[j] = 3.0 * w * w * x[j + 1];
    if (d2h)
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l) {
                double v = -12.0 * w * x[j + 1] * x[l + 1];
                if (j == l) v += 3.0 * w * w;
                d2h[j * m + l] = v;
            }
    return -0.5 * w * w * w;
}

namespace {

// F on a single branch, value only; br in {1,2,3,4}.
double branchValue(int br, double x1, double h, double alpha) {
    const double m = std::pow(-h, alpha);
    switch (br) {
        case 1: return std::pow(x1, alpha);
        case 2: return std::pow(2.0, alpha - 1.0) * std::pow(-x1, alpha);
        case 3: return -std::pow(2.0, alpha - 1.0) * std::pow(x1 - h, alpha) + m;
        default: {
            const double M = (-1.0 - m) / std::pow(h + 1.0, alpha);
            return M * std::pow(h - x1, alpha) + m;
        }
    }
}

int pickBranch(double x1, double h) {
    if (x1 >= 0.0) return 1;
    if (x1 > 0.5 * h) return 2;
    if (x1 >= h) return 3;
    return 4;
}

}  // namespace

struct FoldingMap::Parts {
    double F = 0, F1 = 0, F11 = 0;
    double Fj[kMaxDim] = {0}, F1j[kMaxDim] = {0};
    double Fjl[kMaxDim][kMaxDim] = {{0}};
};

void FoldingMap::eval(const Vec& x, Parts& p, bool second) const {
    requireInside(x);
    const int m = n_ - 1;
    double dh[kMaxDim], d2h[kMaxDim * kMaxDim];
    const double h = depth(x, dh, second ? d2h : nullptr);
    const double al = alpha_;
    const double x1 = x[0];
    const int br = pickBranch(x1, h);

    // Runtime seam-continuity guard.
    if (h < 0.0) {
        const double seams[3] = {0.0, 0.5 * h, h};
        for (int s = 0; s < 3; ++s) {
            if (std::abs(x1 - seams[s]) < kSeamTol) {
                const double lo = branchValue(std::min(s + 2, 4), seams[s], h, al);
                const double hi = branchValue(s + 1, seams[s], h, al);
                if (std::abs(hi - lo) > kSeamTol)
                    throw std::logic_error("folding: seam continuity check failed");
            }
        }
    }

    const double mm = std::pow(-h, al);
    const double two = std::pow(2.0, al - 1.0);
    // Partials with respect to (x1, h); tilde-direction terms follow by chain
    // rule through dh, d2h. When h == 0 those all vanish and the h-power
    // coefficients below can be infinite, so skip them entirely.
    double Fh = 0.0, F1h = 0.0, Fhh = 0.0;
    const bool flat = (h == 0.0);

    switch (br) {
        case 1: {
            p.F = std::pow(x1, al);
            p.F1 = al * std::pow(x1, al - 1.0);
            p.F11 = al * (al - 1.0) * std::pow(x1, al - 2.0);
            break;
        }
        case 2: {
            p.F = two * std::pow(-x1, al);
            p.F1 = -two * al * std::pow(-x1, al - 1.0);
            p.F11 = two * al * (al - 1.0) * std::pow(-x1, al - 2.0);
            break;
        }
        case 3: {
            const double w = x1 - h;
            p.F = -two * std::pow(w, al) + mm;
            p.F1 = -two * al * std::pow(w, al - 1.0);
            p.F11 = -two * al * (al - 1.0) * std::pow(w, al - 2.0);
            if (!flat) {
                Fh = two * al * std::pow(w, al - 1.0) - al * std::pow(-h, al - 1.0);
                F1h = two * al * (al - 1.0) * std::pow(w, al - 2.0);
                Fhh = -two * al * (al - 1.0) * std::pow(w, al - 2.0) +
                      al * (al - 1.0) * std::pow(-h, al - 2.0);
            }
            break;
        }
        default: {
            const double u = h - x1;
            const double hp = h + 1.0;
            const double M = (-1.0 - mm) / std::pow(hp, al);
            p.F = M * std::pow(u, al) + mm;
            p.F1 = -al * M * std::pow(u, al - 1.0);
            p.F11 = al * (al - 1.0) * M * std::pow(u, al - 2.0);
            if (!flat) {
                const double N = std::pow(-h, al - 1.0) * hp + 1.0 + mm;
                const double Mp = al * N / std::pow(hp, al + 1.0);
                const double Np = -(al - 1.0) * std::pow(-h, al - 2.0);
                const double Mpp = al * (Np * hp - (al + 1.0) * N) / std::pow(hp, al + 2.0);
                Fh = Mp * std::pow(u, al) + al * M * std::pow(u, al - 1.0) -
                     al * std::pow(-h, al - 1.0);
                F1h = -al * (Mp * std::pow(u, al - 1.0) + (al - 1.0) * M * std::pow(u, al - 2.0));
                Fhh = Mpp * std::pow(u, al) + 2.0 * al * Mp * std::pow(u, al - 1.0) +
                      al * (al - 1.0) * M * std::pow(u, al - 2.0) +
                      al * (al - 1.0) * std::pow(-h, al - 2.0);
            }
            break;
        }
    }

    if (!flat) {
        for (int j = 0; j < m; ++j) {
            p.Fj[j] = Fh * dh[j];
            p.F1j[j] = F1h * dh[j];
        }
        if (second)
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < m; ++l)
                    p.Fjl[j][l] = Fh * d2h[j * m + l] + Fhh * dh[j] * dh[l];
    }
}

Vec FoldingMap::value(const Vec& x) const {
    Parts p;
    eval(x, p, false);
    Vec y = x;
    y[0] = p.F;
    return y;
}

Mat FoldingMap::grad(const Vec& x) const {
    Parts p;
    eval(x, p, false);
    Mat g = Mat::identity(n_);
    g(0, 0) = p.F1;
    for (int j = 1; j < n_; ++j) g(0, j) = p.Fj[j - 1];
    return g;
}

double FoldingMap::jac(const Vec& x) const {
    Parts p;
    eval(x, p, false);
    return p.F1;
}

double FoldingMap::d2Norm(const Vec& x) const {
    Parts p;
    eval(x, p, true);
    double v = std::abs(p.F11);
    for (int j = 0; j < n_ - 1; ++j) {
        v = std::max(v, std::abs(p.F1j[j]));
        for (int l = 0; l < n_ - 1; ++l) v = std::max(v, std::abs(p.Fjl[j][l]));
    }
    return v;
}

bool FoldingMap::d2Tensor(const Vec& x, double T[kMaxDim][kMaxDim][kMaxDim]) const {
    Parts p;
    eval(x, p, true);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) T[i][j][k] = 0.0;
    T[0][0][0] = p.F11;
    for (int j = 1; j < n_; ++j) {
        T[0][0][j] = T[0][j][0] = p.F1j[j - 1];
        for (int l = 1; l < n_; ++l) T[0][j][l] = p.Fjl[j - 1][l - 1];
    }
    return true;
}

double FoldingMap::singularDistance(const Vec& x) const {
    const double h = depth(x);
    double d = std::abs(x[0]);
    d = std::min(d, std::abs(x[0] - h));
    d = std::min(d, std::abs(x[0] - 0.5 * h));
    return d;
}

std::string FoldingMap::lociDescription() const {
    return "{x1 = 0} and {x1 = h(xt)} (J = 0); seam {x1 = h/2} is C^1 only";
}

nlohmann::json FoldingMap::spec() const {
    return {{"family", "folding"},
            {"n", n_},
            {"params", {{"q", q_}, {"a", a_}, {"alpha", alpha_}}}};
}

double FoldingMap::foldProfile(double x1, double h, double* dF1) const {
    const int br = pickBranch(x1, h);
    if (dF1) {
        const double al = alpha_;
        const double two = std::pow(2.0, al - 1.0);
        switch (br) {
            case 1: *dF1 = al * std::pow(x1, al - 1.0); break;
            case 2: *dF1 = -two * al * std::pow(-x1, al - 1.0); break;
            case 3: *dF1 = -two * al * std::pow(x1 - h, al - 1.0); break;
            default: {
                const double mm = std::pow(-h, al);
                const double M = (-1.0 - mm) / std::pow(h + 1.0, al);
                *dF1 = -al * M * std::pow(h - x1, al - 1.0);
            }
        }
    }
    return branchValue(br, x1, h, alpha_);
}

int FoldingMap::preimageCount(const Vec& y, int gridRes, std::vector<Vec>* roots,
                              bool* outsideRange, bool* tangentialWarning) const {
    if (outsideRange) *outsideRange = false;
    if (tangentialWarning) *tangentialWarning = false;
    if (roots) roots->clear();
    if (gridRes < 8) throw PreconditionError("folding: preimage grid too coarse");
    for (int j = 1; j < n_; ++j)
        if (std::abs(y[j]) > 1.0 + 1e-12)
            throw PreconditionError("folding: target trailing coordinates outside [-1,1]");

    const double h = depth(y);
    const double y1 = y[0];
    if (y1 < -1.0 - 1e-12 || y1 > 1.0 + 1e-12) {
        if (outsideRange) *outsideRange = true;
        return 0;
    }

    auto F = [&](double t) { return branchValue(pickBranch(t, h), t, h, alpha_); };
    auto G = [&](double t) { return F(t) - y1; };

    const int N = gridRes + 1;
    const double hg = 2.0 / gridRes;
    std::vector<double> g(N);
    for (int i = 0; i < N; ++i) g[i] = G(-1.0 + hg * i);

    std::vector<double> found;
    // Sign-change brackets, polished by bisection.
    for (int i = 0; i + 1 < N; ++i) {
        if (g[i] == 0.0) { found.push_back(-1.0 + hg * i); continue; }
        if (g[i] * g[i + 1] < 0.0) {
            double lo = -1.0 + hg * i, hi = lo + hg;
            double glo = g[i];
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = G(mid);
                if (gm == 0.0) { lo = hi = mid; break; }
                if (glo * gm < 0.0) hi = mid;
                else { lo = mid; glo = gm; }
            }
            found.push_back(0.5 * (lo + hi));
        }
    }
    if (g[N - 1] == 0.0) found.push_back(1.0);

    // Near-zero clusters that produced no sign change (tangential contacts).
    const double czTol = 4.0 * alpha_ * hg;
    int i = 0;
    while (i < N) {
        if (std::abs(g[i]) > czTol) { ++i; continue; }
        int j = i;
        while (j + 1 < N && std::abs(g[j + 1]) <= czTol) ++j;
        double lo = std::max(-1.0, -1.0 + hg * i - hg);
        double hi = std::min(1.0, -1.0 + hg * j + hg);
        const bool covered = std::any_of(found.begin(), found.end(), [&](double r) {
            return r >= lo - hg && r <= hi + hg;
        });
        if (!covered) {
            // Golden-section minimization of |G| on the cluster.
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double b1 = hi - gr * (hi - lo), b2 = lo + gr * (hi - lo);
            double f1 = std::abs(G(b1)), f2 = std::abs(G(b2));
            for (int it = 0; it < 120; ++it) {
                if (f1 < f2) { hi = b2; b2 = b1; f2 = f1; b1 = hi - gr * (hi - lo); f1 = std::abs(G(b1)); }
                else { lo = b1; b1 = b2; f1 = f2; b2 = lo + gr * (hi - lo); f2 = std::abs(G(b2)); }
            }
            const double tmin = 0.5 * (lo + hi);
            if (std::abs(G(tmin)) <= 1e-9 * std::max(1.0, std::abs(y1))) {
                found.push_back(tmin);
                if (tangentialWarning) *tangentialWarning = true;
            }
        }
        i = j + 1;
    }

    std::sort(found.begin(), found.end());
    std::vector<double> uniq;
    for (double r : found)
        if (uniq.empty() || r - uniq.back() > 1e-9) uniq.push_back(r);

    if (tangentialWarning && !*tangentialWarning) {
        for (double r : uniq) {
            Parts p;
            Vec xr = y;
            xr[0] = r;
            eval(xr, p, false);
            if (std::abs(p.F1) < 1e-8) { *tangentialWarning = true; break; }
        }
    }
    if (roots)
        for (double r : uniq) {
            Vec xr = y;
            xr[0] = r;
            roots->push_back(xr);
        }
    return static_cast<int>(uniq.size());
}

}  // namespace critlab

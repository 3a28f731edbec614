#include "critlab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace critlab {

void DiffConfig::validate() const {
    if (!(step >= 1e-8 && step <= 1e-3))
        throw PreconditionError("DiffConfig: step must lie in [1e-8, 1e-3]");
    if (!(singularStandoff >= 10.0 * step))
        throw PreconditionError("DiffConfig: singularStandoff must be >= 10 * step");
}

namespace {

void checkPoint(const Map& f, const Vec& x, double reach, double standoff) {
    f.requireInside(x);
    const Cube dom = f.domain();
    for (int c = 0; c < f.dim(); ++c) {
        if (x[c] - reach < dom.lo[c] || x[c] + reach > dom.hi[c]) {
            std::ostringstream os;
            os << "fd: coordinate " << c << " = " << x[c] << " closer than " << reach
               << " to the domain boundary";
            throw PreconditionError(os.str());
        }
    }
    const double sd = f.singularDistance(x);
    if (sd < standoff) {
        std::ostringstream os;
        os << "fd: point at singularDistance " << sd << " < standoff " << standoff << " ("
           << f.lociDescription() << ")";
        throw PreconditionError(os.str());
    }
}

void checkFinite(const Vec& v, const char* what) {
    for (int c = 0; c < v.size(); ++c) {
        if (!std::isfinite(v[c])) {
            std::ostringstream os;
            os << "fd: " << what << " produced non-finite component " << c;
            throw PreconditionError(os.str());
        }
    }
}

// One central-difference gradient at step h; rows are components of f.
Mat centralGradient(const Map& f, const Vec& x, double h) {
    const int n = f.dim();
    Mat g(n);
    for (int c = 0; c < n; ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const Vec fp = f.value(xp), fm = f.value(xm);
        checkFinite(fp, "value");
        checkFinite(fm, "value");
        for (int i = 0; i < n; ++i) g(i, c) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return g;
}

double component(const Map& f, const Vec& x, int i) {
    const Vec v = f.value(x);
    checkFinite(v, "value");
    return v[i];
}

// Second partial d^2 f_i / dx_j dx_l at step h.
double secondDiff(const Map& f, const Vec& x, int i, int j, int l, double h) {
    if (j == l) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        return (component(f, xp, i) - 2.0 * component(f, x, i) + component(f, xm, i)) /
               (h * h);
    }
    Vec xpp = x, xpm = x, xmp = x, xmm = x;
    xpp[j] += h; xpp[l] += h;
    xpm[j] += h; xpm[l] -= h;
    xmp[j] -= h; xmp[l] += h;
    xmm[j] -= h; xmm[l] -= h;
    return (component(f, xpp, i) - component(f, xpm, i) - component(f, xmp, i) +
            component(f, xmm, i)) /
           (4.0 * h * h);
}

double hessianStep(const DiffConfig& cfg) {
    return std::clamp(100.0 * cfg.step, 1e-3, 1e-2);
}

}  // namespace

Mat fd_gradient(const Map& f, const Vec& x, const DiffConfig& cfg) {
    cfg.validate();
    checkPoint(f, x, cfg.step, cfg.singularStandoff);
    const Mat coarse = centralGradient(f, x, cfg.step);
    if (!cfg.richardson) return coarse;
    const Mat fine = centralGradient(f, x, 0.5 * cfg.step);
    const int n = f.dim();
    Mat g(n);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < n; ++c)
            g(i, c) = (4.0 * fine(i, c) - coarse(i, c)) / 3.0;
    return g;
}

double fd_jacobian(const Map& f, const Vec& x, const DiffConfig& cfg) {
    return det(fd_gradient(f, x, cfg));
}

void fd_hessian_tensor(const Map& f, const Vec& x, const DiffConfig& cfg,
                       double T[kMaxDim][kMaxDim][kMaxDim]) {
    cfg.validate();
    const double h = hessianStep(cfg);
    checkPoint(f, x, h, std::max(2.0 * cfg.singularStandoff, 2.0 * h));
    const int n = f.dim();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int l = j; l < n; ++l) {
                double v = secondDiff(f, x, i, j, l, h);
                if (cfg.richardson) {
                    const double vf = secondDiff(f, x, i, j, l, 0.5 * h);
                    v = (4.0 * vf - v) / 3.0;
                }
                T[i][j][l] = T[i][l][j] = v;
            }
        }
    }
}

double fd_hessian_norm(const Map& f, const Vec& x, const DiffConfig& cfg) {
    double T[kMaxDim][kMaxDim][kMaxDim];
    fd_hessian_tensor(f, x, cfg, T);
    const int n = f.dim();
    double v = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) v = std::max(v, std::abs(T[i][j][l]));
    return v;
}

bool jacGradient(const Map& f, const Vec& x, Vec& out) {
    double T[kMaxDim][kMaxDim][kMaxDim];
    if (!f.d2Tensor(x, T)) return false;
    const int n = f.dim();
    const Mat cof = cofactor(f.grad(x));
    out = Vec(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) s += cof(i, k) * T[i][k][j];
        out[j] = s;
    }
    return true;
}

}  // namespace critlab

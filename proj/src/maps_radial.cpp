#include "critlab/maps_radial.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

namespace critlab {
namespace {

// Unnormalized bump w(v) = exp(-1/(1-v^2)) on (-1,1) with first two derivatives.
void bump(double v, double& w, double& w1, double& w2) {
    const double s = 1.0 - v * v;
    if (s <= 0.0) { w = w1 = w2 = 0.0; return; }
    w = std::exp(-1.0 / s);
    const double g = -2.0 * v / (s * s);
    const double gp = -2.0 / (s * s) - 8.0 * v * v / (s * s * s);
    w1 = w * g;
    w2 = w * (g * g + gp);
}

}  // namespace

void RadialProfile::scale(double s, double& S, double& S1, double& S2) const {
    if (kind == "power") {
        if (p == 1.0) { S = 1.0; S1 = 0.0; S2 = 0.0; return; }
        const double e = 0.5 * (p - 1.0);
        S = std::pow(s, e);
        S1 = e * std::pow(s, e - 1.0);
        S2 = e * (e - 1.0) * std::pow(s, e - 2.0);
        return;
    }
    if (kind == "cubic") { S = 1.0 + c * s; S1 = c; S2 = 0.0; return; }
    // ballbump
    const double R2 = R * R;
    double w, w1, w2;
    bump(s / R2, w, w1, w2);
    S = amp * w;
    S1 = amp * w1 / R2;
    S2 = amp * w2 / (R2 * R2);
}

void RadialProfile::rho(double t, double& r0, double& r1, double& r2) const {
    double S, S1, S2;
    scale(t * t, S, S1, S2);
    r0 = t * S;
    r1 = S + 2.0 * t * t * S1;
    r2 = 6.0 * t * S1 + 4.0 * t * t * t * S2;
}

bool RadialProfile::smoothAtOrigin() const {
    return kind != "power" || p == 1.0;
}

RadialMap::RadialMap(int n, RadialProfile prof) : n_(n), prof_(std::move(prof)) {
    if (n < 1 || n > kMaxDim) throw PreconditionError("radial: dim out of range");
    if (prof_.kind != "power" && prof_.kind != "cubic" && prof_.kind != "ballbump")
        throw PreconditionError("radial: unknown profile kind '" + prof_.kind + "'");
    if (prof_.kind == "power" && prof_.p <= 0.0)
        throw PreconditionError("radial: power profile needs p > 0");
    if (prof_.kind == "ballbump" && prof_.R <= 0.0)
        throw PreconditionError("radial: ballbump profile needs R > 0");
    if (prof_.kind == "cubic" && 1.0 + prof_.c * n_ <= 0.0)
        throw PreconditionError("radial: cubic profile degenerate on the domain (1 + c n <= 0)");
}

void RadialMap::check(const Vec& x) const {
    requireInside(x);
    if (!prof_.smoothAtOrigin() && x.norm2() == 0.0)
        throw PreconditionError("radial: profile singular at the origin; evaluate away from 0");
}

Vec RadialMap::value(const Vec& x) const {
    check(x);
    double S, S1, S2;
    prof_.scale(x.norm2(), S, S1, S2);
    Vec y = x;
    y *= S;
    return y;
}

Mat RadialMap::grad(const Vec& x) const {
    check(x);
    double S, S1, S2;
    prof_.scale(x.norm2(), S, S1, S2);
    Mat g = Mat::identity(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            g(i, j) = (i == j ? S : 0.0) + 2.0 * S1 * x[i] * x[j];
    return g;
}

double RadialMap::jac(const Vec& x) const {
    check(x);
    const double s = x.norm2();
    double S, S1, S2;
    prof_.scale(s, S, S1, S2);
    double j = S + 2.0 * S1 * s;
    for (int i = 1; i < n_; ++i) j *= S;
    return j;
}

double RadialMap::d2Norm(const Vec& x) const {
    check(x);
    const double t = x.norm();
    double r0, r1, r2;
    prof_.rho(t, r0, r1, r2);
    double S, S1, S2;
    prof_.scale(t * t, S, S1, S2);
    return std::max(std::abs(r2), 2.0 * t * std::abs(S1));
}

bool RadialMap::d2Tensor(const Vec& x, double T[kMaxDim][kMaxDim][kMaxDim]) const {
    check(x);
    double S, S1, S2;
    prof_.scale(x.norm2(), S, S1, S2);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) {
                double v = 4.0 * S2 * x[i] * x[j] * x[k];
                if (i == j) v += 2.0 * S1 * x[k];
                if (i == k) v += 2.0 * S1 * x[j];
                if (j == k) v += 2.0 * S1 * x[i];
                T[i][j][k] = v;
            }
    return true;
}

double RadialMap::dfNorm(const Vec& x) const {
    check(x);
    const double s = x.norm2();
    double S, S1, S2;
    prof_.scale(s, S, S1, S2);
    return std::max(std::abs(S), std::abs(S + 2.0 * S1 * s));
}

double RadialMap::singularDistance(const Vec& x) const {
    if (prof_.smoothAtOrigin()) return std::numeric_limits<double>::infinity();
    return x.norm();
}

std::string RadialMap::lociDescription() const {
    if (prof_.smoothAtOrigin()) return "none (smooth profile)";
    return "origin (power profile with p != 1)";
}

Cube RadialMap::supportCube() const {
    if (prof_.kind == "ballbump") return Cube::symmetric(n_, prof_.R);
    return domain();
}

nlohmann::json RadialMap::spec() const {
    nlohmann::json params{{"profile", prof_.kind}};
    if (prof_.kind == "power") params["p"] = prof_.p;
    if (prof_.kind == "cubic") params["c"] = prof_.c;
    if (prof_.kind == "ballbump") { params["amp"] = prof_.amp; params["R"] = prof_.R; }
    return {{"family", "radial"}, {"n", n_}, {"params", params}};
}

}  // namespace critlab

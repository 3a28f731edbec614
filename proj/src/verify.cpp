#include "critlab/verify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

namespace critlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void gridPoint(const Cube& dom, int res, long linear, Vec& x) {
    const int n = dom.dim();
    for (int c = 0; c < n; ++c) {
        const long m = linear % res;
        linear /= res;
        x[c] = dom.lo[c] + (m + 0.5) * dom.side(c) / res;
    }
}

long gridSize(int n, int res) {
    long total = 1;
    for (int c = 0; c < n; ++c) {
        if (total > 100000000L / res)
            throw PreconditionError("scan: res^n exceeds the 1e8 sample budget");
        total *= res;
    }
    return total;
}

void runChunks(long count, int threads, const std::function<void(long)>& body) {
    if (threads <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    const int used = static_cast<int>(std::min<long>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (int t = 0; t < used; ++t)
        pool.emplace_back([&, t]() {
            for (long i = t; i < count; i += used) body(i);
        });
    for (auto& th : pool) th.join();
}

double sampleSigmaMin(const Map& f, const Cube& dom) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& x : haltonPoints(dom, 4096)) best = std::min(best, minSingularValue(f.grad(x)));
    const int coarse = 32;
    const long total = gridSize(f.dim(), coarse);
    Vec x(f.dim());
    for (long i = 0; i < total; ++i) {
        gridPoint(dom, coarse, i, x);
        best = std::min(best, minSingularValue(f.grad(x)));
    }
    const double hint = f.minSingularHint();
    if (hint >= 0.0) best = std::min(best, hint);
    return best;
}

std::uint64_t bucketKey(const double* q, int n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int c = 0; c < n; ++c) {
        const auto v = static_cast<std::uint64_t>(static_cast<std::int64_t>(q[c]));
        h = (h ^ v) * 0x100000001b3ULL;
        h ^= h >> 29;
    }
    return h;
}

}  // namespace

InjectivityReport injectivity_scan(const Map& f, const Cube& domain, int res, int threads,
                                   double sigmaMinOverride) {
    if (res < 2) throw PreconditionError("injectivity_scan: res must be >= 2");
    const int n = f.dim();
    if (domain.dim() != n) throw PreconditionError("injectivity_scan: domain dimension mismatch");
    const long total = gridSize(n, res);

    InjectivityReport rep;
    rep.sampled = total;
    double spacing = 0.0;
    for (int c = 0; c < n; ++c) spacing = std::max(spacing, domain.side(c) / res);
    rep.sep = 2.0 * spacing;
    rep.sigmaMin = (sigmaMinOverride > 0.0) ? sigmaMinOverride : sampleSigmaMin(f, domain);
    rep.tol = 0.5 * rep.sigmaMin * rep.sep;
    if (!(rep.tol > 0.0))
        throw PreconditionError(
            "injectivity_scan: sampled expansion is zero; tolerance would be vacuous");

    std::vector<Vec> points(total, Vec(n)), images(total, Vec(n));
    runChunks(total, threads, [&](long i) {
        gridPoint(domain, res, i, points[i]);
        images[i] = f.value(points[i]);
    });

    // Spatial hash on image cells of size bucket >= tol: a pair within tol
    // lies in the same or a neighboring bucket.
    const double bucket = std::max(rep.tol, 1e-12);
    std::unordered_map<std::uint64_t, std::vector<long>> hash;
    hash.reserve(static_cast<std::size_t>(total) * 2);
    auto quantize = [&](const Vec& y, double* q) {
        for (int c = 0; c < n; ++c) q[c] = std::floor(y[c] / bucket);
    };
    for (long i = 0; i < total; ++i) {
        double q[kMaxDim];
        quantize(images[i], q);
        hash[bucketKey(q, n)].push_back(i);
    }

    const long neighborCells = static_cast<long>(std::pow(3.0, n));
    for (long i = 0; i < total && static_cast<long>(rep.collisions.size()) < 100; ++i) {
        double q0[kMaxDim];
        quantize(images[i], q0);
        for (long t = 0; t < neighborCells; ++t) {
            double q[kMaxDim];
            long rem = t;
            for (int c = 0; c < n; ++c) {
                q[c] = q0[c] + static_cast<double>(rem % 3) - 1.0;
                rem /= 3;
            }
            auto it = hash.find(bucketKey(q, n));
            if (it == hash.end()) continue;
            for (long j : it->second) {
                if (j <= i) continue;  // each unordered pair once
                const double imgDist = (images[i] - images[j]).norm();
                if (imgDist >= rep.tol) continue;
                const double ptDist = (points[i] - points[j]).norm();
                if (ptDist <= rep.sep) continue;
                rep.collisions.push_back({points[i], points[j], imgDist, ptDist});
                if (rep.collisions.size() >= 100) break;
            }
            if (rep.collisions.size() >= 100) break;
        }
    }
    rep.injectiveOnSample = rep.collisions.empty();
    return rep;
}

std::vector<Vec> boundaryLoop(const Cube& box, int perSide) {
    if (box.dim() != 2) throw PreconditionError("boundaryLoop: planar boxes only");
    if (perSide < 2) throw PreconditionError("boundaryLoop: perSide must be >= 2");
    std::vector<Vec> loop;
    loop.reserve(4 * static_cast<std::size_t>(perSide));
    auto edge = [&](const Vec& a, const Vec& b) {
        for (int i = 0; i < perSide; ++i) {
            const double t = static_cast<double>(i) / perSide;
            loop.push_back(Vec{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        }
    };
    const Vec c00{box.lo[0], box.lo[1]}, c10{box.hi[0], box.lo[1]};
    const Vec c11{box.hi[0], box.hi[1]}, c01{box.lo[0], box.hi[1]};
    edge(c00, c10);
    edge(c10, c11);
    edge(c11, c01);
    edge(c01, c00);
    return loop;
}

int degree_2d(const Map& f, const std::vector<Vec>& loop, const Vec& y) {
    if (f.dim() != 2) throw PreconditionError("degree_2d: n = 2 only");
    if (loop.size() < 8) throw PreconditionError("degree_2d: loop too coarse");
    const std::size_t m = loop.size();
    std::vector<Vec> w(m, Vec(2));
    double minDist = std::numeric_limits<double>::infinity();
    double maxStep = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec img = f.value(loop[i]);
        w[i] = Vec{img[0] - y[0], img[1] - y[1]};
        minDist = std::min(minDist, w[i].norm());
    }
    for (std::size_t i = 0; i < m; ++i)
        maxStep = std::max(maxStep, (w[(i + 1) % m] - w[i]).norm());
    if (!(minDist >= 10.0 * maxStep))
        throw PreconditionError(
            "degree_2d: target is closer to the image curve than 10 sample spacings");

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec& a = w[i];
        const Vec& b = w[(i + 1) % m];
        total += std::atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]);
    }
    const double turns = total / (2.0 * kPi);
    const double snapped = std::round(turns);
    if (std::abs(turns - snapped) > 0.05)
        throw PreconditionError("degree_2d: winding sum is not within 0.05 of an integer");
    return static_cast<int>(snapped);
}

SignReport sign_constancy_scan(const Map& f, const Cube& domain, int res, double tol,
                               int threads) {
    if (res < 2) throw PreconditionError("sign_constancy_scan: res must be >= 2");
    const int n = f.dim();
    const long total = gridSize(n, res);
    SignReport rep;
    rep.sampled = total;
    rep.tol = tol;

    std::vector<signed char> cls(total, 0);
    runChunks(total, threads, [&](long i) {
        Vec x(n);
        gridPoint(domain, res, i, x);
        const double j = f.jac(x);
        cls[i] = (j > tol) ? 1 : (j < -tol ? -1 : 0);
    });
    long pos = 0, neg = 0, zero = 0;
    for (long i = 0; i < total; ++i) {
        if (cls[i] > 0)
            ++pos;
        else if (cls[i] < 0)
            ++neg;
        else {
            ++zero;
            if (rep.zeroWitnesses.size() < 100) {
                Vec x(n);
                gridPoint(domain, res, i, x);
                rep.zeroWitnesses.push_back(x);
            }
        }
    }
    rep.posFraction = static_cast<double>(pos) / total;
    rep.negFraction = static_cast<double>(neg) / total;
    rep.zeroFraction = static_cast<double>(zero) / total;
    return rep;
}

namespace {

// Normalization constant of the planar bump w(u) = exp(-1/(1-u^2)):
// 1 / (2 pi int_0^1 w(u) u du).
double bumpNorm2d() {
    static const double value = [] {
        // GL8 on 64 panels; the integrand is smooth and vanishes at 1.
        static const double node[] = {-0.9602898564975362317, -0.7966664774136267396,
                                      -0.5255324099163289859, -0.1834346424956498049,
                                      0.1834346424956498049,  0.5255324099163289859,
                                      0.7966664774136267396,  0.9602898564975362317};
        static const double weight[] = {0.1012285362903762592, 0.2223810344533744705,
                                        0.3137066458778872873, 0.3626837833783619830,
                                        0.3626837833783619830, 0.3137066458778872873,
                                        0.2223810344533744705, 0.1012285362903762592};
        double s = 0.0;
        const int panels = 64;
        for (int p = 0; p < panels; ++p) {
            const double lo = static_cast<double>(p) / panels;
            const double hi = static_cast<double>(p + 1) / panels;
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (int k = 0; k < 8; ++k) {
                const double u = mid + half * node[k];
                const double w = (u < 1.0) ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
                s += half * weight[k] * w * u;
            }
        }
        return 1.0 / (2.0 * kPi * s);
    }();
    return value;
}

}  // namespace

MollifyReport mollify_and_check(const Map& f, const ApproxCheckConfig& c, const Cube& G) {
    if (f.dim() != 2) throw PreconditionError("mollify_and_check: n = 2 only");
    if (!(c.kernelRadius > 0.0)) throw PreconditionError("mollify_and_check: kernelRadius > 0");
    if (c.res < 8 || c.res > 512) throw PreconditionError("mollify_and_check: res in [8, 512]");
    const double delta = c.kernelRadius;
    const Cube dom = f.domain();
    for (int d = 0; d < 2; ++d) {
        if (!(G.lo[d] - delta >= dom.lo[d] && G.hi[d] + delta <= dom.hi[d]))
            throw PreconditionError(
                "mollify_and_check: kernelRadius exceeds the standoff between G and the domain");
    }

    // Precondition: J >= 3 * delta-floor on the padded neighborhood, sampled.
    Cube padded = G;
    for (int d = 0; d < 2; ++d) {
        padded.lo[d] -= delta;
        padded.hi[d] += delta;
    }
    if (c.delta > 0.0) {
        double minJ = std::numeric_limits<double>::infinity();
        const int probe = 24;
        Vec x(2);
        for (long i = 0; i < probe * probe; ++i) {
            gridPoint(padded, probe, i, x);
            minJ = std::min(minJ, f.jac(x));
        }
        for (const Vec& h : haltonPoints(padded, 512)) minJ = std::min(minJ, f.jac(h));
        if (!(minJ >= 3.0 * c.delta))
            throw PreconditionError("mollify_and_check: sampled Jacobian violates J >= 3*delta");
    }

    // Polar product rule for the convolution: radial 4 x GL8 panels on
    // [0, delta], angular 8 x GL8 panels. The kernel is smooth and radial, so
    // this converges fast; both the value and the gradient of f are averaged
    // (f is C^1, so the averaged gradient is the gradient of the average).
    static const double node[] = {-0.9602898564975362317, -0.7966664774136267396,
                                  -0.5255324099163289859, -0.1834346424956498049,
                                  0.1834346424956498049,  0.5255324099163289859,
                                  0.7966664774136267396,  0.9602898564975362317};
    static const double weight[] = {0.1012285362903762592, 0.2223810344533744705,
                                    0.3137066458778872873, 0.3626837833783619830,
                                    0.3626837833783619830, 0.3137066458778872873,
                                    0.2223810344533744705, 0.1012285362903762592};
    struct PolarNode {
        double dx, dy, w;
    };
    std::vector<PolarNode> stencil;
    const double norm = bumpNorm2d() / (delta * delta);
    for (int rp = 0; rp < 4; ++rp) {
        const double rlo = delta * rp / 4.0, rhi = delta * (rp + 1) / 4.0;
        const double rmid = 0.5 * (rlo + rhi), rhalf = 0.5 * (rhi - rlo);
        for (int rk = 0; rk < 8; ++rk) {
            const double rho = rmid + rhalf * node[rk];
            const double u = rho / delta;
            const double ker = (u < 1.0) ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
            for (int ap = 0; ap < 8; ++ap) {
                const double tlo = 2.0 * kPi * ap / 8.0, thi = 2.0 * kPi * (ap + 1) / 8.0;
                const double tmid = 0.5 * (tlo + thi), thalf = 0.5 * (thi - tlo);
                for (int ak = 0; ak < 8; ++ak) {
                    const double th = tmid + thalf * node[ak];
                    stencil.push_back({rho * std::cos(th), rho * std::sin(th),
                                       rhalf * weight[rk] * thalf * weight[ak] * rho * ker *
                                           norm});
                }
            }
        }
    }

    auto convValue = [&](const Vec& x) {
        double s0 = 0, s1 = 0;
        for (const auto& nd : stencil) {
            const Vec v = f.value(Vec{x[0] - nd.dx, x[1] - nd.dy});
            s0 += nd.w * v[0];
            s1 += nd.w * v[1];
        }
        return Vec{s0, s1};
    };
    auto convGrad = [&](const Vec& x) {
        Mat g(2);
        for (const auto& nd : stencil) {
            const Mat gv = f.grad(Vec{x[0] - nd.dx, x[1] - nd.dy});
            for (int r = 0; r < 2; ++r)
                for (int cc = 0; cc < 2; ++cc) g(r, cc) += nd.w * gv(r, cc);
        }
        return g;
    };

    MollifyReport rep;
    rep.kernelRadius = delta;
    rep.sampled = static_cast<long>(c.res) * c.res;
    double minJac = std::numeric_limits<double>::infinity();
    double sigmaMin = std::numeric_limits<double>::infinity();
    Vec x(2);
    for (long i = 0; i < rep.sampled; ++i) {
        gridPoint(G, c.res, i, x);
        const Mat g = convGrad(x);
        minJac = std::min(minJac, det(g));
        sigmaMin = std::min(sigmaMin, minSingularValue(g));
    }
    rep.minJac = minJac;

    FunctionMap molly("mollified(" + f.family() + ")", 2, G, convValue, convGrad);
    rep.injective =
        injectivity_scan(molly, G, c.res, 1, std::max(sigmaMin, 1e-12)).injectiveOnSample;
    return rep;
}

double distortion(const Map& f, const Vec& x) {
    const double j = f.jac(x);
    if (j == 0.0) return 1.0;
    const double dfn = f.grad(x).maxAbsEntry();
    return std::pow(dfn, f.dim()) / j;
}

FunctionMap::FunctionMap(std::string name, int n, Cube domain,
                         std::function<Vec(const Vec&)> value,
                         std::function<Mat(const Vec&)> grad)
    : name_(std::move(name)), n_(n), domain_(domain), value_(std::move(value)),
      grad_(std::move(grad)) {}

double FunctionMap::d2Norm(const Vec&) const {
    throw PreconditionError("FunctionMap: no second derivatives available");
}

nlohmann::json FunctionMap::spec() const {
    return {{"family", "function"}, {"n", n_}, {"params", {{"name", name_}}}};
}

}  // namespace critlab

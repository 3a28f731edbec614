#include "critlab/calculus.hpp"
#include "critlab/cantor.hpp"
#include "critlab/maps_ball.hpp"
#include "critlab/maps_folding.hpp"
#include "critlab/maps_radial.hpp"

#include <doctest.h>

#include <cmath>

using namespace critlab;

TEST_SUITE_BEGIN("calculus");

namespace {
RadialMap cubicMap(int n, double c) {
    RadialProfile prof;
    prof.kind = "cubic";
    prof.c = c;
    return RadialMap(n, prof);
}
}  // namespace

TEST_CASE("config validation") {
    DiffConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.step = 1e-2;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
    cfg.step = 1e-9;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
    cfg.step = 1e-5;
    cfg.singularStandoff = 5e-5;  // < 10 * step
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
}

TEST_CASE("gradient and Jacobian differences match closed forms on a smooth map") {
    const RadialMap f = cubicMap(2, 0.3);
    DiffConfig cfg;
    for (const Vec& x : haltonPoints(Cube::symmetric(2, 0.9), 60)) {
        const Mat gc = f.grad(x);
        const Mat gf = fd_gradient(f, x, cfg);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(gf(r, c) == doctest::Approx(gc(r, c)).epsilon(1e-9));
        CHECK(fd_jacobian(f, x, cfg) == doctest::Approx(f.jac(x)).epsilon(1e-9));
    }
}

TEST_CASE("Richardson extrapolation beats the plain central difference") {
    const RadialMap f = cubicMap(2, 0.5);
    const Vec x{0.4, 0.3};
    DiffConfig rich, plain;
    plain.richardson = false;
    plain.step = rich.step = 1e-3;  // large step makes truncation visible
    plain.singularStandoff = rich.singularStandoff = 1e-2;
    const double exact = f.jac(x);
    const double eRich = std::abs(fd_jacobian(f, x, rich) - exact);
    const double ePlain = std::abs(fd_jacobian(f, x, plain) - exact);
    CHECK(eRich < ePlain);
    CHECK(eRich < 1e-9);
}

TEST_CASE("Hessian tensor differences match the radial closed form") {
    const RadialMap f = cubicMap(2, 0.4);
    DiffConfig cfg;
    double Tfd[kMaxDim][kMaxDim][kMaxDim];
    double Tcl[kMaxDim][kMaxDim][kMaxDim];
    for (const Vec& x : haltonPoints(Cube::symmetric(2, 0.8), 20)) {
        fd_hessian_tensor(f, x, cfg, Tfd);
        REQUIRE(f.d2Tensor(x, Tcl));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                    CHECK(Tfd[i][j][k] == doctest::Approx(Tcl[i][j][k])
                                              .epsilon(5e-5)
                                              .scale(1.0));
                    // Symmetry of mixed partials in the fd result.
                    CHECK(Tfd[i][j][k] == doctest::Approx(Tfd[i][k][j]).epsilon(1e-12));
                }
    }
}

TEST_CASE("Hessian norm against the profile magnitude stays within the norm gap") {
    // d2Norm of the radial family reports max{|rho''|, |rho/r^2 - rho'/r|};
    // the max tensor entry can differ from it by at most the dimension factor.
    RadialProfile prof;
    prof.kind = "power";
    prof.p = 2.0;
    const RadialMap f(2, prof);
    DiffConfig cfg;
    cfg.singularStandoff = 1e-2;
    for (const Vec& x : haltonPoints(Cube::symmetric(2, 0.9), 40)) {
        if (x.norm() < 0.1) continue;
        const double closed = f.d2Norm(x);
        const double fd = fd_hessian_norm(f, x, cfg);
        const double ratio = fd / closed;
        CHECK(ratio > 0.5 / 1.05);
        CHECK(ratio < 2.0 * 1.05);
    }
}

TEST_CASE("points too close to a singular locus are rejected by name") {
    const FoldingMap f(2, 2.0, 1.0, 1.75);
    DiffConfig cfg;  // standoff 1e-3
    CHECK_THROWS_AS(fd_gradient(f, Vec{1e-5, 0.4}, cfg), PreconditionError);
    try {
        fd_jacobian(f, Vec{1e-5, 0.4}, cfg);
        FAIL("expected rejection near the crease");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("x1") != std::string::npos);
    }
    // Far from the seams the same config works.
    CHECK_NOTHROW(fd_jacobian(f, Vec{0.5, 0.4}, cfg));
}

TEST_CASE("points whose stencil would leave the domain are rejected") {
    const RadialMap f = cubicMap(2, 0.3);
    DiffConfig cfg;
    CHECK_THROWS_AS(fd_gradient(f, Vec{1.0 - 1e-7, 0.0}, cfg), PreconditionError);
    CHECK_NOTHROW(fd_gradient(f, Vec{1.0 - 1e-3, 0.0}, cfg));
}

TEST_CASE("fd agreement holds for the fold away from its seams") {
    const FoldingMap f(2, 2.0, 1.0, 1.75);
    DiffConfig cfg;
    cfg.singularStandoff = 1e-2;
    int used = 0;
    for (const Vec& x : haltonPoints(Cube::symmetric(2, 0.95), 200)) {
        if (f.singularDistance(x) < cfg.singularStandoff) continue;
        CHECK(fd_jacobian(f, x, cfg) ==
              doctest::Approx(f.jac(x)).epsilon(1e-7).scale(1e-3));
        ++used;
    }
    CHECK(used > 100);
}

TEST_CASE("fd agreement holds for the axis squeeze off the axis") {
    const BallMap f(3, 4.0, 1.0, 1.75);
    DiffConfig cfg;
    cfg.singularStandoff = 5e-2;
    int used = 0;
    for (const Vec& x : haltonPoints(f.domain(), 300)) {
        if (f.singularDistance(x) < cfg.singularStandoff) continue;
        bool inside = true;
        for (int c = 0; c < 3; ++c)
            inside = inside && f.domain().lo[c] + 0.01 < x[c] && x[c] < f.domain().hi[c] - 0.01;
        if (!inside) continue;
        CHECK(fd_jacobian(f, x, cfg) ==
              doctest::Approx(f.jac(x)).epsilon(1e-7).scale(1e-3));
        ++used;
    }
    CHECK(used > 100);
}

TEST_CASE("fd agreement holds for the squeeze construction in its affine zones") {
    const CantorMap f(CantorSchedule::build({2, 3.0, 1.0, 1.0}, 3));
    DiffConfig cfg;
    int used = 0;
    for (const Vec& x : haltonPoints(Cube::symmetric(2, 0.98), 300)) {
        if (f.singularDistance(x) < cfg.singularStandoff) continue;
        CHECK(fd_jacobian(f, x, cfg) == doctest::Approx(f.jac(x)).epsilon(1e-8));
        ++used;
    }
    CHECK(used > 50);
}

TEST_CASE("Jacobian gradient from the tensor matches fd of the determinant") {
    const RadialMap f = cubicMap(2, 0.35);
    const DiffConfig cfg;
    for (const Vec& x : haltonPoints(Cube::symmetric(2, 0.8), 25)) {
        Vec g(2);
        REQUIRE(jacGradient(f, x, g));
        for (int j = 0; j < 2; ++j) {
            Vec xp = x, xm = x;
            xp[j] += cfg.step;
            xm[j] -= cfg.step;
            const double fd = (f.jac(xp) - f.jac(xm)) / (2 * cfg.step);
            CHECK(g[j] == doctest::Approx(fd).epsilon(1e-6).scale(1e-6));
        }
    }
}

TEST_SUITE_END();

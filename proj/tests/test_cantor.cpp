#include "critlab/cantor.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>

using namespace critlab;

TEST_SUITE_BEGIN("cantor");

namespace {
const RegimeParams kRef{2, 3.0, 1.0, 1.0};  // beta = 5/3, both series ratios 2^{-1/3}
}

TEST_CASE("schedule geometry follows the dyadic rules") {
    const CantorSchedule s = CantorSchedule::build(kRef, 4);
    CHECK(s.beta() == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(s.gen(0).a == 1.0);
    CHECK(s.gen(0).b == 1.0);
    for (int i = 1; i <= 4; ++i) {
        CHECK(s.gen(i).a == doctest::Approx(std::exp2(-2.0 * i)).epsilon(1e-15));
        CHECK(s.gen(i).b ==
              doctest::Approx(std::exp2(-(2.0 + 5.0 / 3.0) * i)).epsilon(1e-14));
        const double delta = 0.5 * s.gen(i - 1).a - s.gen(i).a;
        CHECK(delta > 0.0);
        CHECK(s.gen(i).r == doctest::Approx(delta / 16.0).epsilon(1e-15));
        CHECK(s.kink1(i) == doctest::Approx(s.gen(i).a + delta / 4).epsilon(1e-15));
        CHECK(s.kink2(i) ==
              doctest::Approx(0.5 * s.gen(i - 1).a - delta / 4).epsilon(1e-15));
        // Transition window sits strictly between inner cube and outer boundary.
        CHECK(s.windowLeft(i) > s.gen(i).a);
        CHECK(s.windowRight(i) < 0.5 * s.gen(i - 1).a);
        CHECK(s.windowLeft(i) < s.windowRight(i));
    }
}

TEST_CASE("profile is exactly linear on its plateau and outer zone") {
    const CantorSchedule s = CantorSchedule::build(kRef, 3);
    for (int i = 1; i <= 3; ++i) {
        const double s1 = s.gen(i).b / s.gen(i).a;
        const double s3 = s.gen(i - 1).b / s.gen(i - 1).a;
        const double r = s.gen(i).r;
        const double tIn = 0.5 * (s.kink1(i) - r);
        CHECK(s.profileH(i, tIn) == doctest::Approx(s1 * tIn).epsilon(1e-14));
        CHECK(s.profileH1(i, tIn) == doctest::Approx(s1).epsilon(1e-14));
        CHECK(s.profileH2(i, tIn) == doctest::Approx(0.0).epsilon(1e-14));
        const double tOut = 0.5 * (s.kink2(i) + r + 0.5 * s.gen(i - 1).a);
        CHECK(s.profileH(i, tOut) == doctest::Approx(s3 * tOut).epsilon(1e-13));
        CHECK(s.profileH1(i, tOut) == doctest::Approx(s3).epsilon(1e-13));
        // The profile meets the outer squeeze exactly at the cell boundary, so
        // consecutive generations glue without a jump.
        const double half = 0.5 * s.gen(i - 1).a;
        CHECK(s.profileH(i, half) == doctest::Approx(0.5 * s.gen(i - 1).b).epsilon(1e-13));
        CHECK_THROWS_AS(s.profileH(i, half * 1.001), PreconditionError);
        CHECK_THROWS_AS(s.profileH(i, -0.01), PreconditionError);
    }
}

TEST_CASE("middle slope ratio is generation independent and matches closed form") {
    const CantorSchedule s = CantorSchedule::build(kRef, 4);
    // With a_i = a_{i-1}/4 the ratio reduces to (7 * 2^beta - 5) / 2.
    const double expect = (7.0 * std::exp2(5.0 / 3.0) - 5.0) / 2.0;
    CHECK(s.slopeRatio() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(s.slopeRatio() <= 16.0);
    for (int i = 1; i <= 4; ++i) {
        const double s1 = s.gen(i).b / s.gen(i).a;
        const double s3 = s.gen(i - 1).b / s.gen(i - 1).a;
        const double k1 = s.kink1(i), k2 = s.kink2(i);
        const double smid = (s3 * k2 - s1 * k1) / (k2 - k1);
        CHECK(smid / s1 == doctest::Approx(s.slopeRatio()).epsilon(1e-12));
    }
}

TEST_CASE("cutoff window plateaus inside the cell") {
    const CantorSchedule s = CantorSchedule::build(kRef, 2);
    for (int i = 1; i <= 2; ++i) {
        CHECK(s.cutoff(i, 0.0) == 1.0);
        CHECK(s.cutoff(i, s.windowLeft(i)) == 1.0);
        CHECK(s.cutoff(i, s.windowRight(i)) == 0.0);
        CHECK(s.cutoff(i, 0.5 * s.gen(i - 1).a) == 0.0);
        const double mid = 0.5 * (s.windowLeft(i) + s.windowRight(i));
        CHECK(s.cutoff1(i, mid) < 0.0);
    }
}

TEST_CASE("local map at the cell center is the pure squeeze") {
    const CantorSchedule s = CantorSchedule::build(kRef, 3);
    for (int i = 1; i <= 3; ++i) {
        const LocalEval e = s.localEval(i, Vec::zero(2), true);
        CHECK(e.value.normInf() == 0.0);
        const double s1 = s.gen(i).b / s.gen(i).a;
        CHECK(e.jac == doctest::Approx(s1).epsilon(1e-13));
        CHECK(e.grad(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(e.grad(1, 1) == doctest::Approx(s1).epsilon(1e-13));
        CHECK(e.grad(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(e.d2 == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("cell enumeration nests and tiles") {
    const CantorSchedule s = CantorSchedule::build(kRef, 3);
    const auto g1 = cantor_set_points(s, 1);
    const auto g2 = cantor_set_points(s, 2);
    REQUIRE(g1.size() == 4);
    REQUIRE(g2.size() == 16);
    for (const auto& c : g1) {
        CHECK(c.gen == 1);
        CHECK(c.Qpv.side(0) == doctest::Approx(1.0).epsilon(1e-15));   // a_0 = 1
        CHECK(c.Qv.side(0) == doctest::Approx(2 * s.gen(1).a).epsilon(1e-15));
        // Image rectangle: unsqueezed in the leading axis, squeezed in the last.
        CHECK(c.Rv.side(0) == doctest::Approx(2 * s.gen(1).a).epsilon(1e-15));
        CHECK(c.Rv.side(1) == doctest::Approx(2 * s.gen(1).b).epsilon(1e-14));
    }
    // Each gen-2 cell sits inside exactly one gen-1 inner cube.
    for (const auto& c : g2) {
        int owners = 0;
        for (const auto& p : g1)
            if (p.Qv.contains(c.zv, 1e-15)) ++owners;
        CHECK(owners == 1);
        CHECK(c.word.size() == 2);
    }
    // Children tile the parent inner cube: volumes add up.
    const double childVol = g2.front().Qpv.volume();
    CHECK(4 * childVol == doctest::Approx(g1.front().Qv.volume()).epsilon(1e-13));
    CHECK_THROWS_AS(cantor_set_points(s, 4), PreconditionError);  // > maxGen
}

TEST_CASE("glued map: Jacobian at generation-j centers is 2^{-beta j}") {
    const CantorSchedule s = CantorSchedule::build(kRef, 4);
    const CantorMap f(CantorSchedule::build(kRef, 4));
    const double beta = 5.0 / 3.0;
    for (int j = 1; j <= 3; ++j) {
        const auto cells = cantor_set_points(s, j);
        int step = std::max<size_t>(1, cells.size() / 8);
        for (size_t ci = 0; ci < cells.size(); ci += step) {
            CHECK(f.jac(cells[ci].zv) ==
                  doctest::Approx(std::exp2(-beta * j)).epsilon(1e-12));
            // Image center matches the map value there.
            CHECK((f.value(cells[ci].zv) - cells[ci].ztv).normInf() < 1e-14);
        }
    }
    // Deepest generation centers too.
    const auto g4 = cantor_set_points(s, 4);
    CHECK(f.jac(g4.front().zv) == doctest::Approx(std::exp2(-beta * 4)).epsilon(1e-12));
}

TEST_CASE("glued map is continuous across cell and gap boundaries") {
    const CantorMap f(CantorSchedule::build(kRef, 3));
    // Walk a segment from the domain boundary through a gen-1 cell into a
    // gen-2 cell; adjacent samples must move by at most Lip * step.
    const auto g1 = cantor_set_points(f.schedule(), 1);
    const Vec c = g1.front().zv;
    const int steps = 4000;
    Vec prev = Vec{-1.0, -1.0};
    Vec prevVal = f.value(prev);
    for (int i = 1; i <= steps; ++i) {
        const double t = double(i) / steps;
        Vec x{-1.0 + t * (c[0] + 1.0), -1.0 + t * (c[1] + 1.0)};
        const Vec val = f.value(x);
        const double stepLen = (x - prev).norm();
        // Generous Lipschitz budget (the cutoff cross terms reach ~5); a glue
        // failure would show up as a step-size-independent jump.
        CHECK((val - prevVal).norm() <= 16.0 * stepLen + 1e-13);
        prev = x;
        prevVal = val;
    }
}

TEST_CASE("glued map Jacobian stays positive everywhere") {
    const CantorMap f(CantorSchedule::build(kRef, 4));
    double minJ = 1e300;
    for (const Vec& x : haltonPoints(f.domain(), 2000)) minJ = std::min(minJ, f.jac(x));
    CHECK(minJ > 0.0);
    // J is the product of the singular values, each at least the hint.
    const double hint = f.minSingularHint();
    CHECK(minJ >= hint * hint * 0.99);
}

TEST_CASE("descend lands on the deepest enclosing cell") {
    const CantorMap f(CantorSchedule::build(kRef, 3));
    const auto g2 = cantor_set_points(f.schedule(), 2);
    const auto& cell = g2[5];
    int level = 0;
    Vec z, zt;
    // A point in the transition zone of the gen-2 cell (offset between inner
    // cube and outer boundary) must resolve to that cell.
    Vec x = cell.zv;
    x[0] += 0.5 * (f.schedule().gen(2).a + 0.5 * f.schedule().gen(1).a);
    f.descend(x, level, z, zt);
    CHECK(level == 2);
    CHECK((z - cell.zv).normInf() == 0.0);
    // Points in the gap between gen-1 outer cubes stay at level 1.
    const auto g1 = cantor_set_points(f.schedule(), 1);
    Vec gap = g1.front().zv;
    gap[0] += 0.5;  // outer half-width of gen 1 is a_0/2 = 1/2, so this exits it
    if (gap[0] < 1.0) {
        f.descend(gap, level, z, zt);
        CHECK(level == 1);
    }
}

TEST_CASE("minimum singular value hint is the deepest plateau slope scaled") {
    const CantorSchedule s = CantorSchedule::build(kRef, 4);
    const CantorMap f(CantorSchedule::build(kRef, 4));
    const double s1k = s.gen(4).b / s.gen(4).a;
    CHECK(f.minSingularHint() == doctest::Approx(s1k / 8.0).epsilon(1e-13));
}

TEST_CASE("schedule rejects non-contractive parameter choices") {
    // (1 - (n-d)/q) a >= n - d admits no construction.
    CHECK_THROWS_AS(CantorSchedule::build({2, 2.0, 2.0, 1.0}, 3), PreconditionError);
    // Generation cap.
    CHECK_THROWS_AS(CantorSchedule::build(kRef, 40), PreconditionError);
    // Zero-generation schedule is legal; the glued map needs at least one.
    CHECK_NOTHROW(CantorSchedule::build(kRef, 0));
    CHECK_THROWS_AS(CantorMap(CantorSchedule::build(kRef, 0)), PreconditionError);
}

TEST_CASE("fractional-dimension schedule keeps the contraction but not exact glue") {
    // d = 3/2 with n = 2, q = 3, a = 1/2: counterexample regime, series contract.
    const RegimeParams p{2, 3.0, 0.5, 1.5};
    REQUIRE(classify(p).counterexampleExists);
    const CantorSchedule s = CantorSchedule::build(p, 3);
    // 2^{-n/d} = 2^{-4/3} > 3/10: children protrude into the parent window.
    CHECK(std::exp2(-2.0 / 1.5) > 0.3);
    const CantorMap f(CantorSchedule::build(p, 3));
    const auto g2 = cantor_set_points(s, 2);
    const double beta = static_cast<double>(betaRational(p));
    CHECK(f.jac(g2.front().zv) == doctest::Approx(std::exp2(-beta * 2)).epsilon(1e-10));
    CHECK(f.jac(Vec{0.9, 0.9}) > 0.0);
}

TEST_CASE("map spec round-trips through the factory") {
    const CantorMap f(CantorSchedule::build(kRef, 2));
    auto g = makeMap(f.spec());
    CHECK(specDigest(g->spec()) == specDigest(f.spec()));
    const Vec x{0.31, -0.47};
    CHECK((f.value(x) - g->value(x)).normInf() == 0.0);
}

TEST_SUITE_END();

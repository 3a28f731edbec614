#include "critlab/dimension.hpp"

#include "critlab/maps_folding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

namespace critlab {

DimensionReport slope_from_counts(const std::vector<double>& sides,
                                  const std::vector<long>& counts) {
    if (sides.size() != counts.size() || sides.size() < 3)
        throw PreconditionError("dimension: need at least 3 scales");
    for (std::size_t i = 1; i < sides.size(); ++i)
        if (!(sides[i] < sides[i - 1]))
            throw PreconditionError("dimension: scales must be strictly decreasing");

    DimensionReport rep;
    rep.scales = sides;
    rep.counts = counts;
    for (long c : counts)
        if (c <= 0) rep.degenerate = true;
    if (rep.degenerate) return rep;

    const std::size_t m = sides.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = std::log2(1.0 / sides[i]);
        ys[i] = std::log2(static_cast<double>(counts[i]));
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = m * sxx - sx * sx;
    rep.slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - rep.slope * sx) / m;
    for (std::size_t i = 0; i < m; ++i)
        rep.residual = std::max(rep.residual, std::abs(rep.slope * xs[i] + intercept - ys[i]));
    return rep;
}

DimensionReport box_dimension_of_set(const std::vector<CellPair>& cells, bool useImageRects) {
    std::map<int, std::vector<const CellPair*>> byGen;
    for (const auto& c : cells) byGen[c.gen].push_back(&c);
    if (byGen.size() < 3)
        throw PreconditionError("box_dimension_of_set: need at least 3 generations");

    std::vector<double> sides;
    std::vector<long> counts;
    for (const auto& [gen, list] : byGen) {
        const int n = list.front()->Qv.dim();
        const double side = list.front()->Qv.side(0);  // 2 a_gen
        sides.push_back(side);
        if (!useImageRects) {
            counts.push_back(static_cast<long>(list.size()));
            continue;
        }
        // Cover the image rectangles R_v by the axis-aligned dyadic grid of
        // the same side (anchored at -1) and count occupied boxes.
        std::unordered_set<std::uint64_t> occupied;
        for (const CellPair* c : list) {
            long lo[kMaxDim], hi[kMaxDim];
            for (int d = 0; d < n; ++d) {
                lo[d] = static_cast<long>(std::floor((c->Rv.lo[d] + 1.0) / side));
                hi[d] = static_cast<long>(std::floor((c->Rv.hi[d] + 1.0 - 1e-12 * side) / side));
            }
            long idx[kMaxDim];
            for (int d = 0; d < n; ++d) idx[d] = lo[d];
            while (true) {
                std::uint64_t key = 0;
                for (int d = 0; d < n; ++d)
                    key = key * 0x100000001b3ULL + static_cast<std::uint64_t>(idx[d] + 8);
                occupied.insert(key);
                int d = 0;
                while (d < n) {
                    if (++idx[d] <= hi[d]) break;
                    idx[d] = lo[d];
                    ++d;
                }
                if (d >= n) break;
            }
        }
        counts.push_back(static_cast<long>(occupied.size()));
    }
    // byGen is ordered by generation, so sides decrease already.
    DimensionReport rep = slope_from_counts(sides, counts);
    rep.epsilonRule = useImageRects ? "grid cover of image rectangles" : "analytic cell count";
    return rep;
}

namespace {

long long countOccupied(const Map& f, int j, double eps) {
    // Centered grid over [-1,1]^n with 2^j boxes per axis.
    const int n = f.dim();
    const long per = 1L << j;
    const double side = 2.0 / per;
    long long count = 0;
    long idx[kMaxDim] = {0};
    while (true) {
        Vec x(n);
        for (int d = 0; d < n; ++d) x[d] = -1.0 + (idx[d] + 0.5) * side;
        if (std::abs(f.jac(x)) <= eps) ++count;
        int d = 0;
        while (d < n && ++idx[d] >= per) {
            idx[d] = 0;
            ++d;
        }
        if (d >= n) break;
    }
    return count;
}

}  // namespace

DimensionReport near_critical_dimension(const Map& f, int depth) {
    const int n = f.dim();
    const int maxDepth = (n == 2) ? 12 : 8;
    if (n != 2 && n != 3)
        throw PreconditionError("near_critical_dimension: n must be 2 or 3");
    if (depth < 4 || depth > maxDepth)
        throw PreconditionError("near_critical_dimension: depth out of range [4, " +
                                std::to_string(maxDepth) + "]");

    std::vector<double> sides;
    std::vector<long> counts;
    DimensionReport rep;

    if (const auto* cm = dynamic_cast<const CantorMap*>(&f)) {
        const CantorSchedule& s = cm->schedule();
        const double nd = static_cast<double>(n) / s.params().d;
        const double beta = s.beta();
        // Fit the Jacobian decay constant at the first-generation center
        // instead of trusting the construction: eps(i) = 2 * Chat * 2^{-beta i}.
        const auto gen1 = cantor_set_points(s, 1);
        const double chat = cm->jac(gen1.front().zv) * std::exp2(beta);
        // Generations whose grid matches the depth budget, deepest 4.
        std::vector<int> gens;
        for (int i = 1; i <= s.maxGen(); ++i) {
            const int j = static_cast<int>(std::lround(nd * i));
            if (j >= 2 && j <= depth) gens.push_back(i);
        }
        if (static_cast<int>(gens.size()) > 4) gens.erase(gens.begin(), gens.end() - 4);
        if (gens.size() < 3)
            throw PreconditionError(
                "near_critical_dimension: schedule too shallow for this depth");
        std::vector<double> epsilons;
        for (int i : gens) {
            const int j = static_cast<int>(std::lround(nd * i));
            const double eps = 2.0 * chat * std::exp2(-beta * i);
            sides.push_back(2.0 / (1L << j));
            epsilons.push_back(eps);
            counts.push_back(static_cast<long>(countOccupied(f, j, eps)));
        }
        rep = slope_from_counts(sides, counts);
        rep.epsilons = epsilons;
        rep.targetD = s.params().d;
        rep.epsilonRule = "eps(i) = 2 * Chat * 2^(-beta i), generation-matched scales";
        return rep;
    }

    const auto* fm = dynamic_cast<const FoldingMap*>(&f);
    std::vector<double> epsilons;
    for (int j = depth - 3; j <= depth; ++j) {
        const double side = 2.0 / (1L << j);
        const double eps = fm ? fm->alpha() * std::pow(side, fm->alpha() - 1.0) : side;
        sides.push_back(side);
        epsilons.push_back(eps);
        counts.push_back(static_cast<long>(countOccupied(f, j, eps)));
    }
    rep = slope_from_counts(sides, counts);
    rep.epsilons = epsilons;
    rep.targetD = fm ? n - 1.0 : 0.0;
    rep.epsilonRule =
        fm ? "eps(side) = alpha * side^(alpha-1) along the creases" : "eps(side) = side";
    return rep;
}

}  // namespace critlab

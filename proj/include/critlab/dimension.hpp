#pragma once

#include "critlab/cantor.hpp"
#include "critlab/map.hpp"

#include <string>
#include <vector>

namespace critlab {

// Box-counting data: occupied-box counts over a strictly decreasing dyadic
// scale ladder, the least-squares slope of log2 count against log2 (1/side),
// and the residual of that fit. Box counting upper-bounds the Hausdorff
// dimension; it never certifies positivity of the d-dimensional measure.
struct DimensionReport {
    std::vector<double> scales;  // box sides, strictly decreasing
    std::vector<long> counts;
    std::vector<double> epsilons;  // per-scale |J| threshold (empty for plain sets)
    double slope = 0.0;
    double residual = 0.0;  // max |fit - data| in log2 units
    double targetD = 0.0;
    std::string epsilonRule;
    bool degenerate = false;  // some scale had zero occupied boxes
};

// Least-squares slope of log2(count) against log2(1/side); exposed so tests
// can feed analytic count ladders (for example product sets) directly.
DimensionReport slope_from_counts(const std::vector<double>& sides,
                                  const std::vector<long>& counts);

// Dimension of the cell-center Cantor set from enumerated generations
// (grouped by CellPair::gen). With cubes the count ladder is the analytic
// 2^{ni} at side 2 a_i; with useImageRects the image rectangles R_v are
// covered by a dyadic grid of the same sides and occupied boxes counted.
// Needs at least 3 distinct generations.
DimensionReport box_dimension_of_set(const std::vector<CellPair>& cells,
                                     bool useImageRects = false);

// Box-count slope of the near-critical set {|J_f| <= eps(scale)} on centered
// dyadic grids. The threshold rule is construction aware:
//   cantor:  generation-matched scales (grid side ~ cell side) and
//            eps(i) = 2 * Chat * 2^{-beta i}, Chat fitted from the measured
//            first-generation center Jacobian;
//   folding: eps(side) = alpha * side^{alpha-1} (the Jacobian profile of the
//            crease at distance side);
//   other:   eps(side) = side.
// Slope is fitted over the deepest <= 4 scales. depth caps the finest grid
// at 2^depth boxes per axis (<= 12 for n = 2, <= 8 for n = 3).
DimensionReport near_critical_dimension(const Map& f, int depth);

}  // namespace critlab

#pragma once

#include "critlab/map.hpp"
#include "critlab/profiles.hpp"
#include "critlab/regimes.hpp"

#include <memory>
#include <vector>

namespace critlab {

// Per-generation geometry: cell half-spacing scale a_i = 2^{-(n/d) i}, image
// squeeze scale b_i = 2^{-(n/d + beta) i}, smoothing radius
// r_i = (a_{i-1}/2 - a_i)/16. gen 0 is the root (a_0 = b_0 = 1, r_0 = 0).
struct GenGeom {
    double a, b, r;
};

struct LocalEval {
    Vec value;
    Mat grad;
    double jac;
    double d2;
};

// Schedule of nested dyadic cells and one squeeze map per generation.
//
// Generation i >= 1 owns 2^{n i} cells. A cell with center z_v carries an
// outer cube Q'_v = Q(z_v, a_{i-1}/2) and an inner cube Q_v = Q(z_v, a_i);
// the 2^n children of a cell tile its inner cube exactly. The level-i local
// map on the recentered outer cube Q(0, a_{i-1}/2) keeps the leading n-1
// coordinates and compresses the last one:
//   g_i(y) = (yb, sgn(yn) h_i(|yn|) P + (1 - P) s3 yn),  P = prod_j lam_i(|y_j|)
// where h_i is a three-slope profile (inner slope s1 = b_i/a_i, outer slope
// s3 = b_{i-1}/a_{i-1}, middle slope chosen so h_i(t) = s3 t beyond the
// second kink) smoothed at radius r_i, and lam_i is a smooth cutoff that is
// 1 on [0, 3a_{i-1}/8 - a_i/4] and 0 beyond 7a_{i-1}/16 - a_i/8.
//
// g_i is exactly affine on the inner plateau (all |y_j| below the cutoff
// window, |yn| <= k1 - r_i) and exactly the squeeze (yb, s3 yn) on the outer
// shell {|yn| >= k2 + r_i} u {some |y_j| past the window}; that shell meets
// the whole boundary of the outer cube, which is what glues consecutive
// generations into a C^1 map when a_i <= (3/10) a_{i-1}. For faster-decaying
// d the children protrude into the parent transition window and the glue is
// only approximate; evaluation is still well defined cellwise (deepest cell
// wins) and exact near cell centers.
class CantorSchedule {
public:
    static CantorSchedule build(const RegimeParams& p, int maxGen);

    const RegimeParams& params() const { return p_; }
    double beta() const { return beta_; }
    int maxGen() const { return k_; }
    const GenGeom& gen(int i) const { return g_.at(i); }

    // Profile and cutoff of generation i (1 <= i <= maxGen), with derivatives.
    // profileH rejects t outside [0, a_{i-1}/2].
    double profileH(int i, double t) const;
    double profileH1(int i, double t) const;
    double profileH2(int i, double t) const;
    double cutoff(int i, double t) const;
    double cutoff1(int i, double t) const;
    double cutoff2(int i, double t) const;

    // Kink positions k1 = a_i + (a_{i-1}/2 - a_i)/4, k2 = a_{i-1}/2 - (...)/4
    // and the cutoff window of generation i.
    double kink1(int i) const;
    double kink2(int i) const;
    double windowLeft(int i) const;
    double windowRight(int i) const;

    // Middle slope divided by inner slope; generation independent.
    double slopeRatio() const;

    // The local map g_i at offset y in Q(0, a_{i-1}/2).
    LocalEval localEval(int i, const Vec& y, bool needD2 = false) const;

    // Distance from offset y to the non-affine transition zones of g_i
    // (cutoff windows in the leading coordinates, smoothed kink bands in the
    // last coordinate).
    double transitionDistance(int i, const Vec& y) const;

private:
    RegimeParams p_;
    double beta_ = 0.0;
    int k_ = 0;
    std::vector<GenGeom> g_;
    std::vector<MollifiedPwLinear> h_;   // index i-1
    std::vector<CutoffWindow> lam_;      // index i-1
};

// One generation-i cell: its word (one {-1,+1}^n vertex per level, packed as
// a bitmask, bit j set = +1), centers in domain and image, outer/inner cubes
// Qpv/Qv and their image rectangles Rpv/Rv (squeezed in the last axis only).
struct CellPair {
    std::vector<int> word;
    int gen = 0;
    Vec zv, ztv;
    Cube Qv, Qpv, Rv, Rpv;
};

// All generation-i cells, lexicographic in the word; refuses 2^{n i} > 2^20.
std::vector<CellPair> cantor_set_points(const CantorSchedule& s, int gen);

// The glued map f_k on [-1,1]^n. Evaluation descends the cell tree to the
// deepest cell containing x and applies that generation's local map; outside
// the inner plateau of generation maxGen the map is locally affine or in a
// transition zone, and J > 0 everywhere with J = 2^{-beta j} exactly at
// every generation-j cell center.
class CantorMap final : public Map {
public:
    explicit CantorMap(CantorSchedule s);

    std::string family() const override { return "cantor"; }
    int dim() const override { return schedule_.params().n; }
    Cube domain() const override { return Cube::symmetric(dim(), 1.0); }

    Vec value(const Vec& x) const override;
    Mat grad(const Vec& x) const override;
    double jac(const Vec& x) const override;
    double d2Norm(const Vec& x) const override;

    double singularDistance(const Vec& x) const override;
    // The registered transition bands have positive measure but the glued map
    // stays C^2 across them with J > 0, so rule agreement alone certifies
    // integrals: no quadrature error floor anywhere.
    double quadratureLocusDistance(const Vec& x) const override;
    std::string lociDescription() const override;
    double minSingularHint() const override;
    nlohmann::json spec() const override;

    const CantorSchedule& schedule() const { return schedule_; }

    // Descend to the deepest cell containing x: level m in [1, maxGen], the
    // cell centers z_m (domain) and zt_m (image). Ties on cell gridlines go
    // to the +1 side.
    void descend(const Vec& x, int& level, Vec& z, Vec& zt) const;

private:
    CantorSchedule schedule_;
};

}  // namespace critlab

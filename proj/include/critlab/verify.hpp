#pragma once

#include "critlab/map.hpp"

#include <functional>
#include <string>
#include <vector>

namespace critlab {

struct CollisionPair {
    Vec x, y;
    double imageDist = 0.0, pointDist = 0.0;
};

// Grid evidence, not proof: "injective on sample" means no pair of sampled
// points at distance > sep had images closer than tol.
struct InjectivityReport {
    long sampled = 0;
    std::vector<CollisionPair> collisions;  // capped at 100, scan order
    bool injectiveOnSample = true;
    double tol = 0.0, sep = 0.0, sigmaMin = 0.0;
};

// Image collision search over the res^n cell-center grid with a spatial
// hash. tol = half the smallest sampled local expansion (min singular value
// of Df over Halton and coarse-grid samples, floored by the family hint)
// times sep; sep = 2 grid spacings, so adjacent cells never count.
// sigmaMinOverride > 0 skips the expansion sampling (used by the mollifier
// path, where every gradient costs a convolution).
InjectivityReport injectivity_scan(const Map& f, const Cube& domain, int res,
                                   int threads = 1, double sigmaMinOverride = -1.0);

// Counter-clockwise boundary polygon of a planar box, perSide points per edge.
std::vector<Vec> boundaryLoop(const Cube& box, int perSide);

// Winding number of f(loop) around y; requires the image curve to keep a
// margin of 10 consecutive-image spacings from y and the summed angle to
// land within 0.05 turns of an integer.
int degree_2d(const Map& f, const std::vector<Vec>& loop, const Vec& y);

struct SignReport {
    long sampled = 0;
    double posFraction = 0.0, negFraction = 0.0, zeroFraction = 0.0;
    std::vector<Vec> zeroWitnesses;  // capped at 100
    double tol = 0.0;
};

// Fractions of grid cell centers with J > tol / J < -tol / |J| <= tol.
SignReport sign_constancy_scan(const Map& f, const Cube& domain, int res,
                               double tol = 1e-9, int threads = 1);

struct ApproxCheckConfig {
    double delta = 0.0;         // claimed Jacobian floor: J >= 3*delta on the neighborhood
    double eta = 0.0;           // reserved boundary-separation margin (reported back)
    double kernelRadius = 0.0;  // mollification radius
    int res = 48;               // evaluation grid per axis
};

struct MollifyReport {
    double minJac = 0.0;
    bool injective = false;
    double kernelRadius = 0.0;
    long sampled = 0;
};

// Convolve the map with the normalized radial C-infinity bump at
// kernelRadius, on G (n = 2). Preconditions: G padded by the radius stays
// inside the map's domain, and the sampled Jacobian on that neighborhood is
// >= 3*delta. Returns the sampled minimum Jacobian of the mollified map and
// an injectivity verdict for it.
MollifyReport mollify_and_check(const Map& f, const ApproxCheckConfig& c, const Cube& G);

// K(x) = |Df(x)|^n / J_f(x) when J_f(x) != 0, and 1 when J_f(x) = 0, with
// |.| the max-entry norm. Total by definition; negative where J < 0.
double distortion(const Map& f, const Vec& x);

// Adapter exposing closures as a Map (value and gradient only), so derived
// objects like mollifications run through the same scans.
class FunctionMap final : public Map {
public:
    FunctionMap(std::string name, int n, Cube domain,
                std::function<Vec(const Vec&)> value, std::function<Mat(const Vec&)> grad);

    std::string family() const override { return name_; }
    int dim() const override { return n_; }
    Cube domain() const override { return domain_; }
    Vec value(const Vec& x) const override { return value_(x); }
    Mat grad(const Vec& x) const override { return grad_(x); }
    double d2Norm(const Vec& x) const override;  // not provided: throws
    nlohmann::json spec() const override;

private:
    std::string name_;
    int n_;
    Cube domain_;
    std::function<Vec(const Vec&)> value_;
    std::function<Mat(const Vec&)> grad_;
};

}  // namespace critlab

#pragma once

#include "critlab/geometry.hpp"

#include <nlohmann/json_fwd.hpp>

#include <memory>
#include <string>

namespace critlab {

// Thrown when an operation's stated precondition is violated (out-of-domain
// point, standoff too small, budget misuse).  The CLI maps it to exit code 2.
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& m) : std::runtime_error(m) {}
};

// A mapping family instance f: domain() -> R^n with pointwise closed-form
// evaluation of the value, the gradient, the Jacobian determinant and a
// second-derivative magnitude.  d2Norm is the maximum absolute entry of the
// second-derivative tensor (the families here never fix another matrix norm;
// all fitted constants absorb the difference).
class Map {
public:
    virtual ~Map() = default;

    virtual std::string family() const = 0;
    virtual int dim() const = 0;
    virtual Cube domain() const = 0;

    virtual Vec value(const Vec& x) const = 0;
    virtual Mat grad(const Vec& x) const = 0;
    virtual double jac(const Vec& x) const;  // default: det(grad(x))
    virtual double d2Norm(const Vec& x) const = 0;

    // Full second-derivative tensor T[i][j][k] = d^2 f_i / dx_j dx_k where a
    // closed form exists; returns false otherwise.
    virtual bool d2Tensor(const Vec& x, double T[kMaxDim][kMaxDim][kMaxDim]) const;

    // Distance from x to the nearest registered singular / non-smooth locus
    // (derivative blowups, creases, zero-Jacobian sets, numerically stiff
    // transition shells).  +inf when the family registers none.
    virtual double singularDistance(const Vec& x) const;
    virtual std::string lociDescription() const { return "none"; }

    // Distance the adaptive integrator uses to decide which cells may not
    // certify themselves by rule agreement alone.  Defaults to the finite
    // difference standoff distance above; a family whose registered loci are
    // stiff but C^2 (so polynomial rules converge across them) widens it,
    // otherwise the integrator would hold the full locus mass as error
    // forever.
    virtual double quadratureLocusDistance(const Vec& x) const { return singularDistance(x); }

    // Lower bound for the smallest singular value of Df over the domain, when
    // the family knows one (-1 otherwise).  Used to calibrate injectivity
    // tolerances so sampling cannot overestimate the local expansion.
    virtual double minSingularHint() const { return -1.0; }

    // Smallest cube containing {f != identity} resp. the support of a test
    // field; defaults to the whole domain.
    virtual Cube supportCube() const { return domain(); }

    // Round-trippable JSON description ({"family":..., "n":..., "params":{...}}).
    virtual nlohmann::json spec() const = 0;

    void requireInside(const Vec& x, double pad = 1e-12) const;
};

std::unique_ptr<Map> makeMap(const nlohmann::json& spec);
std::unique_ptr<Map> loadMap(const std::string& path);

// FNV-1a digest of the canonical (sorted-key, round-trip floats) serialization.
std::string specDigest(const nlohmann::json& spec);

}  // namespace critlab

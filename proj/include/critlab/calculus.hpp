#pragma once

#include "critlab/map.hpp"

namespace critlab {

// Settings for the finite-difference oracles. The standoff is measured
// against the map's singularDistance: differencing across a crease or a
// stiff transition shell would test the wrong quantity, so such points are
// rejected rather than silently degraded.
struct DiffConfig {
    double step = 1e-5;
    bool richardson = true;
    double singularStandoff = 1e-3;

    void validate() const;  // step in [1e-8, 1e-3], standoff >= 10 * step
};

// Central-difference gradient (rows = components, columns = direction), with
// one Richardson extrapolation level when cfg.richardson is set. All sampled
// points must stay inside the domain and at singularDistance >= standoff.
Mat fd_gradient(const Map& f, const Vec& x, const DiffConfig& cfg = {});

double fd_jacobian(const Map& f, const Vec& x, const DiffConfig& cfg = {});

// Second differences use a coarser internal step (the 1e-16 machine noise
// divided by h^2 dominates below ~1e-4) and twice the standoff.
double fd_hessian_norm(const Map& f, const Vec& x, const DiffConfig& cfg = {});
void fd_hessian_tensor(const Map& f, const Vec& x, const DiffConfig& cfg,
                       double T[kMaxDim][kMaxDim][kMaxDim]);

// Gradient of x -> det Df(x) from the closed-form second-derivative tensor:
// d_j det(Df) = sum_{i,k} cof(Df)_{ik} T[i][k][j]. False when the family
// provides no tensor.
bool jacGradient(const Map& f, const Vec& x, Vec& out);

}  // namespace critlab

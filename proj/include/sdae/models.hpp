#pragma once

#include <string>

#include "sdae/problem.hpp"

namespace sdae {

// Porosity values on the (m+1) x (m+1) node grid of [0,2]^2, row-major with
// x varying fastest. phi = 0 marks impermeable rock and produces a singular
// row of the mass matrix.
struct PorosityField {
    Index m = 0;
    Vector phi; // (m+1)^2 values in [0, 1]

    Index nodes() const { return (m + 1) * (m + 1); }
    double at(Index ix, Index iy) const { return phi(iy * (m + 1) + ix); }
};

// phi = 1 background with deterministic rectangular phi = 0 inclusions in
// the interior; nothing touches the Dirichlet wall x = 0. Requires m >= 8.
PorosityField default_porosity(Index m);

// Format: first line m, then (m+1) lines of (m+1) comma-separated values.
PorosityField read_porosity_csv(const std::string& filename);
void write_porosity_csv(const PorosityField& field, const std::string& filename);

struct Heat2dSpec {
    Index m = 20;              // grid cells per side
    double diffusion = 100.0;  // scalar D
    double noise_amp = 1e-4;
    double horizon = 1.0;
    PorosityField porosity;    // defaulted from m when empty
};

// Three-dimensional index-1 system with a time-varying singular mass matrix,
// cubic drift and multiplicative noise whose third row vanishes (so the
// constraint row is noise-free). The linear part of the drift is registered
// in B so that A - hB stays invertible for h in (0, 1); f keeps the cubic
// remainder.
SdaeProblem example3d();

// Same system with the whole drift in f and B = 0. The iteration matrix
// A - hB is then singular for every h; kept for tests that exercise the
// failure mode.
SdaeProblem example3d_unsplit();

// Negative control: diagonal mass with a noise column hitting the algebraic
// row, so the index-1 check must fail.
SdaeProblem broken_index1_model();

// Finite-difference discretization of the porous-media diffusion problem on
// [0,2]^2: mass matrix diag(phi), implicit 5-point Laplacian scaled by D,
// Dirichlet value 1 on the x = 0 wall, homogeneous Neumann elsewhere via
// ghost-node reflection, drift f = Y - phi and noise noise_amp * diag(phi)
// on interior rows. Dirichlet rows keep A = diag(phi), zero out B and g, and
// enforce the boundary value through f.
SdaeProblem build_heat2d(const Heat2dSpec& spec);

// Final-time solution as an (m+1) x (m+1) grid CSV, one row per grid line.
void write_grid_csv(const Vector& values, Index m, const std::string& filename);

} // namespace sdae

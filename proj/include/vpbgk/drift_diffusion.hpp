#pragma once

#include "vpbgk/field_solver.hpp"
#include "vpbgk/phase_mesh.hpp"

#include <vector>

namespace vpbgk {

/// Density-only state of the limit (eps = 0) solver.
struct FluidState {
    std::vector<double> rho;
    FieldHistory field;
    double time = 0.0;
    double rho_bar = 1.0;
};

/// Explicit limit scheme rho_i += m2 dt/dx (J_{i+1/2} - J_{i-1/2}), written as
/// face fluxes F = -m2 J so it shares the kinetic solver's flux update.
/// Stability (dt <= dx^2 / (2 m2)) is the caller's responsibility.
void fluid_step(FluidState& state, double dt, const SpaceMesh& mesh, double m2);

} // namespace vpbgk

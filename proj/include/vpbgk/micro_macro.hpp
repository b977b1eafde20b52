#pragma once

#include "vpbgk/field_solver.hpp"
#include "vpbgk/phase_mesh.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vpbgk {

/// Micro-macro unknowns: f = rho M + g.
///
/// `g` is stored dual-cell-major: g[i * nv + j] is the value on
/// X_{i+1/2} x V_j. `field.current()` holds the electric field solved from
/// the density at the start of the most recent step (or from the initial
/// density before any step).
struct KineticState {
    std::vector<double> rho;
    std::vector<double> g;
    FieldHistory field;
    double time = 0.0;
    double eps = 1.0;
    double rho_bar = 1.0;

    std::span<double> g_cell(std::size_t i, std::size_t nv) { return {g.data() + i * nv, nv}; }
    std::span<const double> g_cell(std::size_t i, std::size_t nv) const { return {g.data() + i * nv, nv}; }
};

/// Per-(dual cell, velocity cell) rate of the transport term
/// T g - d_x <v_x g> M, as a cell-average rate. Same layout as g.
struct TransportStencil {
    std::vector<double> rate;
};

/// J_{i+1/2} = (rho_{i+1} - rho_i)/dx - E_{i+1/2} (rho_i + rho_{i+1})/2, periodic.
StaggeredField compute_current(std::span<const double> rho, const StaggeredField& e, double dx);
StaggeredField compute_current(std::span<const double> rho, const StaggeredField& e,
                               const SpaceMesh& mesh);

TransportStencil compute_transport(std::span<const double> g, const StaggeredField& e,
                                   const PhaseSpace& ps);

/// Transport rate of a single dual cell. `left` / `right` are the g-slices of
/// the neighboring dual cells; an empty span reads as g = 0 (fluid neighbor).
void transport_rate_cell(std::span<const double> left, std::span<const double> center,
                         std::span<const double> right, double e_face, const PhaseSpace& ps,
                         std::span<double> rate);

/// Exponential-integrator update of g using E = state.field.current() and
/// the given current J. Returns g^{n+1}; the state is not modified.
std::vector<double> step_micro(const KineticState& state, const StaggeredField& current,
                               double dt, const PhaseSpace& ps);

/// Flux-form density update from the already advanced perturbation:
/// F_{i+1/2} = <xi g^{n+1}_{i+1/2}> / eps, rho_i -= dt/dx (F_{i+1/2} - F_{i-1/2}).
std::vector<double> step_macro(const KineticState& state, std::span<const double> g_new, double dt,
                               const PhaseSpace& ps);

/// One full step: Poisson, current, micro, macro. Advances state.time by dt.
void kinetic_step(KineticState& state, double dt, const PhaseSpace& ps);

/// Time step combining the transport, diffusive and field-advection limits:
///   cfl * min(dx / v_star, dx^2 / (2 m2), dv / max|E|, micro-transport bound)
/// The micro-transport bound keeps the exponential-integrator upwind update
/// stable at intermediate eps; it is inactive when eps <= 0 (fluid solver)
/// and whenever 2 eps (v_star/dx + max|E|/dv) <= 1.
double stable_dt(std::span<const double> e_values, double eps, const PhaseSpace& ps, double cfl);
double stable_dt(const KineticState& state, const PhaseSpace& ps, double cfl);

/// rho_i -= dt_over_dx * (flux_i - flux_{i-1}), flux on dual points.
/// Shared by every solver so that degenerate hybrid partitions reproduce
/// the pure solvers bit for bit.
void apply_face_fluxes(std::span<double> rho, std::span<const double> face_flux, double dt_over_dx);

/// <xi g_{i+1/2}>_Delta for one dual cell, fixed summation order.
double cell_flux_moment(std::span<const double> g_cell, const PhaseSpace& ps);

/// What an active cell sees in place of an inactive (fluid) neighbor.
enum class InterfaceClosure {
    Zero,           // g = 0
    ChapmanEnskog,  // g = -eps xi_j M_j J at the neighbor's face
};

/// Advances g in place on the dual cells flagged in `active` (all cells when
/// `active` is empty). Inactive cells are neither read nor written; active
/// cells see inactive neighbors through `closure`.
void advance_micro(std::vector<double>& g, const StaggeredField& e, const StaggeredField& current,
                   double eps, double dt, const PhaseSpace& ps, std::span<const std::uint8_t> active = {},
                   InterfaceClosure closure = InterfaceClosure::ChapmanEnskog);

} // namespace vpbgk

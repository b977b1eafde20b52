#include "vpbgk/drift_diffusion.hpp"

#include "vpbgk/errors.hpp"
#include "vpbgk/micro_macro.hpp"

namespace vpbgk {

void fluid_step(FluidState& state, double dt, const SpaceMesh& mesh, double m2) {
    if (state.rho.size() != mesh.n_cells) {
        throw ContractViolation("fluid state does not match the space mesh");
    }
    StaggeredField e = solve_poisson(state.rho, state.rho_bar, mesh);
    const StaggeredField current = compute_current(state.rho, e, mesh.dx);
    state.field.push(std::move(e), state.time);

    std::vector<double> flux(current.values.size());
    for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = -m2 * current.values[i];
    apply_face_fluxes(state.rho, flux, dt / mesh.dx);
    state.time += dt;
}

} // namespace vpbgk

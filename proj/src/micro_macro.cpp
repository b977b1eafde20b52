#include "vpbgk/micro_macro.hpp"

#include "vpbgk/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vpbgk {

namespace {

void check_kinetic_shapes(const KineticState& state, const PhaseSpace& ps) {
    if (state.rho.size() != ps.nx() || state.g.size() != ps.nx() * ps.nv()) {
        throw ContractViolation("kinetic state does not match the phase-space mesh");
    }
    if (!(state.eps > 0.0)) {
        throw ContractViolation("kinetic state requires eps > 0");
    }
}

const StaggeredField& current_field(const KineticState& state) {
    if (!state.field.current()) {
        throw ContractViolation("kinetic state has no electric field; solve Poisson first");
    }
    return *state.field.current();
}

} // namespace

StaggeredField compute_current(std::span<const double> rho, const StaggeredField& e, double dx) {
    const std::size_t n = rho.size();
    if (e.size() != n) {
        throw ContractViolation("density and field lengths differ");
    }
    StaggeredField j;
    j.quantity = StaggeredQuantity::Current;
    j.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = i + 1 == n ? 0 : i + 1;
        const double rho_face = 0.5 * (rho[i] + rho[ip]);
        j.values[i] = (rho[ip] - rho[i]) / dx - e.values[i] * rho_face;
    }
    return j;
}

StaggeredField compute_current(std::span<const double> rho, const StaggeredField& e,
                               const SpaceMesh& mesh) {
    if (rho.size() != mesh.n_cells) {
        throw ContractViolation("density length does not match the space mesh");
    }
    return compute_current(rho, e, mesh.dx);
}

void transport_rate_cell(std::span<const double> left, std::span<const double> center,
                         std::span<const double> right, double e_face, const PhaseSpace& ps,
                         std::span<double> rate) {
    const std::size_t nv = ps.nv();
    const VelocityMesh& vm = ps.velocity;
    const double inv_dx = 1.0 / ps.space.dx;
    const double inv_dv = 1.0 / vm.dv;
    const double* mw = ps.maxwellian.weights.data();

    // Upwind x-advection, xi^+ D^- g + xi^- D^+ g.
    double mean = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
        const double gl = left.empty() ? 0.0 : left[j];
        const double gr = right.empty() ? 0.0 : right[j];
        const double c = center[j];
        rate[j] = (ps.xi_plus[j] * (c - gl) + ps.xi_minus[j] * (gr - c)) * inv_dx;
        mean += rate[j] * vm.cell_volume;
    }

    // Projection: subtract M_j <x-advection>, then add the v_x advection,
    // upwinded by the sign of E with zero inflow past +-v_star.
    const std::size_t s = vm.vx_stride;
    const std::size_t last = vm.per_axis - 1;
    for (std::size_t j = 0; j < nv; ++j) {
        double vadv = 0.0;
        if (e_face > 0.0) {
            const double below = vm.vx_index(j) > 0 ? center[j - s] : 0.0;
            vadv = e_face * (center[j] - below) * inv_dv;
        } else if (e_face < 0.0) {
            const double above = vm.vx_index(j) < last ? center[j + s] : 0.0;
            vadv = e_face * (above - center[j]) * inv_dv;
        }
        rate[j] = rate[j] - mw[j] * mean + vadv;
    }
}

TransportStencil compute_transport(std::span<const double> g, const StaggeredField& e,
                                   const PhaseSpace& ps) {
    const std::size_t nx = ps.nx();
    const std::size_t nv = ps.nv();
    if (g.size() != nx * nv || e.size() != nx) {
        throw ContractViolation("transport inputs do not match the phase-space mesh");
    }
    TransportStencil out;
    out.rate.resize(g.size());
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t il = ps.space.left(i);
        const std::size_t ir = ps.space.right(i);
        transport_rate_cell(g.subspan(il * nv, nv), g.subspan(i * nv, nv), g.subspan(ir * nv, nv),
                            e.values[i], ps, std::span<double>(out.rate).subspan(i * nv, nv));
    }
    return out;
}

double cell_flux_moment(std::span<const double> g_cell, const PhaseSpace& ps) {
    const double vol = ps.velocity.cell_volume;
    double sum = 0.0;
    for (std::size_t j = 0; j < g_cell.size(); ++j) sum += ps.xi[j] * g_cell[j] * vol;
    return sum;
}

void advance_micro(std::vector<double>& g, const StaggeredField& e, const StaggeredField& current,
                   double eps, double dt, const PhaseSpace& ps, std::span<const std::uint8_t> active,
                   InterfaceClosure closure) {
    const std::size_t nx = ps.nx();
    const std::size_t nv = ps.nv();
    if (g.size() != nx * nv || e.size() != nx || current.size() != nx) {
        throw ContractViolation("micro update inputs do not match the phase-space mesh");
    }
    if (!active.empty() && active.size() != nx) {
        throw ContractViolation("active-cell mask length does not match the space mesh");
    }
    const auto is_active = [&](std::size_t i) { return active.empty() || active[i] != 0; };

    std::vector<std::size_t> cells;
    cells.reserve(nx);
    for (std::size_t i = 0; i < nx; ++i)
        if (is_active(i)) cells.push_back(i);
    if (cells.empty()) return;

    // g^{n+1} = e^{-dt/eps^2} g^n - eps (1 - e^{-dt/eps^2}) (rate + xi M J)
    const double lambda = dt / (eps * eps);
    const double decay = std::exp(-lambda);
    const double gain = eps * -std::expm1(-lambda);

    const std::span<const double> gv(g);
    std::vector<double> next(cells.size() * nv);
    std::vector<double> rate(nv);
    std::vector<double> ghost_left, ghost_right;
    if (closure == InterfaceClosure::ChapmanEnskog) {
        ghost_left.resize(nv);
        ghost_right.resize(nv);
    }
    const auto neighbor = [&](std::size_t n, std::vector<double>& ghost) -> std::span<const double> {
        if (is_active(n)) return gv.subspan(n * nv, nv);
        if (ghost.empty()) return {};
        for (std::size_t j = 0; j < nv; ++j) ghost[j] = -eps * ps.xi_m[j] * current.values[n];
        return ghost;
    };
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const std::size_t i = cells[k];
        const auto left = neighbor(ps.space.left(i), ghost_left);
        const auto right = neighbor(ps.space.right(i), ghost_right);
        const auto center = gv.subspan(i * nv, nv);
        transport_rate_cell(left, center, right, e.values[i], ps, rate);
        const double j_face = current.values[i];
        double* out = next.data() + k * nv;
        for (std::size_t j = 0; j < nv; ++j) {
            out[j] = decay * center[j] - gain * (rate[j] + ps.xi_m[j] * j_face);
        }
    }
    for (std::size_t k = 0; k < cells.size(); ++k) {
        std::copy_n(next.data() + k * nv, nv, g.data() + cells[k] * nv);
    }
}

std::vector<double> step_micro(const KineticState& state, const StaggeredField& current, double dt,
                               const PhaseSpace& ps) {
    check_kinetic_shapes(state, ps);
    std::vector<double> g = state.g;
    advance_micro(g, current_field(state), current, state.eps, dt, ps);
    return g;
}

void apply_face_fluxes(std::span<double> rho, std::span<const double> face_flux, double dt_over_dx) {
    const std::size_t n = rho.size();
    if (face_flux.size() != n) {
        throw ContractViolation("face flux length does not match the density");
    }
    if (n == 0) return;
    double flux_left = face_flux[n - 1];
    for (std::size_t i = 0; i < n; ++i) {
        rho[i] -= dt_over_dx * (face_flux[i] - flux_left);
        flux_left = face_flux[i];
    }
}

std::vector<double> step_macro(const KineticState& state, std::span<const double> g_new, double dt,
                               const PhaseSpace& ps) {
    check_kinetic_shapes(state, ps);
    if (g_new.size() != state.g.size()) {
        throw ContractViolation("updated perturbation has the wrong shape");
    }
    const std::size_t nv = ps.nv();
    std::vector<double> flux(ps.nx());
    for (std::size_t i = 0; i < flux.size(); ++i) {
        flux[i] = cell_flux_moment(g_new.subspan(i * nv, nv), ps) / state.eps;
    }
    std::vector<double> rho = state.rho;
    apply_face_fluxes(rho, flux, dt / ps.space.dx);
    return rho;
}

void kinetic_step(KineticState& state, double dt, const PhaseSpace& ps) {
    check_kinetic_shapes(state, ps);
    StaggeredField e = solve_poisson(state.rho, state.rho_bar, ps.space);
    const StaggeredField current = compute_current(state.rho, e, ps.space.dx);
    state.field.push(std::move(e), state.time);

    advance_micro(state.g, *state.field.current(), current, state.eps, dt, ps);

    const std::size_t nv = ps.nv();
    std::vector<double> flux(ps.nx());
    for (std::size_t i = 0; i < flux.size(); ++i) {
        flux[i] = cell_flux_moment(state.g_cell(i, nv), ps) / state.eps;
    }
    apply_face_fluxes(state.rho, flux, dt / ps.space.dx);
    state.time += dt;
}

double stable_dt(std::span<const double> e_values, double eps, const PhaseSpace& ps, double cfl) {
    double e_max = 0.0;
    for (double e : e_values) e_max = std::max(e_max, std::abs(e));
    const double dx = ps.space.dx;
    const double dv = ps.velocity.dv;
    const double v_star = ps.velocity.v_star;

    double dt = std::min({dx / v_star, dx * dx / (2.0 * ps.maxwellian.m2),
                          dv / std::max(e_max, 1e-12)});
    if (eps > 0.0) {
        // Odd-even mode of the upwind update: |e^{-l} - 2 eps (1 - e^{-l}) c| <= 1
        // with c = v_star/dx + max|E|/dv, i.e. tanh(l/2) <= 1 / (2 eps c).
        const double a = 2.0 * eps * (v_star / dx + e_max / dv);
        if (a > 1.0) dt = std::min(dt, 2.0 * eps * eps * std::atanh(1.0 / a));
    }
    return cfl * dt;
}

double stable_dt(const KineticState& state, const PhaseSpace& ps, double cfl) {
    const StaggeredField e = solve_poisson(state.rho, state.rho_bar, ps.space);
    return stable_dt(e.values, state.eps, ps, cfl);
}

} // namespace vpbgk

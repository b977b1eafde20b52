#include "vpbgk/adaptation.hpp"

#include "vpbgk/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vpbgk {

CellStateMap::CellStateMap(std::size_t n_cells)
    : states_(n_cells, CellState::Kinetic), last_switch_(n_cells, -1), kinetic_count_(n_cells) {}

std::vector<std::uint8_t> CellStateMap::kinetic_mask() const {
    std::vector<std::uint8_t> mask(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) mask[i] = is_kinetic(i) ? 1 : 0;
    return mask;
}

void CellStateMap::assign(std::size_t i, CellState state, long step) {
    if (states_[i] == state) return;
    if (state == CellState::Kinetic) {
        ++kinetic_count_;
    } else {
        --kinetic_count_;
    }
    states_[i] = state;
    last_switch_[i] = step;
    ++total_switches_;
}

double auto_remainder_threshold(std::span<const double> remainder) {
    double r_max = 0.0;
    for (double r : remainder) r_max = std::max(r_max, std::abs(r));
    return 1e-3 * std::max(1.0, r_max);
}

RemainderField compute_remainder(std::span<const double> rho, const StaggeredField& current,
                                 const StaggeredField& e, std::span<const double> de_dt,
                                 double rho_bar, const SpaceMesh& mesh) {
    const std::size_t n = mesh.n_cells;
    if (rho.size() != n || current.size() != n || e.size() != n ||
        (!de_dt.empty() && de_dt.size() != n)) {
        throw ContractViolation("remainder inputs do not match the space mesh");
    }
    const double dx = mesh.dx;
    const auto& J = current.values;

    RemainderField out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m2 = mesh.wrap(i, -2);
        const std::size_t m1 = mesh.left(i);
        const std::size_t p1 = mesh.right(i);
        const std::size_t p2 = mesh.wrap(i, 2);

        const double j_x = (J[p1] - J[m1]) / (2.0 * dx);
        const double j_xx = (J[p1] - 2.0 * J[i] + J[m1]) / (dx * dx);
        const double j_xxx = (J[p2] - 2.0 * J[p1] + 2.0 * J[m1] - J[m2]) / (2.0 * dx * dx * dx);
        const double rho_face = 0.5 * (rho[i] + rho[p1]);
        const double rho_x = (rho[p1] - rho[i]) / dx;
        const double e_t = de_dt.empty() ? 0.0 : de_dt[i];

        out.values[i] = -j_xxx + e.values[i] * j_xx + (2.0 * rho_face - 3.0 * rho_bar) * j_x +
                        2.0 * J[i] * rho_x - rho_x * e_t;
    }
    return out;
}

double perturbation_norm_cell(std::span<const double> g_cell, const DiscreteMaxwellian& maxwellian,
                              const VelocityMesh& vmesh) {
    double sum = 0.0;
    for (std::size_t j = 0; j < g_cell.size(); ++j) {
        sum += g_cell[j] * g_cell[j] / maxwellian.weights[j] * vmesh.cell_volume;
    }
    return std::sqrt(sum);
}

std::vector<double> perturbation_norm(std::span<const double> g, const DiscreteMaxwellian& maxwellian,
                                      const VelocityMesh& vmesh) {
    const std::size_t nv = vmesh.n_total;
    if (nv == 0 || g.size() % nv != 0 || maxwellian.weights.size() != nv) {
        throw ContractViolation("perturbation array does not match the velocity mesh");
    }
    std::vector<double> out(g.size() / nv);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = perturbation_norm_cell(g.subspan(i * nv, nv), maxwellian, vmesh);
    }
    return out;
}

CellStateMap update_cell_states(const CellStateMap& states, const RemainderField& remainder,
                                std::span<const double> g_norms, const Thresholds& thresholds) {
    const std::size_t n = states.size();
    if (remainder.values.size() != n || g_norms.size() != n) {
        throw ContractViolation("adaptation inputs do not match the cell map");
    }
    CellStateMap next = states;
    const long step = states.adaptation_step() + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const bool remainder_small = std::abs(remainder.values[i]) <= thresholds.eta_R;
        if (states.is_kinetic(i)) {
            if (remainder_small && g_norms[i] <= thresholds.eta_g) {
                next.assign(i, CellState::Fluid, step);
            }
        } else if (!remainder_small) {
            next.assign(i, CellState::Kinetic, step);
        }
    }
    next.set_adaptation_step(step);
    return next;
}

void awaken_cell(std::span<double> g, std::size_t cell, std::size_t nv) {
    if ((cell + 1) * nv > g.size()) {
        throw ContractViolation("awakened cell is outside the perturbation array");
    }
    std::fill_n(g.begin() + static_cast<std::ptrdiff_t>(cell * nv), nv, 0.0);
}

void awaken_cell(std::span<double> g, std::size_t cell, double eps, double current, const PhaseSpace& ps) {
    const std::size_t nv = ps.nv();
    if ((cell + 1) * nv > g.size()) {
        throw ContractViolation("awakened cell is outside the perturbation array");
    }
    double* slice = g.data() + cell * nv;
    for (std::size_t j = 0; j < nv; ++j) slice[j] = -eps * ps.xi_m[j] * current;
}

AdaptationReport hybrid_step(KineticState& state, CellStateMap& states, double dt,
                             Thresholds& thresholds, const PhaseSpace& ps,
                             const CouplingOptions& coupling) {
    const std::size_t nx = ps.nx();
    const std::size_t nv = ps.nv();
    if (state.rho.size() != nx || state.g.size() != nx * nv || states.size() != nx) {
        throw ContractViolation("hybrid inputs do not match the phase-space mesh");
    }

    StaggeredField e = solve_poisson(state.rho, state.rho_bar, ps.space);
    const StaggeredField current = compute_current(state.rho, e, ps.space.dx);
    state.field.push(std::move(e), state.time);
    const StaggeredField& field = *state.field.current();
    const std::vector<double> de_dt = field_time_derivative(state.field);

    AdaptationReport report;
    report.remainder = compute_remainder(state.rho, current, field, de_dt, state.rho_bar, ps.space);
    report.g_norms.assign(nx, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        if (states.is_kinetic(i)) {
            report.g_norms[i] = perturbation_norm_cell(state.g_cell(i, nv), ps.maxwellian, ps.velocity);
        }
    }
    if (thresholds.auto_eta_R) {
        thresholds.eta_R = auto_remainder_threshold(report.remainder.values);
        thresholds.auto_eta_R = false;
    }

    CellStateMap next = update_cell_states(states, report.remainder, report.g_norms, thresholds);
    for (std::size_t i = 0; i < nx; ++i) {
        if (states.is_kinetic(i) && !next.is_kinetic(i)) report.retired.push_back(i);
        if (!states.is_kinetic(i) && next.is_kinetic(i)) {
            if (coupling.awaken == InterfaceClosure::Zero) {
                awaken_cell(state.g, i, nv);
            } else {
                awaken_cell(state.g, i, state.eps, current.values[i], ps);
            }
            report.awakened.push_back(i);
        }
    }
    states = std::move(next);

    const std::vector<std::uint8_t> mask = states.kinetic_mask();
    advance_micro(state.g, field, current, state.eps, dt, ps, mask, coupling.interface);

    std::vector<double> flux(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        flux[i] = mask[i] ? cell_flux_moment(state.g_cell(i, nv), ps) / state.eps
                          : -ps.maxwellian.m2 * current.values[i];
    }
    apply_face_fluxes(state.rho, flux, dt / ps.space.dx);
    state.time += dt;
    return report;
}

} // namespace vpbgk

#pragma once

#include "vpbgk/field_solver.hpp"
#include "vpbgk/micro_macro.hpp"
#include "vpbgk/phase_mesh.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vpbgk {

enum class CellState : std::uint8_t { Kinetic, Fluid };

/// Solver regime of each dual cell. Starts fully kinetic.
class CellStateMap {
public:
    explicit CellStateMap(std::size_t n_cells);

    std::size_t size() const { return states_.size(); }
    CellState operator[](std::size_t i) const { return states_[i]; }
    std::span<const CellState> states() const { return states_; }

    std::size_t kinetic_count() const { return kinetic_count_; }
    std::size_t fluid_count() const { return states_.size() - kinetic_count_; }
    /// Adaptation step at which cell i last changed regime; -1 if never.
    long last_switch_step(std::size_t i) const { return last_switch_[i]; }
    /// Number of adaptation passes applied so far.
    long adaptation_step() const { return step_; }
    std::size_t total_switches() const { return total_switches_; }

    bool is_kinetic(std::size_t i) const { return states_[i] == CellState::Kinetic; }
    /// 1 for kinetic cells, in the shape advance_micro expects.
    std::vector<std::uint8_t> kinetic_mask() const;

    /// Sets the regime of cell i as part of adaptation pass `step`.
    void assign(std::size_t i, CellState state, long step);
    void set_adaptation_step(long step) { step_ = step; }

private:
    std::vector<CellState> states_;
    std::vector<long> last_switch_;
    std::size_t kinetic_count_ = 0;
    long step_ = 0;
    std::size_t total_switches_ = 0;
};

/// Coupling thresholds. When `auto_eta_R` is set, eta_R is replaced at the
/// first adaptation by 1e-3 * max(1, max_i |R_i|) and frozen.
struct Thresholds {
    double eta_R = 1e-3;
    double eta_g = 1e-3;
    bool auto_eta_R = false;
};

/// How the hybrid step couples kinetic cells to fluid neighbors.
struct CouplingOptions {
    InterfaceClosure interface = InterfaceClosure::ChapmanEnskog;
    /// Initial g of a cell that turns kinetic.
    InterfaceClosure awaken = InterfaceClosure::ChapmanEnskog;
};

double auto_remainder_threshold(std::span<const double> remainder);

struct RemainderField {
    std::vector<double> values;
};

/// Chapman-Enskog remainder
///   R = -J_xxx + E J_xx + (2 rho - 3 rho_bar) J_x + 2 J rho_x - rho_x E_t
/// on the dual points, with centered periodic differences of J and the
/// primal density averaged / differenced onto the faces.
RemainderField compute_remainder(std::span<const double> rho, const StaggeredField& current,
                                 const StaggeredField& e, std::span<const double> de_dt,
                                 double rho_bar, const SpaceMesh& mesh);

/// Per dual cell (sum_j g_j^2 / M_j dv^dims)^{1/2}.
std::vector<double> perturbation_norm(std::span<const double> g, const DiscreteMaxwellian& maxwellian,
                                      const VelocityMesh& vmesh);
double perturbation_norm_cell(std::span<const double> g_cell, const DiscreteMaxwellian& maxwellian,
                              const VelocityMesh& vmesh);

/// Kinetic -> Fluid iff |R| <= eta_R and ||g|| <= eta_g.
/// Fluid -> Kinetic iff |R| > eta_R. Otherwise unchanged.
/// g-norms of fluid cells are ignored.
CellStateMap update_cell_states(const CellStateMap& states, const RemainderField& remainder,
                                std::span<const double> g_norms, const Thresholds& thresholds);

/// Zero-fills the g-slice of dual cell i.
void awaken_cell(std::span<double> g, std::size_t cell, std::size_t nv);
/// Fills the g-slice of dual cell i with the first-order Chapman-Enskog
/// perturbation -eps xi_j M_j J_{i+1/2}.
void awaken_cell(std::span<double> g, std::size_t cell, double eps, double current, const PhaseSpace& ps);

struct AdaptationReport {
    RemainderField remainder;
    std::vector<double> g_norms;          // zero for cells that were fluid
    std::vector<std::size_t> awakened;    // fluid -> kinetic this step
    std::vector<std::size_t> retired;     // kinetic -> fluid this step
};

/// One hybrid step: adapt the partition from n-level data, advance g on
/// kinetic cells only (fluid neighbors read as g = 0), then update rho with
/// single-valued face fluxes: <xi g^{n+1}>/eps on kinetic faces, -m2 J^n on
/// fluid faces. g on fluid cells is left untouched.
AdaptationReport hybrid_step(KineticState& state, CellStateMap& states, double dt,
                             Thresholds& thresholds, const PhaseSpace& ps,
                             const CouplingOptions& coupling = {});

} // namespace vpbgk

#pragma once

#include "vpbgk/adaptation.hpp"
#include "vpbgk/config.hpp"
#include "vpbgk/diagnostics.hpp"
#include "vpbgk/drift_diffusion.hpp"
#include "vpbgk/micro_macro.hpp"
#include "vpbgk/phase_mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace vpbgk {

struct InitialData {
    std::vector<double> rho0;
    std::vector<double> g0;  // dual x velocity, zero for both presets
    double rho_bar = 1.0;    // sum_i rho0_i dx / x_star
};

/// cosine and landau presets: f0 = (1 + alpha cos(k x)) M(v), i.e.
/// rho0 = 1 + alpha cos(k x_i) and g0 = 0.
InitialData make_initial_data(const RunConfig& config, const PhaseSpace& ps);

PhaseSpace make_phase_space(const RunConfig& config);

/// Per-cell state written to snapshot_XXXXXX.csv.
struct Snapshot {
    std::size_t step = 0;
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> rho;
    std::vector<double> e;          // at the dual point with the same index
    std::vector<CellState> states;
    std::vector<double> remainder;
    std::vector<double> g_norm;     // zero on fluid cells
};

/// Time loop for one configuration. Steps are sized by stable_dt and the
/// last one is clipped so the final time equals t_end exactly.
class Simulation {
public:
    explicit Simulation(const RunConfig& config);

    const RunConfig& config() const { return config_; }
    const PhaseSpace& phase_space() const { return ps_; }
    double time() const;
    std::size_t step() const { return step_; }
    bool finished() const;

    /// Advances one step and returns its record (wall_ms covers the solver
    /// call only).
    TimeSeriesRecord advance();
    /// Record of the current state with the given wall time attached.
    TimeSeriesRecord record(double wall_ms = 0.0) const;
    Snapshot snapshot() const;

    std::span<const double> density() const;
    StaggeredField electric_field() const;
    std::size_t kinetic_count() const;
    /// Present for the hybrid solver only.
    const CellStateMap* cell_states() const;
    /// Present for the kinetic and hybrid solvers.
    const KineticState* kinetic_state() const;
    const Thresholds& thresholds() const { return thresholds_; }
    /// Time step the next call to advance() will take.
    double next_dt() const;

private:
    std::vector<std::uint8_t> kinetic_mask() const;
    const FieldHistory& history() const;
    double rho_bar() const;

    RunConfig config_;
    PhaseSpace ps_;
    std::optional<KineticState> kinetic_;
    std::optional<FluidState> fluid_;
    std::optional<CellStateMap> cells_;
    Thresholds thresholds_;
    CouplingOptions coupling_;
    double mass0_ = 0.0;
    std::size_t step_ = 0;
};

struct RunSummary {
    std::size_t steps = 0;
    double t_final = 0.0;
    std::vector<TimeSeriesRecord> records;  // step 0 first
    std::vector<std::size_t> snapshot_steps;
    double solver_wall_ms = 0.0;
};

struct RunOptions {
    bool write_files = true;
    std::ostream* progress = nullptr;  // null silences progress lines
};

/// Runs a configuration to t_end. With write_files, creates output_dir and
/// writes resolved_config, timeseries.csv, timing.csv and snapshot_XXXXXX.csv.
/// Solver failures are rethrown as SolverError tagged with step and time.
RunSummary run(const RunConfig& config, const RunOptions& options = {});

void write_snapshot(const Snapshot& snap, const std::filesystem::path& file);
std::string snapshot_filename(std::size_t step);

struct SnapshotGap {
    std::size_t step_a = 0, step_b = 0;
    double t_a = 0.0, t_b = 0.0;
    DensityGap gap;
};

struct CompareReport {
    std::vector<SnapshotGap> snapshots;
    double e_l2_a = 0.0, e_l2_b = 0.0;
    double e_l2_gap = 0.0;
    double wall_ms_a = 0.0, wall_ms_b = 0.0;
    double wall_ratio = 0.0;  // a / b
};

/// Compares two finished run directories snapshot by snapshot (in order).
/// Throws ConfigError on mesh or snapshot-count mismatch.
CompareReport compare_runs(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b);
void print_report(const CompareReport& report, std::ostream& out);

} // namespace vpbgk

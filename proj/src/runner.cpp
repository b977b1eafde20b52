#include "vpbgk/runner.hpp"

#include "vpbgk/errors.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace vpbgk {

namespace fs = std::filesystem;

InitialData make_initial_data(const RunConfig& config, const PhaseSpace& ps) {
    if (config.init != InitPreset::Cosine && config.init != InitPreset::Landau) {
        throw ConfigError("unknown initial-data preset");
    }
    const SpaceMesh& mesh = ps.space;
    InitialData data;
    data.rho0.resize(mesh.n_cells);
    for (std::size_t i = 0; i < mesh.n_cells; ++i) {
        data.rho0[i] = 1.0 + config.init_alpha * std::cos(config.init_k * mesh.primal_centers[i]);
    }
    // Both presets are Maxwellian in velocity, so the micro part vanishes.
    data.g0.assign(mesh.n_cells * ps.nv(), 0.0);
    double mass = 0.0;
    for (double r : data.rho0) mass += r * mesh.dx;
    data.rho_bar = mass / mesh.length;
    return data;
}

PhaseSpace make_phase_space(const RunConfig& config) {
    return build_phase_space(build_space_mesh(config.n_cells, config.x_star),
                             build_velocity_mesh(config.half_cells, config.v_star, config.dims));
}

Simulation::Simulation(const RunConfig& config) : config_(config), ps_(make_phase_space(config)) {
    InitialData data = make_initial_data(config_, ps_);
    mass0_ = total_mass(data.rho0, ps_.space);
    if (config_.solver == SolverKind::Fluid) {
        FluidState s;
        s.rho = std::move(data.rho0);
        s.rho_bar = data.rho_bar;
        fluid_ = std::move(s);
    } else {
        KineticState s;
        s.rho = std::move(data.rho0);
        s.g = std::move(data.g0);
        s.rho_bar = data.rho_bar;
        s.eps = config_.eps;
        kinetic_ = std::move(s);
    }
    if (config_.solver == SolverKind::Hybrid) {
        cells_.emplace(ps_.nx());
        thresholds_.auto_eta_R = config_.eta_R.is_auto;
        thresholds_.eta_R = config_.eta_R.is_auto ? 0.0 : config_.eta_R.value;
        thresholds_.eta_g = config_.eta_g.value;
        coupling_.interface = config_.interface == InterfaceRule::Zero ? InterfaceClosure::Zero
                                                                      : InterfaceClosure::ChapmanEnskog;
    }
}

double Simulation::time() const { return kinetic_ ? kinetic_->time : fluid_->time; }

bool Simulation::finished() const { return !(time() < config_.t_end); }

std::span<const double> Simulation::density() const { return kinetic_ ? kinetic_->rho : fluid_->rho; }

double Simulation::rho_bar() const { return kinetic_ ? kinetic_->rho_bar : fluid_->rho_bar; }

const FieldHistory& Simulation::history() const { return kinetic_ ? kinetic_->field : fluid_->field; }

StaggeredField Simulation::electric_field() const { return solve_poisson(density(), rho_bar(), ps_.space); }

const CellStateMap* Simulation::cell_states() const { return cells_ ? &*cells_ : nullptr; }

const KineticState* Simulation::kinetic_state() const { return kinetic_ ? &*kinetic_ : nullptr; }

std::size_t Simulation::kinetic_count() const {
    if (cells_) return cells_->kinetic_count();
    return kinetic_ ? ps_.nx() : 0;
}

std::vector<std::uint8_t> Simulation::kinetic_mask() const {
    if (cells_) return cells_->kinetic_mask();
    return std::vector<std::uint8_t>(ps_.nx(), kinetic_ ? 1 : 0);
}

double Simulation::next_dt() const {
    const double eps = config_.solver == SolverKind::Fluid ? 0.0 : config_.eps;
    return stable_dt(electric_field().values, eps, ps_, config_.cfl);
}

TimeSeriesRecord Simulation::advance() {
    if (finished()) throw ContractViolation("simulation already reached t_end");
    double dt = next_dt();
    const bool last = time() + dt >= config_.t_end;
    if (last) dt = config_.t_end - time();

    const auto start = std::chrono::steady_clock::now();
    if (fluid_) {
        fluid_step(*fluid_, dt, ps_.space, ps_.maxwellian.m2);
    } else if (cells_) {
        hybrid_step(*kinetic_, *cells_, dt, thresholds_, ps_, coupling_);
    } else {
        kinetic_step(*kinetic_, dt, ps_);
    }
    const auto stop = std::chrono::steady_clock::now();

    if (last) {
        if (kinetic_) kinetic_->time = config_.t_end;
        else fluid_->time = config_.t_end;
    }
    ++step_;
    return record(std::chrono::duration<double, std::milli>(stop - start).count());
}

TimeSeriesRecord Simulation::record(double wall_ms) const {
    TimeSeriesRecord rec;
    rec.t = time();
    rec.mass = total_mass(density(), ps_.space);
    rec.mass_variation = rec.mass - mass0_;
    if (kinetic_) rec.g_mass = perturbation_mass(kinetic_->g, ps_, kinetic_mask());
    rec.e_l2 = electric_norm(electric_field(), ps_.space);
    rec.kinetic_count = kinetic_count();
    rec.wall_ms = wall_ms;
    return rec;
}

Snapshot Simulation::snapshot() const {
    const std::size_t nx = ps_.nx();
    const std::size_t nv = ps_.nv();
    Snapshot s;
    s.step = step_;
    s.t = time();
    s.x = ps_.space.primal_centers;
    s.rho.assign(density().begin(), density().end());
    const StaggeredField e = electric_field();
    s.e = e.values;

    const std::vector<std::uint8_t> mask = kinetic_mask();
    s.states.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) s.states[i] = mask[i] ? CellState::Kinetic : CellState::Fluid;

    // dE/dt against the field stored by the last step.
    std::vector<double> de_dt(nx, 0.0);
    const FieldHistory& h = history();
    if (h.current() && s.t > h.time()) {
        for (std::size_t i = 0; i < nx; ++i) de_dt[i] = (e.values[i] - h.current()->values[i]) / (s.t - h.time());
    }
    const StaggeredField current = compute_current(s.rho, e, ps_.space.dx);
    s.remainder = compute_remainder(s.rho, current, e, de_dt, rho_bar(), ps_.space).values;

    s.g_norm.assign(nx, 0.0);
    if (kinetic_) {
        for (std::size_t i = 0; i < nx; ++i) {
            if (mask[i]) s.g_norm[i] = perturbation_norm_cell(kinetic_->g_cell(i, nv), ps_.maxwellian, ps_.velocity);
        }
    }
    return s;
}

std::string snapshot_filename(std::size_t step) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "snapshot_%06zu.csv", step);
    return buf.data();
}

void write_snapshot(const Snapshot& snap, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << "cell,x,rho,E,state,R,g_norm\n";
    for (std::size_t i = 0; i < snap.x.size(); ++i) {
        out << i << ',' << format_double(snap.x[i]) << ',' << format_double(snap.rho[i]) << ','
            << format_double(snap.e[i]) << ',' << (snap.states[i] == CellState::Kinetic ? 'K' : 'F') << ','
            << format_double(snap.remainder[i]) << ',' << format_double(snap.g_norm[i]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

namespace {

void write_record(std::ostream& out, const TimeSeriesRecord& r) {
    out << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.mass_variation) << ','
        << format_double(r.g_mass) << ',' << format_double(r.e_l2) << ',' << r.kinetic_count << '\n';
}

std::vector<std::vector<std::string>> read_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read " + file.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

double to_double(const std::string& s) { return std::stod(s); }

struct RunDirectory {
    std::vector<std::pair<std::size_t, fs::path>> snapshots;  // sorted by step
    std::vector<double> times;                                // per step
    double final_e_l2 = 0.0;
    double wall_ms = 0.0;
};

RunDirectory scan(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("not a run directory: " + dir.string());
    RunDirectory run;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.starts_with("snapshot_") && name.ends_with(".csv")) {
            const std::size_t step = std::stoull(name.substr(9, name.size() - 13));
            run.snapshots.emplace_back(step, entry.path());
        }
    }
    std::sort(run.snapshots.begin(), run.snapshots.end());
    const auto series = read_csv(dir / "timeseries.csv");
    if (series.empty()) throw ConfigError("empty time series in " + dir.string());
    for (const auto& row : series) run.times.push_back(to_double(row.at(0)));
    run.final_e_l2 = to_double(series.back().at(4));
    for (const auto& row : read_csv(dir / "timing.csv")) run.wall_ms += to_double(row.at(2));
    return run;
}

} // namespace

RunSummary run(const RunConfig& config, const RunOptions& options) {
    Simulation sim(config);
    RunSummary summary;

    const fs::path dir(config.output_dir);
    std::ofstream series, timing;
    if (options.write_files) {
        fs::create_directories(dir);
        std::ofstream echo(dir / "resolved_config", std::ios::binary);
        echo << format_config(config);
        series.open(dir / "timeseries.csv", std::ios::binary);
        timing.open(dir / "timing.csv", std::ios::binary);
        if (!echo || !series || !timing) throw std::runtime_error("cannot write outputs to " + dir.string());
        series << "t,mass,mass_variation,g_mass,e_l2,kinetic_count\n";
        timing << "step,t,wall_ms\n";
    }

    const auto emit = [&](const TimeSeriesRecord& rec) {
        summary.records.push_back(rec);
        summary.solver_wall_ms += rec.wall_ms;
        if (!options.write_files) return;
        write_record(series, rec);
        timing << sim.step() << ',' << format_double(rec.t) << ',' << format_double(rec.wall_ms) << '\n';
    };
    const auto take_snapshot = [&]() {
        summary.snapshot_steps.push_back(sim.step());
        if (options.write_files) write_snapshot(sim.snapshot(), dir / snapshot_filename(sim.step()));
    };

    emit(sim.record());
    take_snapshot();
    while (!sim.finished()) {
        TimeSeriesRecord rec;
        try {
            rec = sim.advance();
        } catch (const SolverError& e) {
            std::ostringstream msg;
            msg << "step " << sim.step() + 1 << ", t = " << sim.time() << ": " << e.what();
            throw SolverError(msg.str());
        }
        emit(rec);
        const bool periodic = config.snapshot_every > 0 && sim.step() % config.snapshot_every == 0;
        if (periodic || sim.finished()) take_snapshot();
        if (options.progress && (sim.step() % 1000 == 0 || sim.finished())) {
            *options.progress << "step " << sim.step() << "  t = " << rec.t << "  mass var = " << rec.mass_variation
                              << "  |E|_2 = " << rec.e_l2 << "  kinetic cells = " << rec.kinetic_count << '\n';
        }
    }
    summary.steps = sim.step();
    summary.t_final = sim.time();
    return summary;
}

CompareReport compare_runs(const fs::path& dir_a, const fs::path& dir_b) {
    const RunDirectory a = scan(dir_a);
    const RunDirectory b = scan(dir_b);
    if (a.snapshots.size() != b.snapshots.size() || a.snapshots.empty()) {
        throw ConfigError("snapshot count mismatch: " + std::to_string(a.snapshots.size()) + " vs " +
                          std::to_string(b.snapshots.size()));
    }
    CompareReport report;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        const auto rows_a = read_csv(a.snapshots[k].second);
        const auto rows_b = read_csv(b.snapshots[k].second);
        if (rows_a.size() != rows_b.size()) throw ConfigError("mesh mismatch: different cell counts");
        std::vector<double> rho_a, rho_b;
        for (std::size_t i = 0; i < rows_a.size(); ++i) {
            if (rows_a[i].at(1) != rows_b[i].at(1)) {
                throw ConfigError("mesh mismatch at cell " + std::to_string(i));
            }
            rho_a.push_back(to_double(rows_a[i].at(2)));
            rho_b.push_back(to_double(rows_b[i].at(2)));
        }
        const double dx = rows_a.size() > 1 ? to_double(rows_a[1].at(1)) - to_double(rows_a[0].at(1))
                                            : 2.0 * to_double(rows_a[0].at(1));
        SnapshotGap gap;
        gap.step_a = a.snapshots[k].first;
        gap.step_b = b.snapshots[k].first;
        gap.t_a = a.times.at(gap.step_a);
        gap.t_b = b.times.at(gap.step_b);
        gap.gap = compare_densities(rho_a, rho_b, dx);
        report.snapshots.push_back(gap);
    }
    report.e_l2_a = a.final_e_l2;
    report.e_l2_b = b.final_e_l2;
    report.e_l2_gap = std::abs(a.final_e_l2 - b.final_e_l2);
    report.wall_ms_a = a.wall_ms;
    report.wall_ms_b = b.wall_ms;
    report.wall_ratio = b.wall_ms > 0.0 ? a.wall_ms / b.wall_ms : 0.0;
    return report;
}

void print_report(const CompareReport& report, std::ostream& out) {
    out << "snapshot,step_a,step_b,t_a,t_b,linf,l1\n";
    for (std::size_t k = 0; k < report.snapshots.size(); ++k) {
        const SnapshotGap& s = report.snapshots[k];
        out << k << ',' << s.step_a << ',' << s.step_b << ',' << format_double(s.t_a) << ',' << format_double(s.t_b)
            << ',' << format_double(s.gap.linf) << ',' << format_double(s.gap.l1) << '\n';
    }
    out << "final_e_l2 a=" << format_double(report.e_l2_a) << " b=" << format_double(report.e_l2_b)
        << " gap=" << format_double(report.e_l2_gap) << '\n';
    out << "wall_ms a=" << format_double(report.wall_ms_a) << " b=" << format_double(report.wall_ms_b)
        << " ratio(a/b)=" << format_double(report.wall_ratio) << '\n';
}

} // namespace vpbgk

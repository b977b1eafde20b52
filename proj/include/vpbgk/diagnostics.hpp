#pragma once

#include "vpbgk/field_solver.hpp"
#include "vpbgk/phase_mesh.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace vpbgk {

/// One row of the per-step time series.
struct TimeSeriesRecord {
    double t = 0.0;
    double mass = 0.0;
    double mass_variation = 0.0;  // mass(t) - mass(0)
    double g_mass = 0.0;          // sum_i <g_{i+1/2}> dx over kinetic cells
    double e_l2 = 0.0;
    std::size_t kinetic_count = 0;
    double wall_ms = 0.0;         // solver step only, no I/O
};

double total_mass(std::span<const double> rho, const SpaceMesh& mesh);

/// sum_i <g_{i+1/2}>_Delta dx. Cells with mask[i] == 0 hold no perturbation
/// and are skipped; an empty mask means every cell.
double perturbation_mass(std::span<const double> g, const PhaseSpace& ps,
                         std::span<const std::uint8_t> mask = {});

/// (sum_i E_{i+1/2}^2 dx)^{1/2}
double electric_norm(const StaggeredField& e, const SpaceMesh& mesh);

struct DensityGap {
    double linf = 0.0;
    double l1 = 0.0;
};

DensityGap compare_densities(std::span<const double> a, std::span<const double> b, const SpaceMesh& mesh);
DensityGap compare_densities(std::span<const double> a, std::span<const double> b, double dx);

/// Least-squares slope of log(value) against t over samples with
/// t0 <= t <= t1. Needs at least 3 samples, all strictly positive.
double decay_rate(std::span<const std::pair<double, double>> series, double t0, double t1);

/// Indices k with value[k-1] < value[k] > value[k+1].
std::vector<std::size_t> local_maxima(std::span<const double> values);

} // namespace vpbgk

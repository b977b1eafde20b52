#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vpbgk {

/// Periodic 1D space mesh with primal cells X_i and dual (staggered) cells
/// X_{i+1/2} = (x_i, x_{i+1}).
///
/// Cell-centered convention: x_i = (i + 1/2) dx, x_{i+1/2} = x_i + dx/2.
/// Dual index i always refers to the point i+1/2.
struct SpaceMesh {
    std::size_t n_cells = 0;
    double length = 0.0;
    double dx = 0.0;
    std::vector<double> primal_centers;
    std::vector<double> dual_centers;

    std::size_t right(std::size_t i) const { return i + 1 == n_cells ? 0 : i + 1; }
    std::size_t left(std::size_t i) const { return i == 0 ? n_cells - 1 : i - 1; }
    /// Periodic wrap of a signed offset from cell i.
    std::size_t wrap(std::size_t i, long offset) const;
};

/// Symmetric Cartesian velocity mesh on [-v_star, v_star]^dims with 2L cells
/// per axis. Multi-indices are flattened with the v_x axis slowest, so that
/// a step along v_x is a stride of `vx_stride` in the flat index.
struct VelocityMesh {
    int dims = 1;
    std::size_t half_cells = 0;
    double v_star = 0.0;
    double dv = 0.0;
    std::vector<double> midpoints;   // per-axis, 2L values
    std::size_t per_axis = 0;        // 2L
    std::size_t n_total = 0;         // (2L)^dims
    std::size_t vx_stride = 1;       // (2L)^(dims-1)
    double cell_volume = 0.0;        // dv^dims

    /// Index along v_x of the flat velocity index.
    std::size_t vx_index(std::size_t flat) const { return flat / vx_stride; }
    /// Transport velocity xi_j = v_{j_x}.
    double xi(std::size_t flat) const { return midpoints[vx_index(flat)]; }
};

/// Tensor-product Gaussian on the velocity mesh, normalized per axis.
struct DiscreteMaxwellian {
    std::vector<double> axis_weights;  // normalized 1D factor m_l
    std::vector<double> weights;       // flat M_j
    double m0 = 0.0;                   // sum_j M_j dv^dims
    double m2 = 0.0;                   // sum_l v_l^2 m_l dv  (v_x axis)
};

/// Mesh, Maxwellian and the per-velocity tables the kernels use.
/// Immutable once built.
struct PhaseSpace {
    SpaceMesh space;
    VelocityMesh velocity;
    DiscreteMaxwellian maxwellian;
    std::vector<double> xi;        // flat xi_j
    std::vector<double> xi_plus;   // max(xi_j, 0)
    std::vector<double> xi_minus;  // min(xi_j, 0)
    std::vector<double> xi_m;      // xi_j M_j

    std::size_t nv() const { return velocity.n_total; }
    std::size_t nx() const { return space.n_cells; }
};

SpaceMesh build_space_mesh(std::size_t n_cells, double length);
VelocityMesh build_velocity_mesh(std::size_t half_cells, double v_star, int dims);
DiscreteMaxwellian build_maxwellian(const VelocityMesh& vmesh);
PhaseSpace build_phase_space(const SpaceMesh& space, const VelocityMesh& velocity);

/// sum_j values_j dv^dims, summed in flat index order.
double velocity_average(std::span<const double> values, const VelocityMesh& vmesh);
/// sum_j xi_j values_j dv^dims, summed in flat index order.
double velocity_flux_average(std::span<const double> values, const VelocityMesh& vmesh);

} // namespace vpbgk

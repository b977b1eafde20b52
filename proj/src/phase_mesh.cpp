#include "vpbgk/phase_mesh.hpp"

#include "vpbgk/errors.hpp"

#include <cmath>
#include <string>

namespace vpbgk {

namespace {

// Third differences on the dual grid reach two cells either side.
constexpr std::size_t kMinSpaceCells = 8;

void check_length(std::span<const double> values, const VelocityMesh& vmesh) {
    if (values.size() != vmesh.n_total) {
        throw ContractViolation("velocity array has " + std::to_string(values.size()) +
                                " entries, mesh has " + std::to_string(vmesh.n_total));
    }
}

// Neumaier summation; the order of additions is still the caller's.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        carry_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

} // namespace

std::size_t SpaceMesh::wrap(std::size_t i, long offset) const {
    const long n = static_cast<long>(n_cells);
    long k = (static_cast<long>(i) + offset) % n;
    if (k < 0) k += n;
    return static_cast<std::size_t>(k);
}

SpaceMesh build_space_mesh(std::size_t n_cells, double length) {
    if (n_cells < kMinSpaceCells) {
        throw ConfigError("n_cells must be at least " + std::to_string(kMinSpaceCells) +
                          ", got " + std::to_string(n_cells));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ConfigError("space length must be positive and finite");
    }
    SpaceMesh mesh;
    mesh.n_cells = n_cells;
    mesh.length = length;
    mesh.dx = length / static_cast<double>(n_cells);
    mesh.primal_centers.resize(n_cells);
    mesh.dual_centers.resize(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        const double x = (static_cast<double>(i) + 0.5) * mesh.dx;
        mesh.primal_centers[i] = x;
        mesh.dual_centers[i] = x + 0.5 * mesh.dx;
    }
    return mesh;
}

VelocityMesh build_velocity_mesh(std::size_t half_cells, double v_star, int dims) {
    if (dims != 1 && dims != 3) {
        throw ConfigError("velocity dims must be 1 or 3, got " + std::to_string(dims));
    }
    if (half_cells < 2) {
        throw ConfigError("half_cells must be at least 2");
    }
    if (!(v_star > 0.0) || !std::isfinite(v_star)) {
        throw ConfigError("v_star must be positive and finite");
    }
    VelocityMesh vm;
    vm.dims = dims;
    vm.half_cells = half_cells;
    vm.v_star = v_star;
    vm.dv = v_star / static_cast<double>(half_cells);
    vm.per_axis = 2 * half_cells;
    vm.midpoints.resize(vm.per_axis);
    // j runs over {-L+1, ..., L}; v_j = (j - 1/2) dv.
    const long L = static_cast<long>(half_cells);
    for (long j = -L + 1; j <= L; ++j) {
        vm.midpoints[static_cast<std::size_t>(j + L - 1)] = (static_cast<double>(j) - 0.5) * vm.dv;
    }
    vm.vx_stride = dims == 1 ? 1 : vm.per_axis * vm.per_axis;
    vm.n_total = vm.vx_stride * vm.per_axis;
    vm.cell_volume = dims == 1 ? vm.dv : vm.dv * vm.dv * vm.dv;
    return vm;
}

DiscreteMaxwellian build_maxwellian(const VelocityMesh& vmesh) {
    DiscreteMaxwellian mx;
    const std::size_t n = vmesh.per_axis;
    mx.axis_weights.resize(n);
    CompensatedSum mass;
    for (std::size_t l = 0; l < n; ++l) {
        const double v = vmesh.midpoints[l];
        mx.axis_weights[l] = std::exp(-0.5 * v * v);
        mass.add(mx.axis_weights[l] * vmesh.dv);
    }
    for (double& m : mx.axis_weights) m /= mass.value();

    mx.weights.resize(vmesh.n_total);
    if (vmesh.dims == 1) {
        mx.weights = mx.axis_weights;
    } else {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c)
                    mx.weights[flat++] = mx.axis_weights[a] * mx.axis_weights[b] * mx.axis_weights[c];
    }

    mx.m0 = velocity_average(mx.weights, vmesh);
    CompensatedSum m2;
    for (std::size_t l = 0; l < n; ++l) {
        const double v = vmesh.midpoints[l];
        m2.add(v * v * mx.axis_weights[l] * vmesh.dv);
    }
    mx.m2 = m2.value();
    return mx;
}

PhaseSpace build_phase_space(const SpaceMesh& space, const VelocityMesh& velocity) {
    PhaseSpace ps;
    ps.space = space;
    ps.velocity = velocity;
    ps.maxwellian = build_maxwellian(velocity);
    const std::size_t nv = velocity.n_total;
    ps.xi.resize(nv);
    ps.xi_plus.resize(nv);
    ps.xi_minus.resize(nv);
    ps.xi_m.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        const double xi = velocity.xi(j);
        ps.xi[j] = xi;
        ps.xi_plus[j] = xi > 0.0 ? xi : 0.0;
        ps.xi_minus[j] = xi < 0.0 ? xi : 0.0;
        ps.xi_m[j] = xi * ps.maxwellian.weights[j];
    }
    return ps;
}

double velocity_average(std::span<const double> values, const VelocityMesh& vmesh) {
    check_length(values, vmesh);
    CompensatedSum sum;
    for (double v : values) sum.add(v * vmesh.cell_volume);
    return sum.value();
}

double velocity_flux_average(std::span<const double> values, const VelocityMesh& vmesh) {
    check_length(values, vmesh);
    CompensatedSum sum;
    for (std::size_t j = 0; j < values.size(); ++j) sum.add(vmesh.xi(j) * values[j] * vmesh.cell_volume);
    return sum.value();
}

} // namespace vpbgk

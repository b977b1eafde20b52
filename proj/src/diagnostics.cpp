#include "vpbgk/diagnostics.hpp"

#include "vpbgk/errors.hpp"
#include "vpbgk/phase_mesh.hpp"

#include <cmath>
#include <sstream>

namespace vpbgk {

double total_mass(std::span<const double> rho, const SpaceMesh& mesh) {
    double sum = 0.0;
    for (double r : rho) sum += r * mesh.dx;
    return sum;
}

double perturbation_mass(std::span<const double> g, const PhaseSpace& ps,
                         std::span<const std::uint8_t> mask) {
    const std::size_t nv = ps.nv();
    if (g.size() != ps.nx() * nv || (!mask.empty() && mask.size() != ps.nx())) {
        throw ContractViolation("perturbation array does not match the phase-space mesh");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < ps.nx(); ++i) {
        if (!mask.empty() && mask[i] == 0) continue;
        sum += velocity_average(g.subspan(i * nv, nv), ps.velocity) * ps.space.dx;
    }
    return sum;
}

double electric_norm(const StaggeredField& e, const SpaceMesh& mesh) {
    double sum = 0.0;
    for (double v : e.values) sum += v * v * mesh.dx;
    return std::sqrt(sum);
}

DensityGap compare_densities(std::span<const double> a, std::span<const double> b, double dx) {
    if (a.size() != b.size()) {
        throw ContractViolation("compared densities have different lengths");
    }
    DensityGap gap;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        gap.linf = std::max(gap.linf, d);
        gap.l1 += d * dx;
    }
    return gap;
}

DensityGap compare_densities(std::span<const double> a, std::span<const double> b, const SpaceMesh& mesh) {
    return compare_densities(a, b, mesh.dx);
}

double decay_rate(std::span<const std::pair<double, double>> series, double t0, double t1) {
    double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (const auto& [t, value] : series) {
        if (t < t0 || t > t1) continue;
        if (!(value > 0.0)) {
            std::ostringstream msg;
            msg << "decay_rate needs positive values, got " << value << " at t = " << t;
            throw DiagnosticError(msg.str());
        }
        const double y = std::log(value);
        n += 1.0;
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    if (n < 3.0) {
        throw DiagnosticError("decay_rate needs at least 3 samples in the window");
    }
    const double denom = n * stt - st * st;
    if (!(denom > 0.0)) {
        throw DiagnosticError("decay_rate window has no time spread");
    }
    return (n * sty - st * sy) / denom;
}

std::vector<std::size_t> local_maxima(std::span<const double> values) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k + 1 < values.size(); ++k) {
        if (values[k] > values[k - 1] && values[k] > values[k + 1]) out.push_back(k);
    }
    return out;
}

} // namespace vpbgk

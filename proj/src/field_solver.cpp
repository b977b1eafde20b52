#include "vpbgk/field_solver.hpp"

#include "vpbgk/errors.hpp"

#include <cmath>
#include <sstream>

namespace vpbgk {

void FieldHistory::push(StaggeredField field, double t) {
    if (current_) {
        dt_last_ = t - time_;
        previous_ = std::move(current_);
    }
    current_ = std::move(field);
    time_ = t;
}

StaggeredField solve_poisson(std::span<const double> rho, double rho_bar, const SpaceMesh& mesh,
                             double compat_tol) {
    const std::size_t n = mesh.n_cells;
    if (rho.size() != n) {
        throw ContractViolation("density length does not match the space mesh");
    }

    StaggeredField e;
    e.quantity = StaggeredQuantity::ElectricField;
    e.values.resize(n);

    // Raw field anchored at E_{-1/2} = 0, so E_{i+1/2} = sum_{k<=i} (rho_k - rho_bar) dx.
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += (rho[i] - rho_bar) * mesh.dx;
        e.values[i] = acc;
    }
    // The last entry closes the loop: it must return to the anchor.
    const double defect = acc;
    if (!(std::abs(defect) <= compat_tol * mesh.length)) {
        std::ostringstream msg;
        msg << "Poisson compatibility violated: net charge sum (rho - rho_bar) dx = " << defect
            << " exceeds tolerance " << compat_tol * mesh.length;
        throw SolverError(msg.str());
    }

    double mean = 0.0;
    for (double v : e.values) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : e.values) v -= mean;
    return e;
}

std::vector<double> field_time_derivative(const FieldHistory& history) {
    const auto& cur = history.current();
    const auto& prev = history.previous();
    if (!cur) return {};
    std::vector<double> out(cur->size(), 0.0);
    if (!prev || !(history.dt_last() > 0.0)) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (cur->values[i] - prev->values[i]) / history.dt_last();
    }
    return out;
}

} // namespace vpbgk

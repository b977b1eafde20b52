#pragma once

#include "vpbgk/phase_mesh.hpp"

#include <optional>
#include <span>
#include <vector>

namespace vpbgk {

enum class StaggeredQuantity { ElectricField, Current };

/// Values on the dual points x_{i+1/2}, one per dual cell.
struct StaggeredField {
    StaggeredQuantity quantity = StaggeredQuantity::ElectricField;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Electric field at the last two solve times, for the backward-difference
/// time derivative used by the remainder.
class FieldHistory {
public:
    FieldHistory() = default;

    /// Record the field solved at time t. The previously current field
    /// becomes `previous`.
    void push(StaggeredField field, double t);

    const std::optional<StaggeredField>& current() const { return current_; }
    const std::optional<StaggeredField>& previous() const { return previous_; }
    double time() const { return time_; }
    /// t_current - t_previous; zero while `previous` is absent.
    double dt_last() const { return dt_last_; }

private:
    std::optional<StaggeredField> current_;
    std::optional<StaggeredField> previous_;
    double time_ = 0.0;
    double dt_last_ = 0.0;
};

/// Default compatibility tolerance for the periodic Poisson problem,
/// scaled by the domain length.
inline constexpr double kPoissonCompatibility = 1e-10;

/// Solves E_{i+1/2} - E_{i-1/2} = (rho_i - rho_bar) dx on the torus with the
/// zero-mean gauge sum_i E_{i+1/2} = 0. Cumulative sum, then mean removal.
///
/// Throws SolverError when |sum_i (rho_i - rho_bar) dx| exceeds
/// `compat_tol * length`: a periodic field cannot absorb a net charge, and a
/// defect here means mass was lost upstream.
StaggeredField solve_poisson(std::span<const double> rho, double rho_bar, const SpaceMesh& mesh,
                             double compat_tol = kPoissonCompatibility);

/// (E^n - E^{n-1}) / dt_last per dual point; zeros before the second push.
std::vector<double> field_time_derivative(const FieldHistory& history);

} // namespace vpbgk

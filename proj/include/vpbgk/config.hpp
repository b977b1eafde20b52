#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vpbgk {

enum class SolverKind { Kinetic, Fluid, Hybrid };
enum class InitPreset { Cosine, Landau };
enum class InterfaceRule { ChapmanEnskog, Zero };

/// A threshold given either as a number or as "auto".
struct ThresholdSetting {
    bool is_auto = false;
    double value = 0.0;
};

/// Experiment description. Built by parse_config; every field is validated.
struct RunConfig {
    SolverKind solver = SolverKind::Kinetic;
    double eps = 1.0;  // unused by the fluid solver
    std::size_t n_cells = 0;
    std::size_t half_cells = 0;
    double v_star = 8.0;
    int dims = 1;
    double x_star = 0.0;
    double t_end = 0.0;
    double cfl = 0.5;
    ThresholdSetting eta_R{true, 0.0};
    ThresholdSetting eta_g{false, 1e-3};
    InterfaceRule interface = InterfaceRule::ChapmanEnskog;
    InitPreset init = InitPreset::Cosine;
    double init_alpha = 0.05;
    double init_k = 2.0;
    std::string output_dir = "output";
    std::size_t snapshot_every = 100;
    std::uint64_t seed = 0;
};

/// Parses a flat `key = value` document ('#' starts a comment). Overrides of
/// the form "key=value" are applied after the document, replacing any value
/// it set. Throws ConfigError naming the offending key on missing required
/// keys, out-of-range values and unknown keys.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Fully resolved document (all defaults written out); parsing it yields
/// the same configuration.
std::string format_config(const RunConfig& config);

std::string_view to_string(SolverKind solver);
std::string_view to_string(InitPreset preset);
std::string_view to_string(InterfaceRule rule);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

} // namespace vpbgk

#include "vpbgk/config.hpp"

#include "vpbgk/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace vpbgk {

namespace {

constexpr std::array<std::string_view, 18> kKeys = {
    "solver", "eps",   "n_cells", "half_cells", "v_star",     "dims",       "x_star",
    "t_end",  "cfl",   "eta_R",   "eta_g",      "interface",  "init",       "init_alpha",
    "init_k", "output_dir", "snapshot_every", "seed"};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

std::string suggest_key(std::string_view unknown) {
    std::string best;
    std::size_t best_score = 3;
    for (std::string_view key : kKeys) {
        std::size_t score = edit_distance(unknown, key);
        const bool prefix = key.size() >= 3 && (unknown.starts_with(key) || key.starts_with(unknown));
        if (prefix) score = 0;
        if (score < best_score) {
            best_score = score;
            best = std::string(key);
        }
    }
    return best;
}

bool is_known(std::string_view key) {
    return std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end();
}

using Document = std::map<std::string, std::string, std::less<>>;

void insert_entry(Document& doc, std::string_view line, std::string_view origin, bool allow_replace) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(std::string(origin) + ": expected 'key = value', got '" + std::string(line) + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(std::string(origin) + ": empty key");
    if (!is_known(key)) {
        std::string msg = "unknown key '" + key + "'";
        if (auto s = suggest_key(key); !s.empty()) msg += " (did you mean '" + s + "'?)";
        throw ConfigError(msg);
    }
    if (value.empty()) throw ConfigError("key '" + key + "' has an empty value");
    if (!allow_replace && doc.contains(key)) {
        throw ConfigError("key '" + key + "' given more than once");
    }
    doc[key] = value;
}

Document read_document(std::string_view text) {
    Document doc;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!trim(line).empty()) insert_entry(doc, line, "line " + std::to_string(line_no), false);
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return doc;
}

class Reader {
public:
    explicit Reader(const Document& doc) : doc_(doc) {}

    bool has(std::string_view key) const { return doc_.find(key) != doc_.end(); }

    const std::string& raw(std::string_view key) const {
        auto it = doc_.find(key);
        if (it == doc_.end()) throw ConfigError("missing required key '" + std::string(key) + "'");
        return it->second;
    }

    double real(std::string_view key) const {
        const std::string& s = raw(key);
        double v = 0.0;
        if (!parse_real(s, v)) {
            throw ConfigError("key '" + std::string(key) + "': '" + s + "' is not a number");
        }
        return v;
    }

    std::uint64_t integer(std::string_view key) const {
        const std::string& s = raw(key);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw ConfigError("key '" + std::string(key) + "': '" + s + "' is not a non-negative integer");
        }
        return v;
    }

    static bool parse_real(const std::string& s, double& out) {
        if (s == "inf" || s == "+inf" || s == "infinity") {
            out = std::numeric_limits<double>::infinity();
            return true;
        }
        const char* first = s.data();
        if (*first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    }

private:
    const Document& doc_;
};

void require(bool ok, std::string_view key, std::string_view what) {
    if (!ok) throw ConfigError("key '" + std::string(key) + "' out of range: " + std::string(what));
}

double finite_positive(const Reader& r, std::string_view key) {
    const double v = r.real(key);
    require(std::isfinite(v) && v > 0.0, key, "must be a positive finite number");
    return v;
}

ThresholdSetting threshold(const Reader& r, std::string_view key, ThresholdSetting fallback) {
    if (!r.has(key)) return fallback;
    if (r.raw(key) == "auto") return {true, 0.0};
    const double v = r.real(key);
    require(v > 0.0, key, "must be positive or 'auto'");
    return {false, v};
}

RunConfig build_config(const Document& doc) {
    const Reader r(doc);
    RunConfig c;

    const std::string& solver = r.raw("solver");
    if (solver == "kinetic") c.solver = SolverKind::Kinetic;
    else if (solver == "fluid") c.solver = SolverKind::Fluid;
    else if (solver == "hybrid") c.solver = SolverKind::Hybrid;
    else throw ConfigError("key 'solver' out of range: expected kinetic, fluid or hybrid, got '" + solver + "'");

    if (c.solver != SolverKind::Fluid || r.has("eps")) c.eps = finite_positive(r, "eps");

    c.n_cells = r.integer("n_cells");
    require(c.n_cells >= 8, "n_cells", "must be at least 8");
    c.half_cells = r.integer("half_cells");
    require(c.half_cells >= 2, "half_cells", "must be at least 2");
    if (r.has("v_star")) c.v_star = finite_positive(r, "v_star");
    if (r.has("dims")) {
        const auto d = r.integer("dims");
        require(d == 1 || d == 3, "dims", "must be 1 or 3");
        c.dims = static_cast<int>(d);
    }

    const std::string& init = r.raw("init");
    if (init == "cosine") {
        c.init = InitPreset::Cosine;
        c.init_k = 2.0;
        c.x_star = 2.0 * std::numbers::pi;
    } else if (init == "landau") {
        c.init = InitPreset::Landau;
        c.init_k = 0.5;
        c.x_star = 4.0 * std::numbers::pi;
    } else {
        throw ConfigError("key 'init' out of range: expected cosine or landau, got '" + init + "'");
    }
    if (r.has("init_alpha")) {
        c.init_alpha = r.real("init_alpha");
        require(std::isfinite(c.init_alpha) && std::abs(c.init_alpha) < 1.0, "init_alpha",
                "|alpha| must be below 1 so the density stays positive");
    }
    if (r.has("init_k")) {
        c.init_k = r.real("init_k");
        require(std::isfinite(c.init_k), "init_k", "must be finite");
    }
    if (r.has("x_star")) c.x_star = finite_positive(r, "x_star");

    c.t_end = r.real("t_end");
    require(std::isfinite(c.t_end) && c.t_end >= 0.0, "t_end", "must be finite and non-negative");
    if (r.has("cfl")) {
        c.cfl = r.real("cfl");
        require(c.cfl > 0.0 && c.cfl <= 1.0, "cfl", "must lie in (0, 1]");
    }
    c.eta_R = threshold(r, "eta_R", c.eta_R);
    c.eta_g = threshold(r, "eta_g", c.eta_g);
    if (c.eta_g.is_auto) c.eta_g = {false, 1e-3};
    if (r.has("interface")) {
        const std::string& rule = r.raw("interface");
        if (rule == "chapman_enskog") c.interface = InterfaceRule::ChapmanEnskog;
        else if (rule == "zero") c.interface = InterfaceRule::Zero;
        else throw ConfigError("key 'interface' out of range: expected chapman_enskog or zero, got '" + rule + "'");
    }

    if (r.has("output_dir")) c.output_dir = r.raw("output_dir");
    if (r.has("snapshot_every")) c.snapshot_every = r.integer("snapshot_every");
    if (r.has("seed")) c.seed = r.integer("seed");
    return c;
}

} // namespace

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    return std::string(buf.data(), ptr);
}

std::string_view to_string(SolverKind solver) {
    switch (solver) {
    case SolverKind::Kinetic: return "kinetic";
    case SolverKind::Fluid: return "fluid";
    case SolverKind::Hybrid: return "hybrid";
    }
    return "unknown";
}

std::string_view to_string(InterfaceRule rule) {
    return rule == InterfaceRule::ChapmanEnskog ? "chapman_enskog" : "zero";
}

std::string_view to_string(InitPreset preset) {
    return preset == InitPreset::Cosine ? "cosine" : "landau";
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
    Document doc = read_document(text);
    for (const std::string& o : overrides) insert_entry(doc, o, "override '" + o + "'", true);
    return build_config(doc);
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), overrides);
}

std::string format_config(const RunConfig& c) {
    std::ostringstream out;
    const auto threshold_text = [](const ThresholdSetting& t) {
        return t.is_auto ? std::string("auto") : format_double(t.value);
    };
    out << "solver = " << to_string(c.solver) << '\n'
        << "eps = " << format_double(c.eps) << '\n'
        << "n_cells = " << c.n_cells << '\n'
        << "half_cells = " << c.half_cells << '\n'
        << "v_star = " << format_double(c.v_star) << '\n'
        << "dims = " << c.dims << '\n'
        << "x_star = " << format_double(c.x_star) << '\n'
        << "t_end = " << format_double(c.t_end) << '\n'
        << "cfl = " << format_double(c.cfl) << '\n'
        << "eta_R = " << threshold_text(c.eta_R) << '\n'
        << "eta_g = " << threshold_text(c.eta_g) << '\n'
        << "interface = " << to_string(c.interface) << '\n'
        << "init = " << to_string(c.init) << '\n'
        << "init_alpha = " << format_double(c.init_alpha) << '\n'
        << "init_k = " << format_double(c.init_k) << '\n'
        << "output_dir = " << c.output_dir << '\n'
        << "snapshot_every = " << c.snapshot_every << '\n'
        << "seed = " << c.seed << '\n';
    return out.str();
}

} // namespace vpbgk

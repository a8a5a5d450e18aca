// config.hpp: sweep configuration: flat `key = value` text with dotted keys.
//
//   # blockade detuning sweep
//   base.G = 3
//   base.epsilon = 0.1
//   sweep.variable = Delta
//   sweep.min = -3
//   sweep.max = 3
//   sweep.points = 241
//
// All rates are in units of gamma_c (gamma_c = 1). Sweep ranges are in G for
// Delta, dimensionless for n_th and in 2 pi / gamma_c for tau. '#' starts a
// comment. Unknown keys are rejected.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "quadblock/error.hpp"
#include "quadblock/model.hpp"

namespace quadblock::sweep {

enum class Variable { Delta, n_th, tau };
enum class DetuningRule { half_delta, free };
enum class CutoffPolicy { fixed, converge };

inline const char* to_string(Variable v) {
    switch (v) {
    case Variable::Delta: return "Delta";
    case Variable::n_th: return "n_th";
    case Variable::tau: return "tau";
    }
    return "?";
}

struct SolverSettings {
    double steady_residual = 1e-10;
    CutoffPolicy cutoff_policy = CutoffPolicy::fixed;
    double convergence_tol = 1e-6;
    std::size_t max_photon = 10;
    std::size_t max_phonon = 24;
    double evolve_rtol = 1e-8;
};

struct DerivationInput {
    DerivationParams params;
    double probe_delta = 0.0;
};

struct SweepConfig {
    SystemParams base = figure_params(0.0);
    std::optional<double> base_delta_over_G;  // overrides base.Delta when set
    std::optional<DerivationInput> derivation; // maps bare parameters onto G, Delta, Delta_m
    Variable variable = Variable::Delta;
    double min = -3.0;
    double max = 3.0;
    std::size_t points = 241;
    DetuningRule constraint = DetuningRule::half_delta;
    std::vector<std::string> outputs;
    SolverSettings solver;
    std::size_t max_pair = 4;

    // Base parameters after the derivation map, Delta_over_G and the
    // detuning rule are applied.
    SystemParams resolved_base() const {
        SystemParams p = base;
        if (derivation) {
            ProbeSettings probe;
            probe.delta = derivation->probe_delta;
            probe.epsilon = base.epsilon;
            probe.gamma_m = base.gamma_m;
            probe.n_th = base.n_th;
            probe.cutoff_photon = base.cutoff_photon;
            probe.cutoff_phonon = base.cutoff_phonon;
            p = map_to_system(derivation->params, probe);
        }
        if (base_delta_over_G) p.Delta = *base_delta_over_G * p.G;
        if (constraint == DetuningRule::half_delta) p.Delta_m = p.Delta / 2.0;
        return p;
    }

    // Sweep grid in declared units.
    std::vector<double> grid() const {
        std::vector<double> g(points);
        for (std::size_t i = 0; i < points; ++i) {
            g[i] = min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
        }
        g.back() = max;
        return g;
    }

    // Parameters of one sweep point (Delta or n_th sweeps).
    SystemParams point_params(double value) const {
        SystemParams p = resolved_base();
        switch (variable) {
        case Variable::Delta:
            p.Delta = value * p.G;
            if (constraint == DetuningRule::half_delta) p.Delta_m = p.Delta / 2.0;
            break;
        case Variable::n_th: p.n_th = value; break;
        case Variable::tau: break;
        }
        return p;
    }

    bool wants(std::string_view output) const {
        return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
    }
};

inline const std::vector<std::string>& steady_outputs() {
    static const std::vector<std::string> names = {"T21", "T12", "isolation_db", "g2_21_zero",
                                                   "g2_12_zero", "n_L", "n_R"};
    return names;
}

inline const std::vector<std::string>& delay_outputs() {
    static const std::vector<std::string> names = {"g2_21_tau", "g2_12_tau"};
    return names;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = value.data() + value.size();
    if (!value.empty() && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        throw Error(ErrorCode::config_parse, "key '" + key + "': '" + value + "' is not a finite number");
    }
    return out;
}

inline std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw Error(ErrorCode::config_parse, "key '" + key + "': '" + value + "' is not a count");
    }
    return out;
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace detail

// Applies one `key = value` assignment.
inline void apply_setting(SweepConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_count;
    using detail::parse_double;
    auto derivation = [&]() -> DerivationInput& {
        if (!c.derivation) c.derivation = DerivationInput{};
        return *c.derivation;
    };

    if (key == "base.Delta") { c.base.Delta = parse_double(key, value); c.base_delta_over_G.reset(); }
    else if (key == "base.Delta_over_G") c.base_delta_over_G = parse_double(key, value);
    else if (key == "base.Delta_m") c.base.Delta_m = parse_double(key, value);
    else if (key == "base.G") c.base.G = parse_double(key, value);
    else if (key == "base.epsilon") c.base.epsilon = parse_double(key, value);
    else if (key == "base.gamma_c") c.base.gamma_c = parse_double(key, value);
    else if (key == "base.gamma_m") c.base.gamma_m = parse_double(key, value);
    else if (key == "base.n_th") c.base.n_th = parse_double(key, value);
    else if (key == "base.cutoff_photon") c.base.cutoff_photon = parse_count(key, value);
    else if (key == "base.cutoff_phonon") c.base.cutoff_phonon = parse_count(key, value);
    else if (key == "derivation.omega0") derivation().params.omega0 = parse_double(key, value);
    else if (key == "derivation.J") derivation().params.J = parse_double(key, value);
    else if (key == "derivation.g0") derivation().params.g0 = parse_double(key, value);
    else if (key == "derivation.omega_m") derivation().params.omega_m = parse_double(key, value);
    else if (key == "derivation.Omega") derivation().params.Omega = parse_double(key, value);
    else if (key == "derivation.Delta_a") derivation().params.Delta_a = parse_double(key, value);
    else if (key == "derivation.gamma_c") derivation().params.gamma_c = parse_double(key, value);
    else if (key == "derivation.q_probe_range") derivation().params.q_probe_range = parse_double(key, value);
    else if (key == "derivation.probe_delta") derivation().probe_delta = parse_double(key, value);
    else if (key == "sweep.variable") {
        if (value == "Delta") c.variable = Variable::Delta;
        else if (value == "n_th") c.variable = Variable::n_th;
        else if (value == "tau") c.variable = Variable::tau;
        else throw Error(ErrorCode::config_parse, "sweep.variable must be Delta, n_th or tau");
    }
    else if (key == "sweep.min") c.min = parse_double(key, value);
    else if (key == "sweep.max") c.max = parse_double(key, value);
    else if (key == "sweep.points") c.points = parse_count(key, value);
    else if (key == "constraint.Delta_m") {
        if (value == "Delta/2") c.constraint = DetuningRule::half_delta;
        else if (value == "free") c.constraint = DetuningRule::free;
        else throw Error(ErrorCode::config_parse, "constraint.Delta_m must be Delta/2 or free");
    }
    else if (key == "outputs") c.outputs = detail::split_list(value);
    else if (key == "solver.steady_residual") c.solver.steady_residual = parse_double(key, value);
    else if (key == "solver.cutoff_policy") {
        if (value == "fixed") c.solver.cutoff_policy = CutoffPolicy::fixed;
        else if (value == "converge") c.solver.cutoff_policy = CutoffPolicy::converge;
        else throw Error(ErrorCode::config_parse, "solver.cutoff_policy must be fixed or converge");
    }
    else if (key == "solver.convergence_tol") c.solver.convergence_tol = parse_double(key, value);
    else if (key == "solver.max_photon") c.solver.max_photon = parse_count(key, value);
    else if (key == "solver.max_phonon") c.solver.max_phonon = parse_count(key, value);
    else if (key == "solver.evolve_rtol") c.solver.evolve_rtol = parse_double(key, value);
    else if (key == "predict.max_pair") c.max_pair = parse_count(key, value);
    else throw Error(ErrorCode::config_parse, "unknown key '" + key + "'");
}

// Parses `key=value` (used for --override).
inline void apply_override(SweepConfig& c, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw Error(ErrorCode::config_parse, "override '" + std::string(assignment) + "' lacks '='");
    }
    apply_setting(c, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

inline void validate(SweepConfig& c) {
    if (c.points < 2) throw Error(ErrorCode::configuration, "sweep.points must be at least 2");
    if (!(c.min < c.max)) throw Error(ErrorCode::configuration, "sweep.min must be below sweep.max");
    if (c.variable == Variable::tau && c.min < 0.0) {
        throw Error(ErrorCode::configuration, "tau sweeps start at a non-negative delay");
    }
    if (c.variable == Variable::n_th && c.min < 0.0) {
        throw Error(ErrorCode::configuration, "n_th must be non-negative");
    }
    const auto& allowed = c.variable == Variable::tau ? delay_outputs() : steady_outputs();
    if (c.outputs.empty()) {
        c.outputs = c.variable == Variable::tau ? std::vector<std::string>{"g2_21_tau"} : allowed;
    }
    for (const auto& o : c.outputs) {
        if (std::find(allowed.begin(), allowed.end(), o) == allowed.end()) {
            throw Error(ErrorCode::configuration, "output '" + o + "' is not available for a " +
                                                      to_string(c.variable) + " sweep");
        }
    }
    if (c.derivation) {
        // Surfaces degenerate tunneling and a singular pump as configuration errors.
        try {
            (void)c.resolved_base();
        } catch (const Error& e) {
            throw Error(ErrorCode::configuration, e.what());
        }
    }
    try {
        c.resolved_base().validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::configuration, e.what());
    }
    if (c.base.cutoff_phonon < 3) throw Error(ErrorCode::configuration, "base.cutoff_phonon must be at least 3");
}

inline SweepConfig parse_config(std::string_view text) {
    SweepConfig c;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::config_parse, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw Error(ErrorCode::config_parse, "line " + std::to_string(line_no) + ": empty key or value");
        }
        apply_setting(c, key, value);
    }
    return c;
}

inline SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config_parse, "cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

// Canonical text: every setting, fixed order. parse_config(to_text(c)) == c.
inline std::string to_text(const SweepConfig& c) {
    using detail::format_double;
    std::ostringstream out;
    auto line = [&](const std::string& k, const std::string& v) { out << k << " = " << v << '\n'; };
    line("base.Delta", format_double(c.base.Delta));
    if (c.base_delta_over_G) line("base.Delta_over_G", format_double(*c.base_delta_over_G));
    line("base.Delta_m", format_double(c.base.Delta_m));
    line("base.G", format_double(c.base.G));
    line("base.epsilon", format_double(c.base.epsilon));
    line("base.gamma_c", format_double(c.base.gamma_c));
    line("base.gamma_m", format_double(c.base.gamma_m));
    line("base.n_th", format_double(c.base.n_th));
    line("base.cutoff_photon", std::to_string(c.base.cutoff_photon));
    line("base.cutoff_phonon", std::to_string(c.base.cutoff_phonon));
    if (c.derivation) {
        const auto& d = c.derivation->params;
        line("derivation.omega0", format_double(d.omega0));
        line("derivation.J", format_double(d.J));
        line("derivation.g0", format_double(d.g0));
        line("derivation.omega_m", format_double(d.omega_m));
        line("derivation.Omega", format_double(d.Omega));
        line("derivation.Delta_a", format_double(d.Delta_a));
        line("derivation.gamma_c", format_double(d.gamma_c));
        line("derivation.q_probe_range", format_double(d.q_probe_range));
        line("derivation.probe_delta", format_double(c.derivation->probe_delta));
    }
    line("sweep.variable", to_string(c.variable));
    line("sweep.min", format_double(c.min));
    line("sweep.max", format_double(c.max));
    line("sweep.points", std::to_string(c.points));
    line("constraint.Delta_m", c.constraint == DetuningRule::half_delta ? "Delta/2" : "free");
    std::string outs;
    for (const auto& o : c.outputs) outs += (outs.empty() ? "" : ",") + o;
    if (!outs.empty()) line("outputs", outs);
    line("solver.steady_residual", format_double(c.solver.steady_residual));
    line("solver.cutoff_policy", c.solver.cutoff_policy == CutoffPolicy::fixed ? "fixed" : "converge");
    line("solver.convergence_tol", format_double(c.solver.convergence_tol));
    line("solver.max_photon", std::to_string(c.solver.max_photon));
    line("solver.max_phonon", std::to_string(c.solver.max_phonon));
    line("solver.evolve_rtol", format_double(c.solver.evolve_rtol));
    line("predict.max_pair", std::to_string(c.max_pair));
    return out.str();
}

// 64-bit FNV-1a of the canonical text, as 16 hex digits.
inline std::string config_hash(const SweepConfig& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : to_text(c)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    static constexpr char digits[] = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

// Delay grid values are in units of 2 pi / gamma_c.
inline double delay_in_inverse_gamma(double tau_units, double gamma_c) {
    return tau_units * 2.0 * std::numbers::pi / gamma_c;
}

} // namespace quadblock::sweep

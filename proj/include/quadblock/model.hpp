// model.hpp: parameters of the pumped quadratic optomechanical system, the
// bare-to-effective parameter maps, and builders for the effective
// Hamiltonian and its dissipation channels.
//
// Effective model (rotating frame of pump and probe, all rates in units of
// gamma_c unless stated otherwise):
//
//   H = Delta a_L^+ a_L + Delta a_R^+ a_R + Delta_m b^+ b
//       + G a_L^+ b^2 + G a_L b^+2 + epsilon (a_p^+ + a_p)
//
// with a_p = a_L for a probe entering port 1 and a_p = a_R for port 2.
// G is real and non-negative: the phase of the pump displacement is absorbed
// into a_L.
//
// The pump frequency omega_L is identified with the drive frequency omega_d
// appearing in Delta_a = omega_a - omega_d and delta = omega_p - omega_d.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quadblock/error.hpp"
#include "quadblock/fock.hpp"

namespace quadblock {

// ---------------------------------------------------------------------------
// Bare model quantities

struct DerivationParams {
    double omega0 = 0.0;     // bare optical frequency
    double J = 0.0;          // inter-resonator tunneling
    double g0 = 0.0;         // linear optomechanical coupling
    double omega_m = 0.0;    // mechanical frequency
    double Omega = 0.0;      // pump amplitude
    double Delta_a = 0.0;    // pump detuning omega_a - omega_d
    double gamma_c = 1.0;    // optical damping, reference unit
    double q_probe_range = 1.0; // max |q| used in eigen-sweeps
};

struct ValidityThresholds {
    double quasi_static_ratio = 10.0; // |J| / omega_m
    double expansion_ratio = 10.0;    // |J| / (g0 max|q|)
    double strong_pump_ratio = 10.0;  // Omega / gamma_c
};

struct ValidityFlags {
    bool quasi_static_ok = false;
    bool expansion_ok = false;
    bool strong_pump_ok = false;

    bool all() const noexcept { return quasi_static_ok && expansion_ok && strong_pump_ok; }
};

inline ValidityFlags validity(const DerivationParams& p, const ValidityThresholds& t = {}) {
    if (!(std::abs(p.J) > 0.0)) {
        throw Error(ErrorCode::degenerate_tunneling, "tunneling amplitude J must be nonzero");
    }
    ValidityFlags flags;
    flags.quasi_static_ok = std::abs(p.J) >= t.quasi_static_ratio * std::abs(p.omega_m);
    flags.expansion_ok = std::abs(p.J) >= t.expansion_ratio * std::abs(p.g0) * std::abs(p.q_probe_range);
    flags.strong_pump_ok = p.Omega >= t.strong_pump_ratio * p.gamma_c;
    return flags;
}

struct NormalModeFrequencies {
    double omega_plus = 0.0;
    double omega_minus = 0.0;
};

// Exact quasi-static eigenfrequencies omega0 +- sqrt(J^2 + (g0 q)^2).
inline NormalModeFrequencies normal_mode_frequencies(const DerivationParams& p, double q) {
    const double split = std::hypot(p.J, p.g0 * q);
    return {p.omega0 + split, p.omega0 - split};
}

// Second-order expansion omega0 +- (J + g0^2 q^2 / (2J)).
inline NormalModeFrequencies normal_mode_frequencies_quadratic(const DerivationParams& p, double q) {
    if (p.J == 0.0) {
        throw Error(ErrorCode::degenerate_tunneling, "tunneling amplitude J must be nonzero");
    }
    const double shift = p.J + p.g0 * p.g0 * q * q / (2.0 * p.J);
    return {p.omega0 + shift, p.omega0 - shift};
}

// |exact - quadratic| for the upper branch (the lower branch mirrors it).
inline double quadratic_expansion_error(const DerivationParams& p, double q) {
    const double split = std::hypot(p.J, p.g0 * q);
    const double shift = p.J + p.g0 * p.g0 * q * q / (2.0 * p.J);
    return std::abs(split - shift);
}

// Normal-mode coefficients: a_{L,+-} = (c1 a_{1,ccw} + c2 a_{2,cw}) with
// (c1, c2) = (J, g0 q +- sqrt(J^2 + (g0 q)^2)) / D_+-.  The same pair
// applies to the a_R modes with cw and ccw exchanged.
struct NormalModeVectors {
    std::pair<double, double> plus;
    std::pair<double, double> minus;
};

inline NormalModeVectors normal_mode_vectors(const DerivationParams& p, double q) {
    if (p.J == 0.0) {
        throw Error(ErrorCode::degenerate_tunneling, "tunneling amplitude J must be nonzero");
    }
    const double gq = p.g0 * q;
    const double root = std::hypot(p.J, gq);
    auto make = [&](double sign) {
        const double c2 = gq + sign * root;
        const double norm = std::hypot(p.J, c2);
        return std::pair<double, double>{p.J / norm, c2 / norm};
    };
    return {make(+1.0), make(-1.0)};
}

inline double quadratic_coupling(double g0, double J) {
    if (J == 0.0) {
        throw Error(ErrorCode::degenerate_tunneling, "tunneling amplitude J must be nonzero");
    }
    return g0 * g0 / (2.0 * J);
}

// Classical pump-mode amplitude alpha_L = -2i Omega / (gamma_c + 2i Delta_a).
// The other classical amplitudes (alpha_R, q_s, p_s) vanish.
inline Complex pump_displacement(double Omega, double gamma_c, double Delta_a) {
    const Complex denom(gamma_c, 2.0 * Delta_a);
    if (denom == Complex(0.0, 0.0)) {
        throw Error(ErrorCode::singular_pump, "gamma_c and Delta_a are both zero");
    }
    return Complex(0.0, -2.0 * Omega) / denom;
}

// G = g alpha_L / 2 after the phase rotation a_L -> e^{i arg} a_L; always real, >= 0.
inline double effective_coupling(double g, Complex alpha_L) { return std::abs(g * alpha_L / 2.0); }

// Unrotated complex coupling g alpha_L / 2.
inline Complex effective_coupling_complex(double g, Complex alpha_L) { return g * alpha_L / 2.0; }

inline double effective_mech_freq(double omega_m, double g, Complex alpha_L) {
    return omega_m + g * std::norm(alpha_L);
}

// Pump amplitude that produces |alpha_L| = 2 G / |g| at the given pump detuning.
inline double pump_amplitude_for_coupling(double G, double g, double gamma_c, double Delta_a) {
    if (g == 0.0) {
        throw Error(ErrorCode::invalid_parameter, "zero quadratic coupling cannot produce G > 0");
    }
    const double alpha = 2.0 * std::abs(G) / std::abs(g);
    return alpha * std::hypot(gamma_c, 2.0 * Delta_a) / 2.0;
}

// ---------------------------------------------------------------------------
// Effective model

struct SystemParams {
    double Delta = 0.0;      // probe detuning Delta_a - delta
    double Delta_m = 0.0;    // mechanical detuning
    double G = 0.0;          // effective coupling, real
    double epsilon = 0.1;    // probe amplitude
    double gamma_c = 1.0;
    double gamma_m = 0.01;
    double n_th = 0.0;
    std::size_t cutoff_photon = 5;
    std::size_t cutoff_phonon = 12;

    void validate() const {
        if (!(gamma_c > 0.0)) throw Error(ErrorCode::invalid_parameter, "gamma_c must be positive");
        if (!(gamma_m >= 0.0)) throw Error(ErrorCode::invalid_parameter, "gamma_m must be non-negative");
        if (!(n_th >= 0.0)) throw Error(ErrorCode::invalid_parameter, "n_th must be non-negative");
        if (!(epsilon >= 0.0)) throw Error(ErrorCode::invalid_parameter, "epsilon must be non-negative");
        if (!std::isfinite(Delta) || !std::isfinite(Delta_m) || !std::isfinite(G)) {
            throw Error(ErrorCode::invalid_parameter, "detunings and coupling must be finite");
        }
        if (cutoff_photon < 2 || cutoff_phonon < 2) {
            throw Error(ErrorCode::invalid_dimension, "cutoffs must be at least 2");
        }
    }

    // Weak-probe regime epsilon <= gamma_c / 4.
    bool weak_probe() const noexcept { return epsilon <= gamma_c / 4.0; }
};

// Parameter set of the blockade figures: Delta_m = Delta/2, G = 3, epsilon = 1/10,
// gamma_m = 1/100, n_th = 0, everything in units of gamma_c = 1.
inline SystemParams figure_params(double Delta, double n_th = 0.0) {
    SystemParams p;
    p.Delta = Delta;
    p.Delta_m = Delta / 2.0;
    p.G = 3.0;
    p.epsilon = 0.1;
    p.gamma_c = 1.0;
    p.gamma_m = 0.01;
    p.n_th = n_th;
    return p;
}

// Applies the Delta_m = Delta/2 constraint.
inline SystemParams with_half_detuning(SystemParams p, double Delta) {
    p.Delta = Delta;
    p.Delta_m = Delta / 2.0;
    return p;
}

struct ProbeSettings {
    double delta = 0.0;   // omega_p - omega_d
    double epsilon = 0.1;
    double gamma_m = 0.01;
    double n_th = 0.0;
    std::size_t cutoff_photon = 5;
    std::size_t cutoff_phonon = 12;
};

// Bare parameters -> effective parameters, in the units of DerivationParams.
inline SystemParams map_to_system(const DerivationParams& d, const ProbeSettings& probe) {
    const double g = quadratic_coupling(d.g0, d.J);
    const Complex alpha = pump_displacement(d.Omega, d.gamma_c, d.Delta_a);
    SystemParams p;
    p.G = effective_coupling(g, alpha);
    p.Delta = d.Delta_a - probe.delta;
    p.Delta_m = effective_mech_freq(d.omega_m, g, alpha) - probe.delta / 2.0;
    p.epsilon = probe.epsilon;
    p.gamma_c = d.gamma_c;
    p.gamma_m = probe.gamma_m;
    p.n_th = probe.n_th;
    p.cutoff_photon = probe.cutoff_photon;
    p.cutoff_phonon = probe.cutoff_phonon;
    return p;
}

enum class ProbePort { one = 1, two = 2 };

// `full` carries (a_L, a_R, b); the factorized layouts drop the modes that
// decouple exactly for the given probe port: (a_L, b) for port 1 and (a_R)
// for port 2.
enum class Layout { full, port1_factorized, port2_factorized };

enum class Mode { L, R, b };

inline Layout default_layout(ProbePort port) {
    return port == ProbePort::one ? Layout::port1_factorized : Layout::port2_factorized;
}

struct ModeMap {
    Layout layout;
    HilbertSpec space;
    std::optional<std::size_t> a_L;
    std::optional<std::size_t> a_R;
    std::optional<std::size_t> b;

    bool has(Mode m) const noexcept { return index(m).has_value(); }

    std::optional<std::size_t> index(Mode m) const noexcept {
        switch (m) {
        case Mode::L: return a_L;
        case Mode::R: return a_R;
        case Mode::b: return b;
        }
        return std::nullopt;
    }
};

inline ModeMap make_mode_map(Layout layout, const SystemParams& p) {
    switch (layout) {
    case Layout::full:
        return {layout, HilbertSpec({p.cutoff_photon, p.cutoff_photon, p.cutoff_phonon}), 0, 1, 2};
    case Layout::port1_factorized:
        return {layout, HilbertSpec({p.cutoff_photon, p.cutoff_phonon}), 0, std::nullopt, 1};
    case Layout::port2_factorized:
        return {layout, HilbertSpec({p.cutoff_photon}), std::nullopt, 0, std::nullopt};
    }
    throw Error(ErrorCode::configuration, "unknown layout");
}

inline Operator mode_annihilator(const ModeMap& modes, Mode m) {
    const auto idx = modes.index(m);
    if (!idx) {
        throw Error(ErrorCode::index_out_of_range, "mode is not part of this layout");
    }
    return embed(annihilation(modes.space.mode_dims()[*idx]), modes.space, *idx);
}

inline Operator mode_number(const ModeMap& modes, Mode m) {
    const auto idx = modes.index(m);
    if (!idx) {
        throw Error(ErrorCode::index_out_of_range, "mode is not part of this layout");
    }
    return embed(number(modes.space.mode_dims()[*idx]), modes.space, *idx);
}

namespace detail {

inline void require_phonon_cutoff(const ModeMap& modes, const SystemParams& p) {
    if (modes.b && p.cutoff_phonon < 3) {
        throw Error(ErrorCode::configuration,
                    "cutoff_phonon < 3 leaves b^2 without any reachable matrix element");
    }
}

} // namespace detail

inline Operator build_hamiltonian(const SystemParams& p, ProbePort port, const ModeMap& modes) {
    p.validate();
    detail::require_phonon_cutoff(modes, p);
    Operator H(modes.space, SparseMatrix(static_cast<Index>(modes.space.dimension()),
                                         static_cast<Index>(modes.space.dimension())));
    if (modes.a_L) {
        const Operator a = mode_annihilator(modes, Mode::L);
        H = H + p.Delta * mode_number(modes, Mode::L);
        if (modes.b) {
            const Operator b = mode_annihilator(modes, Mode::b);
            const Operator pair = a.adjoint() * (b * b);
            H = H + p.G * (pair + pair.adjoint());
        }
        if (port == ProbePort::one) H = H + p.epsilon * (a + a.adjoint());
    }
    if (modes.a_R) {
        const Operator a = mode_annihilator(modes, Mode::R);
        H = H + p.Delta * mode_number(modes, Mode::R);
        if (port == ProbePort::two) H = H + p.epsilon * (a + a.adjoint());
    }
    if (modes.b) {
        H = H + p.Delta_m * mode_number(modes, Mode::b);
    }
    return H;
}

inline Operator build_hamiltonian(const SystemParams& p, ProbePort port) {
    return build_hamiltonian(p, port, make_mode_map(default_layout(port), p));
}

// Hamiltonian before the rotating-wave approximation and before dropping the
// fluctuation-squared term, in the pump frame (no probe):
//
//   Delta_a (n_L + n_R) + omega_m b^+b + (g/2)(|alpha|^2 + n_L + n_R)(b^+ + b)^2
//   + (g/2)(alpha_L a_L^+ + alpha_L^* a_L)(b^+ + b)^2
//
// Used to budget the error of the effective model, not by the solvers.
struct PreRwaParams {
    double Delta_a = 0.0;
    double omega_m = 0.0;
    double g = 0.0;
    Complex alpha_L{0.0, 0.0};
    bool include_fluctuation_term = true;
};

inline Operator build_pre_rwa_hamiltonian(const PreRwaParams& p, const ModeMap& modes) {
    if (!modes.b || !modes.a_L) {
        throw Error(ErrorCode::configuration, "pre-RWA Hamiltonian needs a_L and b");
    }
    const HilbertSpec& space = modes.space;
    const Operator b = mode_annihilator(modes, Mode::b);
    const Operator x = b + b.adjoint();
    const Operator x2 = x * x;
    const Operator aL = mode_annihilator(modes, Mode::L);
    Operator photons = aL.adjoint() * aL;
    if (modes.a_R) {
        const Operator aR = mode_annihilator(modes, Mode::R);
        photons = photons + aR.adjoint() * aR;
    }
    Operator H = p.Delta_a * photons + p.omega_m * (b.adjoint() * b);
    Operator shift = std::norm(p.alpha_L) * identity(space);
    if (p.include_fluctuation_term) shift = shift + photons;
    H = H + (p.g / 2.0) * (shift * x2);
    const Operator drive = p.alpha_L * aL.adjoint() + std::conj(p.alpha_L) * aL;
    H = H + (p.g / 2.0) * (drive * x2);
    return H;
}

struct Channel {
    Operator op;
    double rate;
    std::string label;
};

// Lindblad channels: gamma_c L[a_L], gamma_c L[a_R], gamma_m (n_th+1) L[b],
// gamma_m n_th L[b^+]; channels for modes absent from the layout are skipped
// and L[b^+] is omitted at n_th = 0.
inline std::vector<Channel> collapse_operators(const SystemParams& p, const ModeMap& modes) {
    p.validate();
    std::vector<Channel> channels;
    if (modes.a_L) channels.push_back({mode_annihilator(modes, Mode::L), p.gamma_c, "a_L"});
    if (modes.a_R) channels.push_back({mode_annihilator(modes, Mode::R), p.gamma_c, "a_R"});
    if (modes.b) {
        const Operator b = mode_annihilator(modes, Mode::b);
        channels.push_back({b, p.gamma_m * (p.n_th + 1.0), "b"});
        if (p.n_th > 0.0) channels.push_back({b.adjoint(), p.gamma_m * p.n_th, "b_dag"});
    }
    return channels;
}

inline std::vector<Channel> collapse_operators(const SystemParams& p) {
    return collapse_operators(p, make_mode_map(Layout::full, p));
}

// hbar / k_B in kelvin seconds.
inline constexpr double hbar_over_kb = 7.638232577577646e-12;

// Bose-Einstein occupation [exp(hbar omega_m / k_B T) - 1]^{-1}.
inline double thermal_occupation(double omega_m, double temperature) {
    if (!(omega_m > 0.0)) {
        throw Error(ErrorCode::invalid_frequency, "mechanical frequency must be positive");
    }
    if (!(temperature >= 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "temperature must be non-negative");
    }
    if (temperature == 0.0) return 0.0;
    const double x = hbar_over_kb * omega_m / temperature;
    return 1.0 / std::expm1(x);
}

} // namespace quadblock

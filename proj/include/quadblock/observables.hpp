// observables.hpp: transmission, isolation and second-order correlations
// evaluated on Lindblad steady states.
//
// Transmission uses T = gamma_c^2 / (4 epsilon^2) <a^+ a>, which follows from
// a_in = epsilon / sqrt(gamma_c/2) and a_out = sqrt(gamma_c/2) a. It gives
// exactly the Lorentzian (gamma_c/2)^2 / ((gamma_c/2)^2 + Delta^2) for the
// linear mode, with unit transmission on resonance.

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "quadblock/error.hpp"
#include "quadblock/fock.hpp"
#include "quadblock/liouvillian.hpp"
#include "quadblock/model.hpp"
#include "quadblock/propagate.hpp"

namespace quadblock {

enum class Direction { d21, d12 };

// Output-port mode for each direction: 1 -> 2 leaves through a_L, 2 -> 1 through a_R.
inline Mode output_mode(Direction dir) { return dir == Direction::d21 ? Mode::L : Mode::R; }

inline ProbePort input_port(Direction dir) {
    return dir == Direction::d21 ? ProbePort::one : ProbePort::two;
}

inline double mean_occupation(const DensityMatrix& rho, const Operator& a) {
    return rho.expectation(a.adjoint() * a).real();
}

inline double transmission(const DensityMatrix& rho_ss, const SystemParams& p, const ModeMap& modes,
                           Direction dir) {
    if (!(p.epsilon > 0.0)) {
        throw Error(ErrorCode::undefined_transmission, "transmission needs a nonzero probe");
    }
    const Operator a = mode_annihilator(modes, output_mode(dir));
    const double n = std::max(0.0, mean_occupation(rho_ss, a));
    return p.gamma_c * p.gamma_c / (4.0 * p.epsilon * p.epsilon) * n;
}

// 10 log10(T21 / T12). Positive values favour 1 -> 2. T12 = 0 gives +inf
// (or NaN when T21 is zero too).
inline double isolation(double T21, double T12) {
    if (T12 == 0.0) {
        return T21 > 0.0 ? std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::quiet_NaN();
    }
    return 10.0 * std::log10(T21 / T12);
}

// <a^+ a^+ a a> / <a^+ a>^2.
inline double g2_zero(const DensityMatrix& rho_ss, const Operator& a) {
    const Operator ad = a.adjoint();
    const double n = rho_ss.expectation(ad * a).real();
    if (!(n > 0.0)) {
        throw Error(ErrorCode::undefined_correlation, "mean occupation is zero");
    }
    const double nn = rho_ss.expectation(ad * ad * a * a).real();
    return std::max(0.0, nn) / (n * n);
}

inline double g2_zero(const DensityMatrix& rho_ss, const ModeMap& modes, Mode m) {
    return g2_zero(rho_ss, mode_annihilator(modes, m));
}

// Quantum regression: g2(tau) = tr(a^+ a e^{L tau}[a rho a^+]) / <a^+ a>^2.
inline std::vector<double> g2_tau(const Superoperator& L, const DensityMatrix& rho_ss, const Operator& a,
                                  std::span<const double> tau_grid, const PropagationOptions& opt = {}) {
    const Operator ad = a.adjoint();
    const Operator n_op = ad * a;
    const double n = rho_ss.expectation(n_op).real();
    if (!(n > 0.0)) {
        throw Error(ErrorCode::undefined_correlation, "mean occupation is zero");
    }
    const Eigen::MatrixXcd A = a.dense();
    const Eigen::MatrixXcd conditioned = A * rho_ss.entries() * A.adjoint();
    const auto evolved = evolve_grid(L, conditioned, tau_grid, opt);
    std::vector<double> out;
    out.reserve(evolved.size());
    for (const auto& x : evolved) out.push_back(trace_product(n_op, x).real() / (n * n));
    return out;
}

// ---------------------------------------------------------------------------
// One-call evaluation of both probe directions

struct TransportRequest {
    bool port1 = true; // T21, g2_21, n_L
    bool port2 = true; // T12, g2_12, n_R
    bool g2 = true;
    Layout port1_layout = Layout::port1_factorized;
    Layout port2_layout = Layout::port2_factorized;
    SteadyStateOptions solver;
};

struct PortSolution {
    double transmission = 0.0;
    std::optional<double> g2_zero; // empty when the occupation vanishes
    double occupation = 0.0;
    Complex mean_field{0.0, 0.0};
    double residual = 0.0;
};

struct TransportResult {
    std::optional<PortSolution> port21;
    std::optional<PortSolution> port12;

    double T21() const { return port21.value().transmission; }
    double T12() const { return port12.value().transmission; }
    double isolation_db() const { return isolation(T21(), T12()); }
    double n_L() const { return port21.value().occupation; }
    double n_R() const { return port12.value().occupation; }
};

struct SolvedSystem {
    ModeMap modes;
    Superoperator liouvillian;
    SteadyState steady;
};

inline SolvedSystem solve_system(const SystemParams& p, ProbePort port, Layout layout,
                                 const SteadyStateOptions& opt = {}) {
    ModeMap modes = make_mode_map(layout, p);
    const Operator H = build_hamiltonian(p, port, modes);
    const auto channels = collapse_operators(p, modes);
    Superoperator L = build_liouvillian(H, channels);
    SteadyState ss = steady_state(L, opt);
    return SolvedSystem{std::move(modes), std::move(L), std::move(ss)};
}

inline PortSolution evaluate_port(const SolvedSystem& s, const SystemParams& p, Direction dir, bool with_g2) {
    PortSolution out;
    const Operator a = mode_annihilator(s.modes, output_mode(dir));
    const DensityMatrix& rho = s.steady.rho;
    out.occupation = std::max(0.0, mean_occupation(rho, a));
    out.mean_field = rho.expectation(a);
    out.transmission = transmission(rho, p, s.modes, dir);
    out.residual = s.steady.relative_residual;
    if (with_g2 && out.occupation > 0.0) out.g2_zero = g2_zero(rho, a);
    return out;
}

inline TransportResult solve_transport(const SystemParams& p, const TransportRequest& req = {}) {
    TransportResult r;
    if (req.port1) {
        const SolvedSystem s = solve_system(p, ProbePort::one, req.port1_layout, req.solver);
        r.port21 = evaluate_port(s, p, Direction::d21, req.g2);
    }
    if (req.port2) {
        const SolvedSystem s = solve_system(p, ProbePort::two, req.port2_layout, req.solver);
        r.port12 = evaluate_port(s, p, Direction::d12, req.g2);
    }
    return r;
}

// Analytic transmission of a linear driven cavity.
inline double lorentzian_transmission(double Delta, double gamma_c) {
    const double hw = gamma_c / 2.0;
    return hw * hw / (hw * hw + Delta * Delta);
}

} // namespace quadblock

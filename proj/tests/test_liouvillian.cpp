#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "quadblock/liouvillian.hpp"
#include "quadblock/observables.hpp"

using namespace quadblock;

namespace {

using Dense = Eigen::MatrixXcd;

// Direct operator form with dense matrices:
// -i(H rho - rho H) + sum r (o rho o^+ - o^+ o rho / 2 - rho o^+ o / 2)
Dense direct_lindblad(const Dense& H, const std::vector<std::pair<Dense, double>>& ch, const Dense& rho) {
    const Complex i(0.0, 1.0);
    Dense out = -i * (H * rho - rho * H);
    for (const auto& [o, r] : ch) {
        const Dense od = o.adjoint();
        out += r * (o * rho * od - 0.5 * (od * o * rho) - 0.5 * (rho * od * o));
    }
    return out;
}

Dense random_dense(Eigen::Index d, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Dense m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = Complex(u(rng), u(rng));
    return m;
}

SystemParams small_params(double Delta, double n_th) {
    SystemParams p = figure_params(Delta, n_th);
    p.cutoff_photon = 3;
    p.cutoff_phonon = 6;
    return p;
}

} // namespace

TEST_CASE("single-channel decay", "[liouvillian]") {
    const HilbertSpec space({2});
    const Operator H(space, SparseMatrix(2, 2));
    const std::vector<Channel> ch{{annihilation(2), 0.7, "a"}};
    const Superoperator L = build_liouvillian(H, ch);
    Dense rho = Dense::Zero(2, 2);
    rho(1, 1) = 1.0;
    const Dense out = L.apply(rho);
    CHECK(std::abs(out(0, 0) - Complex(0.7, 0.0)) < 1e-15);
    CHECK(std::abs(out(1, 1) - Complex(-0.7, 0.0)) < 1e-15);
    CHECK(std::abs(out(0, 1)) == 0.0);
    CHECK(std::abs(out(1, 0)) == 0.0);
}

TEST_CASE("superoperator matches the direct operator form", "[liouvillian][property]") {
    std::mt19937 rng(2018);
    std::uniform_int_distribution<std::size_t> dim(2, 4);
    std::uniform_int_distribution<int> nch(0, 3);
    std::uniform_real_distribution<double> rate(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> dims{dim(rng)};
        if (trial % 2) dims.push_back(dim(rng));
        const HilbertSpec space(dims);
        const auto d = static_cast<Eigen::Index>(space.dimension());

        const Dense h = random_dense(d, rng);
        const Dense Hd = h + h.adjoint();
        const Operator H(space, Hd.sparseView());
        std::vector<Channel> channels;
        std::vector<std::pair<Dense, double>> dense_channels;
        const int count = nch(rng);
        for (int k = 0; k < count; ++k) {
            const Dense o = random_dense(d, rng);
            const double r = rate(rng);
            channels.push_back({Operator(space, o.sparseView()), r, "c"});
            dense_channels.emplace_back(o, r);
        }
        const Superoperator L = build_liouvillian(H, channels);
        const Dense rho = random_dense(d, rng);
        const Dense expected = direct_lindblad(Hd, dense_channels, rho);
        CHECK((L.apply(rho) - expected).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((lindblad_rhs(H, channels, rho) - expected).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(L.trace_functional_defect() < 1e-12);
        CHECK(std::abs(L.apply(rho).trace()) < 1e-12 * (1.0 + rho.norm()));
    }
}

TEST_CASE("assembly errors", "[liouvillian]") {
    const HilbertSpec s2({2}), s3({3});
    const Operator H(s2, SparseMatrix(2, 2));
    try {
        const std::vector<Channel> ch{{annihilation(3), 1.0, "a"}};
        build_liouvillian(H, ch);
        FAIL("expected a space mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::space_mismatch);
    }
    try {
        const std::vector<Channel> ch{{annihilation(2), -0.1, "a"}};
        build_liouvillian(H, ch);
        FAIL("expected a negative-rate error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::negative_rate);
    }
}

TEST_CASE("trace functional annihilates the blockade generator", "[liouvillian]") {
    const SystemParams p = figure_params(std::sqrt(2.0) * 3.0);
    for (ProbePort port : {ProbePort::one, ProbePort::two}) {
        const ModeMap modes = make_mode_map(default_layout(port), p);
        const auto ch = collapse_operators(p, modes);
        const Superoperator L = build_liouvillian(build_hamiltonian(p, port, modes), ch);
        CHECK(L.trace_functional_defect() < 1e-12);
    }
}

TEST_CASE("driven damped cavity", "[liouvillian]") {
    const double eps = 0.1, gc = 1.0;
    const std::size_t dim = 10;
    for (double Delta : {-2.0, -0.3, 0.0, 0.5, 4.0}) {
        const Operator a = annihilation(dim);
        const Operator H = Delta * number(dim) + eps * (a + a.adjoint());
        const std::vector<Channel> ch{{a, gc, "a"}};
        const Superoperator L = build_liouvillian(H, ch);
        const SteadyState ss = steady_state(L);
        CHECK(ss.relative_residual < 1e-10);

        // Coherent steady state alpha = -i eps / (gamma_c/2 + i Delta).
        const Complex alpha = Complex(0.0, -eps) / Complex(gc / 2.0, Delta);
        CHECK(std::abs(ss.rho.expectation(a) - alpha) < 1e-10);
        const double n = eps * eps / (gc * gc / 4.0 + Delta * Delta);
        CHECK(std::abs(ss.rho.expectation(a.adjoint() * a).real() - n) < 1e-10);
    }
}

TEST_CASE("undriven system relaxes to vacuum", "[liouvillian]") {
    SystemParams p = small_params(1.0, 0.0);
    p.epsilon = 0.0;
    for (Layout layout : {Layout::port1_factorized, Layout::full}) {
        const ModeMap modes = make_mode_map(layout, p);
        const Superoperator L = build_liouvillian(build_hamiltonian(p, ProbePort::one, modes),
                                                  collapse_operators(p, modes));
        const SteadyState ss = steady_state(L);
        Dense vac = Dense::Zero(ss.rho.entries().rows(), ss.rho.entries().cols());
        vac(0, 0) = 1.0;
        CHECK((ss.rho.entries() - vac).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("thermal phonon marginal", "[liouvillian]") {
    // Uncoupled phonon (G = 0) so that detailed balance fixes the marginal.
    SystemParams p = figure_params(0.0, 0.5);
    p.G = 0.0;
    p.epsilon = 0.0;
    p.cutoff_photon = 2;
    p.cutoff_phonon = 25;
    const ModeMap modes = make_mode_map(Layout::port1_factorized, p);
    const Superoperator L =
        build_liouvillian(build_hamiltonian(p, ProbePort::one, modes), collapse_operators(p, modes));
    const SteadyState ss = steady_state(L);
    CHECK(std::abs(ss.rho.expectation(mode_number(modes, Mode::b)).real() - p.n_th) < 1e-8);
    const double ratio = p.n_th / (p.n_th + 1.0);
    for (std::size_t m = 0; m < 8; ++m) {
        const double expected = std::pow(ratio, static_cast<double>(m)) / (p.n_th + 1.0);
        const auto k = static_cast<Eigen::Index>(modes.space.index_of({0, m}));
        CHECK(std::abs(ss.rho.entries()(k, k).real() - expected) < 1e-8);
    }
    CHECK(std::abs(ss.rho.expectation(mode_number(modes, Mode::L))) < 1e-12);
}

TEST_CASE("degenerate kernels are reported", "[liouvillian]") {
    // Two undamped, uncoupled levels: every diagonal state is stationary.
    const HilbertSpec space({2});
    const Operator H = 0.5 * number(2);
    const std::vector<Channel> none;
    const Superoperator L = build_liouvillian(H, none);
    try {
        steady_state(L);
        FAIL("expected a degenerate steady state");
    } catch (const DegenerateSteadyStateError& e) {
        CHECK(e.code() == ErrorCode::degenerate_steady_state);
        REQUIRE(e.second_smallest_singular_value().has_value());
        CHECK(*e.second_smallest_singular_value() < 1e-12);
    }

    // Undamped mode coupled to nothing inside a larger space.
    SystemParams p = small_params(1.0, 0.0);
    p.gamma_m = 0.0;
    p.G = 0.0;
    const ModeMap modes = make_mode_map(Layout::port1_factorized, p);
    const Superoperator L2 =
        build_liouvillian(build_hamiltonian(p, ProbePort::one, modes), collapse_operators(p, modes));
    CHECK_THROWS_AS(steady_state(L2), DegenerateSteadyStateError);
}

TEST_CASE("density matrix invariants", "[liouvillian]") {
    const HilbertSpec space({3});
    Dense m = Dense::Zero(3, 3);
    m(0, 0) = 0.5;
    m(1, 1) = 0.5;
    CHECK_NOTHROW(DensityMatrix(space, m));
    Dense bad = m;
    bad(0, 1) = Complex(0.0, 1e-6);
    CHECK_THROWS_AS(DensityMatrix(space, bad), Error);
    bad = m;
    bad(2, 2) = 0.1;
    CHECK_THROWS_AS(DensityMatrix(space, bad), Error);
    bad = m;
    bad(0, 0) = 1.1;
    bad(1, 1) = -0.1;
    try {
        DensityMatrix rho(space, bad);
        FAIL("expected an invalid state");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_state);
    }
    const DensityMatrix one = DensityMatrix::pure(space, 2);
    CHECK(one.expectation(number(3)) == Complex(2.0, 0.0));
}

TEST_CASE("steady-state invariants on random blockade instances", "[liouvillian][property]") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> delta(-3.0, 3.0);
    std::uniform_real_distribution<double> nth(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        SystemParams p = small_params(3.0 * delta(rng), trial % 3 ? nth(rng) : 0.0);
        p.G = 1.0 + std::abs(delta(rng));
        for (ProbePort port : {ProbePort::one, ProbePort::two}) {
            const ModeMap modes = make_mode_map(default_layout(port), p);
            const Superoperator L =
                build_liouvillian(build_hamiltonian(p, port, modes), collapse_operators(p, modes));
            const SteadyState ss = steady_state(L);
            const Dense& rho = ss.rho.entries();
            CHECK(ss.relative_residual < 1e-10);
            CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-10);
            CHECK(ss.rho.min_eigenvalue() >= -1e-8);
        }
    }
}

TEST_CASE("factorized layouts agree with the full three-mode space", "[liouvillian][property]") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> delta(-3.0, 3.0);
    for (int trial = 0; trial < 4; ++trial) {
        SystemParams p = small_params(3.0 * delta(rng), trial == 3 ? 0.4 : 0.0);
        TransportRequest fact;
        TransportRequest full;
        full.port1_layout = Layout::full;
        full.port2_layout = Layout::full;
        const TransportResult a = solve_transport(p, fact);
        const TransportResult b = solve_transport(p, full);
        CHECK(std::abs(a.T21() - b.T21()) < 1e-8);
        CHECK(std::abs(a.T12() - b.T12()) < 1e-8);
        CHECK(std::abs(a.n_L() - b.n_L()) < 1e-8);
        CHECK(std::abs(a.n_R() - b.n_R()) < 1e-8);
        CHECK(std::abs(*a.port21->g2_zero - *b.port21->g2_zero) < 1e-8);
        CHECK(std::abs(*a.port12->g2_zero - *b.port12->g2_zero) < 1e-8);
        CHECK(std::abs(a.port21->mean_field - b.port21->mean_field) < 1e-8);
    }
}

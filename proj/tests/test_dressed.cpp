#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "quadblock/dressed.hpp"
#include "quadblock/model.hpp"

using namespace quadblock;

namespace {

std::vector<double> sorted(const Eigen::VectorXd& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    std::sort(out.begin(), out.end());
    return out;
}

void check_values(const std::vector<double>& got, const std::vector<double>& want, double tol) {
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - want[k]) < tol);
}

} // namespace

TEST_CASE("low manifolds", "[dressed]") {
    const double r2 = std::sqrt(2.0), r6 = std::sqrt(6.0), r3 = std::sqrt(3.0);

    const Manifold m2 = manifold(2);
    CHECK(m2.basis == std::vector<FockPair>{{1, 0}, {0, 2}});
    CHECK(std::abs(m2.matrix(0, 1) - r2) < 1e-15);
    check_values(sorted(m2.eigenvalues()), {-r2, r2}, 1e-12);

    const Manifold m3 = manifold(3);
    CHECK(m3.basis == std::vector<FockPair>{{1, 1}, {0, 3}});
    CHECK(std::abs(m3.matrix(0, 1) - r6) < 1e-15);
    check_values(sorted(m3.eigenvalues()), {-r6, r6}, 1e-12);

    const Manifold m4 = manifold(4);
    CHECK(m4.basis == std::vector<FockPair>{{2, 0}, {1, 2}, {0, 4}});
    CHECK(std::abs(m4.matrix(0, 1) - 2.0) < 1e-15);
    CHECK(std::abs(m4.matrix(1, 2) - 2.0 * r3) < 1e-15);
    CHECK(m4.matrix(0, 2) == 0.0);
    check_values(sorted(m4.eigenvalues()), {-4.0, 0.0, 4.0}, 1e-12);

    CHECK(manifold(0).basis == std::vector<FockPair>{{0, 0}});
    CHECK(manifold(1).basis == std::vector<FockPair>{{0, 1}});
    CHECK(manifold(1).matrix(0, 0) == 0.0);

    const Manifold cut = manifold(4, 2, std::nullopt);
    CHECK(cut.basis == std::vector<FockPair>{{1, 2}, {0, 4}});
    CHECK(manifold(4, std::nullopt, 4).basis == std::vector<FockPair>{{2, 0}, {1, 2}});
}

TEST_CASE("manifolds match sector-by-sector diagonalization", "[dressed][property]") {
    // Full effective Hamiltonian at eps = 0 with Delta_m = Delta/2: sector P has
    // bare energy Delta P / 2 plus G times the manifold spectrum.
    SystemParams p = figure_params(0.37);
    p.epsilon = 0.0;
    p.cutoff_photon = 6;
    p.cutoff_phonon = 10;
    const ModeMap modes = make_mode_map(Layout::port1_factorized, p);
    const Eigen::MatrixXcd H = build_hamiltonian(p, ProbePort::one, modes).dense();

    for (std::size_t pair = 0; pair <= 8; ++pair) {
        std::vector<Eigen::Index> idx;
        for (std::size_t k = 0; k < modes.space.dimension(); ++k) {
            const auto occ = modes.space.occupations_of(k);
            if (2 * occ[0] + occ[1] == pair) idx.push_back(static_cast<Eigen::Index>(k));
        }
        const auto n = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXcd block(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) block(r, c) = H(idx[r], idx[c]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(block, Eigen::EigenvaluesOnly);
        std::vector<double> brute;
        for (Eigen::Index k = 0; k < n; ++k) brute.push_back((eig.eigenvalues()(k) - p.Delta * pair / 2.0) / p.G);
        std::sort(brute.begin(), brute.end());

        const Manifold mf = manifold(pair, p.cutoff_photon, p.cutoff_phonon);
        CHECK(mf.basis.size() == idx.size());
        for (const FockPair& s : mf.basis) CHECK(2 * s.photons + s.phonons == pair);
        check_values(sorted(mf.eigenvalues()), brute, 1e-12);
    }
}

TEST_CASE("manifold spectra are symmetric", "[dressed][property]") {
    for (std::size_t pair = 0; pair <= 30; ++pair) {
        const auto ev = sorted(manifold(pair).eigenvalues());
        for (std::size_t k = 0; k < ev.size(); ++k) CHECK(std::abs(ev[k] + ev[ev.size() - 1 - k]) < 1e-10);
    }
}

TEST_CASE("resonance detunings", "[dressed]") {
    const double r2 = std::sqrt(2.0), r6 = std::sqrt(6.0);
    const auto res = resonance_detunings(4);
    REQUIRE(res.size() == 3);
    CHECK(res[0].pair_number == 2);
    CHECK(res[0].photon_order == 1);
    check_values(res[0].delta_over_G, {-r2, r2}, 1e-12);
    CHECK(res[1].photon_order == 1);
    check_values(res[1].delta_over_G, {-r6, r6}, 1e-12);
    CHECK(res[2].photon_order == 2);
    check_values(res[2].delta_over_G, {-2.0, 0.0, 2.0}, 1e-12);

    const auto set = prediction_set(res);
    check_values(set, {-r6, -2.0, -r2, 0.0, r2, 2.0, r6}, 1e-12);
    CHECK(set[3] == 0.0);

    const auto [value, dist] = nearest_prediction(set, 1.425);
    CHECK(value == Catch::Approx(r2));
    CHECK(dist < 0.05);

    CHECK_THROWS_AS(resonance_detunings(1), Error);
}

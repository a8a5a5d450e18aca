#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "quadblock/fock.hpp"

using namespace quadblock;

namespace {

// Independent dense Kronecker product, written out index by index.
Eigen::MatrixXcd dense_kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            for (Eigen::Index k = 0; k < B.rows(); ++k)
                for (Eigen::Index l = 0; l < B.cols(); ++l) K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
    return K;
}

Eigen::MatrixXcd dense_lowering(int dim) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

bool exactly_equal(const Operator& a, const Operator& b) {
    return a.space() == b.space() && Eigen::MatrixXcd(a.matrix()) == Eigen::MatrixXcd(b.matrix());
}

Operator random_hermitian(const HilbertSpec& space, std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(space.dimension());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    Eigen::MatrixXcd h = m + m.adjoint();
    return Operator(space, h.sparseView());
}

} // namespace

TEST_CASE("annihilation matrix elements", "[fock]") {
    const Operator a2 = annihilation(2);
    CHECK(a2.element(0, 1) == Complex(1.0, 0.0));
    CHECK(a2.nnz() == 1);

    const Operator a4 = annihilation(4);
    CHECK(a4.element(2, 3).real() == Catch::Approx(1.7320508).epsilon(1e-7));
    CHECK(a4.element(3, 2) == Complex(0.0, 0.0));

    const Operator n4 = number(4);
    for (int k = 0; k < 4; ++k) CHECK(n4.element(k, k) == Complex(k, 0.0));
    CHECK(n4.nnz() == 3);
    const Operator ad_a = creation(4) * annihilation(4);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(ad_a.element(k, k) - n4.element(k, k)) < 1e-15);
}

TEST_CASE("invalid dimensions are rejected", "[fock]") {
    CHECK_THROWS_AS(annihilation(1), Error);
    CHECK_THROWS_AS(quadrature_q(0), Error);
    CHECK_THROWS_AS(HilbertSpec({3, 1}), Error);
    try {
        annihilation(1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_dimension);
    }
}

TEST_CASE("embed places the operator on one tensor factor", "[fock]") {
    const HilbertSpec space({2, 2});
    const Operator a0 = embed(annihilation(2), space, 0);
    // |1,1> has flat index 3 and |0,1> flat index 1 (mode 0 slowest).
    CHECK(space.index_of({1, 1}) == 3);
    CHECK(space.index_of({0, 1}) == 1);
    CHECK(a0.element(1, 3) == Complex(1.0, 0.0));

    const HilbertSpec s33({3, 3});
    const Operator a = embed(annihilation(3), s33, 0);
    const Operator b = embed(annihilation(3), s33, 1);
    CHECK(commutator(a, b).is_zero());
    CHECK(commutator(a.adjoint(), b).is_zero());

    CHECK_THROWS_AS(embed(annihilation(3), s33, 2), Error);
    CHECK_THROWS_AS(embed(annihilation(4), s33, 1), Error);
}

TEST_CASE("photon-phonon pair element against an explicit dense product", "[fock]") {
    const HilbertSpec space({2, 3});
    const Operator a = embed(annihilation(2), space, 0);
    const Operator b = embed(annihilation(3), space, 1);
    const Operator pair = a.adjoint() * (b * b);
    const std::size_t row = space.index_of({1, 0});
    const std::size_t col = space.index_of({0, 2});

    // Oracle: dense Kronecker products built index by index.
    const Eigen::MatrixXcd A = dense_kron(dense_lowering(2), Eigen::MatrixXcd::Identity(3, 3));
    const Eigen::MatrixXcd B = dense_kron(Eigen::MatrixXcd::Identity(2, 2), dense_lowering(3));
    const Eigen::MatrixXcd oracle = A.adjoint() * B * B;
    CHECK(std::abs(oracle(1 * 3 + 0, 0 * 3 + 2) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(pair.element(row, col) - oracle(3, 2)) < 1e-15);
    CHECK(Eigen::MatrixXcd(pair.matrix()).isApprox(oracle, 1e-15));
}

TEST_CASE("quadratures", "[fock]") {
    const Operator q2 = quadrature_q(2);
    CHECK(q2.element(0, 1).real() == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(q2.element(1, 0).real() == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(q2.element(0, 0) == Complex(0.0, 0.0));

    for (std::size_t dim : {2u, 3u, 7u}) {
        const Operator q = quadrature_q(dim);
        CHECK(std::abs((q * q).element(0, 0) - Complex(0.5, 0.0)) < 1e-15);
        CHECK(q.is_hermitian());
        CHECK(quadrature_p(dim).is_hermitian());
    }

    const Operator c = commutator(quadrature_q(20), quadrature_p(20));
    for (std::size_t n = 0; n <= 17; ++n) CHECK(std::abs(c.element(n, n) - Complex(0.0, 1.0)) < 1e-12);
    // Truncation corrupts the top level only.
    CHECK(std::abs(c.element(19, 19) - Complex(0.0, 1.0)) > 1.0);
}

TEST_CASE("operator algebra invariants", "[fock][property]") {
    std::mt19937 rng(20181);
    std::uniform_int_distribution<std::size_t> dim(2, 6);

    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = dim(rng);
        CHECK(exactly_equal(annihilation(d).adjoint(), creation(d)));

        const HilbertSpec space({dim(rng), dim(rng), dim(rng)});
        const std::size_t mode = trial % 3;
        const std::size_t md = space.mode_dims()[mode];
        const Operator op = annihilation(md) + 0.3 * number(md);
        const Operator e = embed(op, space, mode);
        CHECK(e.nnz() == op.nnz() * (space.dimension() / md));
        CHECK(exactly_equal(e.adjoint().adjoint(), e));

        const Operator h1 = random_hermitian(space, rng);
        const Operator h2 = random_hermitian(space, rng);
        std::uniform_real_distribution<double> coef(-3.0, 3.0);
        const Operator combo = coef(rng) * h1 + coef(rng) * h2;
        CHECK(combo.hermiticity_defect() < 1e-13);

        const std::size_t other = (mode + 1) % 3;
        const Operator f = embed(annihilation(space.mode_dims()[other]), space, other);
        CHECK(commutator(e, f).is_zero());
    }
}

TEST_CASE("operators on different spaces do not combine", "[fock]") {
    const Operator a = embed(annihilation(3), HilbertSpec({3, 2}), 0);
    const Operator b = embed(annihilation(3), HilbertSpec({3, 3}), 0);
    try {
        (void)(a + b);
        FAIL("expected a space mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::space_mismatch);
    }
    CHECK_THROWS_AS(a * b, Error);
}

TEST_CASE("basis indexing round-trips", "[fock]") {
    const HilbertSpec space({3, 4, 2});
    for (std::size_t k = 0; k < space.dimension(); ++k) {
        const auto occ = space.occupations_of(k);
        CHECK(space.index_of(occ) == k);
    }
    CHECK_THROWS_AS(space.index_of({3, 0, 0}), Error);
}

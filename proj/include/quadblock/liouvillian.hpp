// liouvillian.hpp: Lindblad superoperator assembly and the steady-state solver
//
// Density matrices are vectorized by column stacking, so that
//   vec(A rho B) = (B^T (x) A) vec(rho).
// Eigen's column-major MatrixXcd storage is exactly this vec().

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include "quadblock/error.hpp"
#include "quadblock/fock.hpp"
#include "quadblock/model.hpp"

namespace quadblock {

// Sparse generator acting on column-stacked density matrices.
class Superoperator {
public:
    Superoperator(HilbertSpec space, SparseMatrix matrix)
        : space_(std::move(space)), matrix_(std::move(matrix)) {
        const auto n = static_cast<Index>(space_.dimension() * space_.dimension());
        if (matrix_.rows() != n || matrix_.cols() != n) {
            throw Error(ErrorCode::dimension_mismatch, "superoperator shape does not match dim^2");
        }
        matrix_.makeCompressed();
    }

    const HilbertSpec& space() const noexcept { return space_; }
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    std::size_t dimension() const noexcept { return space_.dimension(); }

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const {
        const auto d = static_cast<Eigen::Index>(dimension());
        Eigen::VectorXcd out = matrix_ * Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
        return Eigen::Map<Eigen::MatrixXcd>(out.data(), d, d);
    }

    double frobenius_norm() const { return matrix_.norm(); }

    // max_j |sum_i L(i,j) over diagonal rows i| : deviation of tr o L from zero.
    double trace_functional_defect() const {
        const std::size_t d = dimension();
        Eigen::VectorXcd tr = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d * d));
        for (std::size_t k = 0; k < d; ++k) tr(static_cast<Eigen::Index>(k * d + k)) = 1.0;
        const Eigen::RowVectorXcd row = tr.transpose() * matrix_;
        return row.cwiseAbs().maxCoeff();
    }

private:
    HilbertSpec space_;
    SparseMatrix matrix_;
};

// L[rho] = -i[H, rho] + sum_k rate_k (o rho o^+ - (o^+ o rho + rho o^+ o)/2)
inline Superoperator build_liouvillian(const Operator& H, std::span<const Channel> channels) {
    const HilbertSpec& space = H.space();
    const std::size_t d = space.dimension();
    const SparseMatrix id = detail::sparse_identity(d);
    const Complex minus_i(0.0, -1.0);

    SparseMatrix L = minus_i * (SparseMatrix(Eigen::kroneckerProduct(id, H.matrix())) -
                                SparseMatrix(Eigen::kroneckerProduct(SparseMatrix(H.matrix().transpose()), id)));
    for (const Channel& ch : channels) {
        if (!(ch.op.space() == space)) {
            throw Error(ErrorCode::space_mismatch, "channel '" + ch.label + "' lives on another space");
        }
        if (!(ch.rate >= 0.0)) {
            throw Error(ErrorCode::negative_rate, "channel '" + ch.label + "' has a negative rate");
        }
        if (ch.rate == 0.0) continue;
        const SparseMatrix& o = ch.op.matrix();
        const SparseMatrix odo = SparseMatrix(o.adjoint()) * o;
        SparseMatrix term = SparseMatrix(Eigen::kroneckerProduct(SparseMatrix(o.conjugate()), o)) -
                            0.5 * SparseMatrix(Eigen::kroneckerProduct(id, odo)) -
                            0.5 * SparseMatrix(Eigen::kroneckerProduct(SparseMatrix(odo.transpose()), id));
        L += Complex(ch.rate, 0.0) * term;
    }
    L.prune([](Index, Index, const Complex& v) { return v != Complex(0.0, 0.0); });
    return Superoperator(space, std::move(L));
}

// Direct operator-form evaluation of the Lindblad right-hand side; the
// reference the vectorized superoperator is tested against.
inline Eigen::MatrixXcd lindblad_rhs(const Operator& H, std::span<const Channel> channels,
                                     const Eigen::MatrixXcd& rho) {
    const Eigen::MatrixXcd h = H.dense();
    Eigen::MatrixXcd out = Complex(0.0, -1.0) * (h * rho - rho * h);
    for (const Channel& ch : channels) {
        const Eigen::MatrixXcd o = ch.op.dense();
        const Eigen::MatrixXcd odo = o.adjoint() * o;
        out += ch.rate * (o * rho * o.adjoint() - 0.5 * (odo * rho + rho * odo));
    }
    return out;
}

struct DensityTolerances {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double min_eigenvalue = -1e-8;
};

// Hermitian, unit-trace, positive semidefinite state.
class DensityMatrix {
public:
    DensityMatrix(HilbertSpec space, Eigen::MatrixXcd entries, const DensityTolerances& tol = {})
        : space_(std::move(space)), entries_(std::move(entries)) {
        const auto d = static_cast<Eigen::Index>(space_.dimension());
        if (entries_.rows() != d || entries_.cols() != d) {
            throw Error(ErrorCode::dimension_mismatch, "density matrix shape does not match space");
        }
        const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > tol.hermiticity) {
            throw Error(ErrorCode::invalid_state, "density matrix is not Hermitian (defect " +
                                                      std::to_string(herm) + ")");
        }
        const Complex tr = entries_.trace();
        if (std::abs(tr - Complex(1.0, 0.0)) > tol.trace) {
            throw Error(ErrorCode::invalid_state, "density matrix trace deviates from 1");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(entries_, Eigen::EigenvaluesOnly);
        min_eigenvalue_ = eig.eigenvalues().minCoeff();
        if (min_eigenvalue_ < tol.min_eigenvalue) {
            throw Error(ErrorCode::invalid_state, "density matrix has eigenvalue " +
                                                      std::to_string(min_eigenvalue_));
        }
    }

    const HilbertSpec& space() const noexcept { return space_; }
    const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

    Complex expectation(const Operator& op) const {
        if (!(op.space() == space_)) {
            throw Error(ErrorCode::space_mismatch, "observable lives on another space");
        }
        // tr(O rho) = sum_{ij} O_ij rho_ji
        Complex acc(0.0, 0.0);
        const SparseMatrix& m = op.matrix();
        for (int k = 0; k < m.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
                acc += it.value() * entries_(it.col(), it.row());
            }
        }
        return acc;
    }

    static DensityMatrix pure(const HilbertSpec& space, std::size_t basis_index) {
        const auto d = static_cast<Eigen::Index>(space.dimension());
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
        m(static_cast<Eigen::Index>(basis_index), static_cast<Eigen::Index>(basis_index)) = 1.0;
        return DensityMatrix(space, std::move(m));
    }

private:
    HilbertSpec space_;
    Eigen::MatrixXcd entries_;
    double min_eigenvalue_ = 0.0;
};

// tr(O X) for an arbitrary (not necessarily physical) matrix X.
inline Complex trace_product(const Operator& op, const Eigen::MatrixXcd& x) {
    Complex acc(0.0, 0.0);
    const SparseMatrix& m = op.matrix();
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            acc += it.value() * x(it.col(), it.row());
        }
    }
    return acc;
}

struct SteadyStateOptions {
    double residual_tolerance = 1e-10; // relative to ||L||_F
    DensityTolerances state;
    // Above this superoperator dimension the singular-value diagnostic is skipped.
    std::size_t svd_diagnostic_limit = 1600;
    // Condition estimate of the constrained system above which the kernel of
    // L is treated as more than one-dimensional.
    double max_condition = 1e13;
};

struct SteadyState {
    DensityMatrix rho;
    double relative_residual;  // ||L vec(rho)|| / ||L||_F
    double condition_estimate; // ||A||_F ||A^-1 r|| / ||r|| for a fixed probe vector r
};

namespace detail {

inline std::optional<double> second_smallest_singular_value(const Superoperator& L,
                                                            std::size_t limit) {
    const auto n = static_cast<std::size_t>(L.matrix().rows());
    if (n > limit) return std::nullopt;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(L.matrix()));
    const auto& s = svd.singularValues(); // descending
    if (s.size() < 2) return std::nullopt;
    return s(s.size() - 2);
}

} // namespace detail

// Solves L vec(rho) = 0 with tr(rho) = 1 by replacing the row of the (0,0)
// element with the trace functional and factorizing the result.
inline SteadyState steady_state(const Superoperator& L, const SteadyStateOptions& opt = {}) {
    const std::size_t d = L.dimension();
    const auto n = static_cast<Index>(d * d);
    const SparseMatrix& m = L.matrix();

    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(static_cast<std::size_t>(m.nonZeros()) + d);
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            if (it.row() != 0) entries.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (std::size_t k = 0; k < d; ++k) {
        entries.emplace_back(0, static_cast<Index>(k * d + k), Complex(1.0, 0.0));
    }
    SparseMatrix constrained(n, n);
    constrained.setFromTriplets(entries.begin(), entries.end());
    constrained.makeCompressed();

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<Index>> lu;
    lu.analyzePattern(constrained);
    lu.factorize(constrained);
    auto degenerate = [&](const std::string& why) {
        auto sv = detail::second_smallest_singular_value(L, opt.svd_diagnostic_limit);
        std::string msg = why;
        if (sv) msg += "; second-smallest singular value of L = " + std::to_string(*sv);
        return DegenerateSteadyStateError(msg, sv);
    };
    if (lu.info() != Eigen::Success) {
        throw degenerate("trace-constrained Liouvillian is singular: " + lu.lastErrorMessage());
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(0) = 1.0;
    Eigen::VectorXcd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) {
        throw degenerate("sparse solve failed");
    }

    // A near-singular pivot can still yield a plausible x; one extra solve
    // against a fixed dense probe exposes it.
    Eigen::VectorXcd probe(n);
    for (Index k = 0; k < n; ++k) {
        probe(k) = Complex(std::cos(0.7 * k + 0.3), std::sin(1.3 * k + 0.1));
    }
    const Eigen::VectorXcd y = lu.solve(probe);
    const double condition =
        y.allFinite() ? constrained.norm() * y.norm() / probe.norm() : std::numeric_limits<double>::infinity();
    if (!(condition < opt.max_condition)) {
        throw degenerate("trace-constrained Liouvillian is numerically singular (condition estimate " +
                         std::to_string(condition) + ")");
    }

    const double norm_L = L.frobenius_norm();
    const double residual = norm_L > 0.0 ? (m * x).norm() / norm_L : (m * x).norm();
    if (!(residual < opt.residual_tolerance)) {
        throw degenerate("steady-state residual " + std::to_string(residual) + " exceeds tolerance");
    }
    const auto di = static_cast<Eigen::Index>(d);
    Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), di, di);
    const Complex tr = rho.trace();
    if (std::abs(tr) == 0.0) throw degenerate("steady state has zero trace");
    rho /= tr;
    // Validate the raw solve, then remove the round-off anti-Hermitian part.
    try {
        DensityMatrix raw(L.space(), rho, opt.state);
    } catch (const Error& e) {
        throw degenerate(std::string("solution is not a valid state (") + e.what() + ")");
    }
    Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    return SteadyState{DensityMatrix(L.space(), std::move(herm), opt.state), residual, condition};
}

} // namespace quadblock

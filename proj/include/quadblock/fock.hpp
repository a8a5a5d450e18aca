// fock.hpp: sparse bosonic operators on truncated Fock spaces and their tensor products
//
// Tensor ordering: mode 0 is the slowest-varying index (row-major Kronecker),
// so the basis state |n0, n1, ..., nk> sits at
//   n0*(d1*...*dk) + n1*(d2*...*dk) + ... + nk.
// Every module that addresses individual basis states relies on this.

#pragma once

#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "quadblock/error.hpp"

namespace quadblock {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Index = SparseMatrix::StorageIndex;

class HilbertSpec {
public:
    explicit HilbertSpec(std::vector<std::size_t> mode_dims) : mode_dims_(std::move(mode_dims)) {
        if (mode_dims_.empty()) {
            throw Error(ErrorCode::invalid_dimension, "a Hilbert space needs at least one mode");
        }
        for (std::size_t d : mode_dims_) {
            if (d < 2) {
                throw Error(ErrorCode::invalid_dimension,
                            "mode dimension " + std::to_string(d) + " is below 2");
            }
        }
        dimension_ = std::accumulate(mode_dims_.begin(), mode_dims_.end(), std::size_t{1},
                                     std::multiplies<>());
    }

    const std::vector<std::size_t>& mode_dims() const noexcept { return mode_dims_; }
    std::size_t mode_count() const noexcept { return mode_dims_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }

    // Flat index of a product basis state, one occupation per mode.
    std::size_t index_of(std::span<const std::size_t> occupations) const {
        if (occupations.size() != mode_dims_.size()) {
            throw Error(ErrorCode::dimension_mismatch, "occupation list does not match mode count");
        }
        std::size_t flat = 0;
        for (std::size_t k = 0; k < mode_dims_.size(); ++k) {
            if (occupations[k] >= mode_dims_[k]) {
                throw Error(ErrorCode::index_out_of_range, "occupation exceeds mode cutoff");
            }
            flat = flat * mode_dims_[k] + occupations[k];
        }
        return flat;
    }

    std::size_t index_of(std::initializer_list<std::size_t> occupations) const {
        return index_of(std::span<const std::size_t>(occupations.begin(), occupations.size()));
    }

    // Inverse of index_of.
    std::vector<std::size_t> occupations_of(std::size_t flat) const {
        std::vector<std::size_t> occ(mode_dims_.size());
        for (std::size_t k = mode_dims_.size(); k-- > 0;) {
            occ[k] = flat % mode_dims_[k];
            flat /= mode_dims_[k];
        }
        return occ;
    }

    friend bool operator==(const HilbertSpec&, const HilbertSpec&) = default;

private:
    std::vector<std::size_t> mode_dims_;
    std::size_t dimension_ = 0;
};

namespace detail {

// Compressed storage with sorted inner indices and no stored exact zeros.
inline SparseMatrix canonical(SparseMatrix m) {
    m.prune([](Index, Index, const Complex& v) { return v != Complex(0.0, 0.0); });
    Eigen::SparseMatrix<Complex, Eigen::RowMajor> row_major = m;
    SparseMatrix sorted = row_major;
    sorted.makeCompressed();
    return sorted;
}

inline SparseMatrix sparse_identity(std::size_t dim) {
    SparseMatrix id(static_cast<Index>(dim), static_cast<Index>(dim));
    id.setIdentity();
    return id;
}

} // namespace detail

// Immutable sparse operator tied to the Hilbert space it acts on.
class Operator {
public:
    Operator(HilbertSpec space, SparseMatrix matrix)
        : space_(std::move(space)), matrix_(detail::canonical(std::move(matrix))) {
        const auto dim = static_cast<Index>(space_.dimension());
        if (matrix_.rows() != dim || matrix_.cols() != dim) {
            throw Error(ErrorCode::dimension_mismatch,
                        "matrix shape does not match the Hilbert space dimension");
        }
    }

    const HilbertSpec& space() const noexcept { return space_; }
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    std::size_t dimension() const noexcept { return space_.dimension(); }
    std::size_t nnz() const noexcept { return static_cast<std::size_t>(matrix_.nonZeros()); }

    Complex element(std::size_t row, std::size_t col) const {
        return matrix_.coeff(static_cast<Index>(row), static_cast<Index>(col));
    }

    Operator adjoint() const { return Operator(space_, SparseMatrix(matrix_.adjoint())); }

    bool is_zero() const noexcept { return matrix_.nonZeros() == 0; }

    // Largest entrywise |A - A^dagger|.
    double hermiticity_defect() const {
        const SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
        double worst = 0.0;
        for (int k = 0; k < diff.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
                worst = std::max(worst, std::abs(it.value()));
            }
        }
        return worst;
    }

    bool is_hermitian(double tol = 0.0) const { return hermiticity_defect() <= tol; }

    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }

    friend Operator operator+(const Operator& a, const Operator& b) {
        require_same_space(a, b);
        return Operator(a.space_, a.matrix_ + b.matrix_);
    }
    friend Operator operator-(const Operator& a, const Operator& b) {
        require_same_space(a, b);
        return Operator(a.space_, a.matrix_ - b.matrix_);
    }
    friend Operator operator*(const Operator& a, const Operator& b) {
        require_same_space(a, b);
        return Operator(a.space_, SparseMatrix(a.matrix_ * b.matrix_));
    }
    friend Operator operator*(Complex s, const Operator& a) {
        return Operator(a.space_, SparseMatrix(s * a.matrix_));
    }
    friend Operator operator*(double s, const Operator& a) { return Complex(s, 0.0) * a; }

private:
    static void require_same_space(const Operator& a, const Operator& b) {
        if (!(a.space_ == b.space_)) {
            throw Error(ErrorCode::space_mismatch, "operators live on different Hilbert spaces");
        }
    }

    HilbertSpec space_;
    SparseMatrix matrix_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline HilbertSpec single_mode_space(std::size_t dim) { return HilbertSpec({dim}); }

inline Operator identity(const HilbertSpec& space) {
    return Operator(space, detail::sparse_identity(space.dimension()));
}

// Lowering operator: <n-1|a|n> = sqrt(n).
inline Operator annihilation(std::size_t dim) {
    HilbertSpec space = single_mode_space(dim);
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(dim - 1);
    for (std::size_t n = 1; n < dim; ++n) {
        entries.emplace_back(static_cast<Index>(n - 1), static_cast<Index>(n),
                             Complex(std::sqrt(static_cast<double>(n)), 0.0));
    }
    SparseMatrix m(static_cast<Index>(dim), static_cast<Index>(dim));
    m.setFromTriplets(entries.begin(), entries.end());
    return Operator(std::move(space), std::move(m));
}

inline Operator creation(std::size_t dim) { return annihilation(dim).adjoint(); }

// Exact diagonal n; equals creation(dim) * annihilation(dim) up to rounding.
inline Operator number(std::size_t dim) {
    HilbertSpec space = single_mode_space(dim);
    std::vector<Eigen::Triplet<Complex>> entries;
    for (std::size_t n = 1; n < dim; ++n) {
        entries.emplace_back(static_cast<Index>(n), static_cast<Index>(n), Complex(static_cast<double>(n), 0.0));
    }
    SparseMatrix m(static_cast<Index>(dim), static_cast<Index>(dim));
    m.setFromTriplets(entries.begin(), entries.end());
    return Operator(std::move(space), std::move(m));
}

// q = (b^dagger + b)/sqrt(2)
inline Operator quadrature_q(std::size_t dim) {
    const Operator b = annihilation(dim);
    return (1.0 / std::sqrt(2.0)) * (b.adjoint() + b);
}

// p = i(b^dagger - b)/sqrt(2)
inline Operator quadrature_p(std::size_t dim) {
    const Operator b = annihilation(dim);
    return Complex(0.0, 1.0 / std::sqrt(2.0)) * (b.adjoint() - b);
}

// Places a single-mode operator on factor `mode_index`, identity elsewhere.
inline Operator embed(const Operator& op, const HilbertSpec& space, std::size_t mode_index) {
    if (mode_index >= space.mode_count()) {
        throw Error(ErrorCode::index_out_of_range,
                    "mode index " + std::to_string(mode_index) + " out of range");
    }
    if (op.space().mode_count() != 1 || op.dimension() != space.mode_dims()[mode_index]) {
        throw Error(ErrorCode::dimension_mismatch,
                    "single-mode operator dimension does not match the target mode");
    }
    const auto& dims = space.mode_dims();
    const std::size_t before =
        std::accumulate(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(mode_index),
                        std::size_t{1}, std::multiplies<>());
    const std::size_t after =
        std::accumulate(dims.begin() + static_cast<std::ptrdiff_t>(mode_index) + 1, dims.end(),
                        std::size_t{1}, std::multiplies<>());
    SparseMatrix inner = Eigen::kroneckerProduct(op.matrix(), detail::sparse_identity(after));
    SparseMatrix full = Eigen::kroneckerProduct(detail::sparse_identity(before), inner);
    return Operator(space, std::move(full));
}

} // namespace quadblock

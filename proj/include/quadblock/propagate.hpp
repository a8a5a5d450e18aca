// propagate.hpp: time evolution rho(t) = exp(L t) rho(0) under a Liouvillian
//
// Default route: adaptive Krylov (Arnoldi) exponential with local error
// control, stepping exactly onto every requested output time. The dense
// scaling-and-squaring exponential is available for small spaces and serves
// as a reference.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "quadblock/error.hpp"
#include "quadblock/liouvillian.hpp"

namespace quadblock {

struct PropagationOptions {
    double rtol = 1e-8;            // target error relative to ||rho(0)|| over the whole span
    int krylov_dim = 30;
    int max_rejections = 60;       // per step
    std::size_t max_steps = 200000;
};

namespace detail {

// Rounds up to two significant digits, as in Expokit.
inline double round_step(double h) {
    if (!(h > 0.0)) return h;
    const double s = std::pow(10.0, std::floor(std::log10(h)) - 1.0);
    return std::ceil(h / s) * s;
}

inline double inf_norm(const SparseMatrix& A) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) rows(it.row()) += std::abs(it.value());
    }
    return rows.size() ? rows.maxCoeff() : 0.0;
}

// Advances w by exp(A t) in place with Expokit-style step control.
// `tol` bounds the local error per unit time.
class KrylovStepper {
public:
    KrylovStepper(const SparseMatrix& A, const PropagationOptions& opt)
        : A_(A), opt_(opt), anorm_(inf_norm(A)) {}

    void advance(Eigen::VectorXcd& w, double t, double tol) {
        if (t <= 0.0) return;
        const Eigen::Index n = w.size();
        double beta = w.norm();
        if (beta == 0.0 || anorm_ == 0.0) return;

        const int m = static_cast<int>(std::min<Eigen::Index>(opt_.krylov_dim, n));
        const double btol = 1e-14 * anorm_;
        constexpr double gamma = 0.9;
        constexpr double delta = 1.2;
        double xm = 1.0 / m;

        if (h_next_ <= 0.0) {
            const double fact =
                std::pow((m + 1) / std::numbers::e, m + 1) * std::sqrt(2.0 * std::numbers::pi * (m + 1));
            h_next_ = round_step((1.0 / anorm_) * std::pow(fact * tol / (4.0 * beta * anorm_), xm));
        }

        Eigen::MatrixXcd V(n, m + 1);
        double t_now = 0.0;
        std::size_t steps = 0;
        while (t_now < t) {
            if (++steps > opt_.max_steps) {
                throw IntegrationError("Krylov propagation exceeded the step budget", err_total_);
            }
            double h = std::min(t - t_now, h_next_);
            Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 2, m + 2);
            V.col(0) = w / beta;
            int mb = m;
            int k1 = 2;
            double avnorm = 0.0;
            for (int j = 0; j < m; ++j) {
                Eigen::VectorXcd p = A_ * V.col(j);
                for (int i = 0; i <= j; ++i) {
                    const Complex hij = V.col(i).dot(p);
                    H(i, j) = hij;
                    p -= hij * V.col(i);
                }
                const double s = p.norm();
                if (s < btol) {
                    k1 = 0;
                    mb = j + 1;
                    h = t - t_now;
                    break;
                }
                H(j + 1, j) = s;
                V.col(j + 1) = p / s;
            }
            if (k1 != 0) {
                H(m + 1, m) = 1.0;
                avnorm = (A_ * V.col(m)).norm();
            }

            double err_loc = 0.0;
            Eigen::MatrixXcd F;
            int rejections = 0;
            while (true) {
                const int mx = mb + k1;
                F = (h * H.topLeftCorner(mx, mx)).exp();
                if (k1 == 0) {
                    err_loc = btol;
                    break;
                }
                const double phi1 = std::abs(beta * F(m, 0));
                const double phi2 = std::abs(beta * F(m + 1, 0) * avnorm);
                if (phi1 > 10.0 * phi2) {
                    err_loc = phi2;
                    xm = 1.0 / m;
                } else if (phi1 > phi2) {
                    err_loc = phi1 * phi2 / (phi1 - phi2);
                    xm = 1.0 / m;
                } else {
                    err_loc = phi1;
                    xm = 1.0 / (m - 1);
                }
                if (err_loc <= delta * h * tol) break;
                if (++rejections > opt_.max_rejections) {
                    throw IntegrationError("Krylov step rejected too often; achieved local error " +
                                               std::to_string(err_loc),
                                           err_loc);
                }
                h = round_step(gamma * h * std::pow(h * tol / err_loc, xm));
            }
            const int mx = mb + std::max(0, k1 - 1);
            w = V.leftCols(mx) * (beta * F.col(0).head(mx));
            beta = w.norm();
            err_total_ += err_loc;
            t_now += h;
            if (k1 != 0) {
                const double grow = gamma * h * std::pow(h * tol / std::max(err_loc, 1e-300), xm);
                h_next_ = round_step(std::min(grow, 10.0 * h));
            }
            if (beta == 0.0) return;
        }
    }

    double accumulated_error() const noexcept { return err_total_; }

private:
    const SparseMatrix& A_;
    PropagationOptions opt_;
    double anorm_;
    double h_next_ = 0.0;
    double err_total_ = 0.0;
};

inline Eigen::VectorXcd vec(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

inline Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index d) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

inline void require_shape(const Superoperator& L, const Eigen::MatrixXcd& rho0) {
    const auto d = static_cast<Eigen::Index>(L.dimension());
    if (rho0.rows() != d || rho0.cols() != d) {
        throw Error(ErrorCode::dimension_mismatch, "initial matrix does not match the Liouvillian");
    }
}

} // namespace detail

// exp(L t_k) rho0 for every t_k of a non-decreasing, non-negative grid, from
// one forward propagation.
inline std::vector<Eigen::MatrixXcd> evolve_grid(const Superoperator& L, const Eigen::MatrixXcd& rho0,
                                                 std::span<const double> times,
                                                 const PropagationOptions& opt = {}) {
    detail::require_shape(L, rho0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0) || (k > 0 && times[k] < times[k - 1])) {
            throw Error(ErrorCode::invalid_parameter, "time grid must be non-negative and sorted");
        }
    }
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(times.size());
    if (times.empty()) return out;

    const auto d = static_cast<Eigen::Index>(L.dimension());
    Eigen::VectorXcd w = detail::vec(rho0);
    const double scale = std::max(w.norm(), std::numeric_limits<double>::min());
    const double span = std::max(times.back(), 1.0);
    const double tol = opt.rtol * scale / (1.2 * span);
    detail::KrylovStepper stepper(L.matrix(), opt);
    double t_now = 0.0;
    for (double t : times) {
        stepper.advance(w, t - t_now, tol);
        t_now = t;
        out.push_back(detail::unvec(w, d));
    }
    return out;
}

inline Eigen::MatrixXcd evolve(const Superoperator& L, const Eigen::MatrixXcd& rho0, double t,
                               const PropagationOptions& opt = {}) {
    if (!(t >= 0.0)) throw Error(ErrorCode::invalid_parameter, "evolution time must be non-negative");
    const double times[] = {t};
    return evolve_grid(L, rho0, times, opt).front();
}

// Dense reference exp(L t) by scaling and squaring; for small spaces only.
inline constexpr std::size_t dense_propagation_limit = 2500;

inline Eigen::MatrixXcd evolve_dense(const Superoperator& L, const Eigen::MatrixXcd& rho0, double t) {
    detail::require_shape(L, rho0);
    if (!(t >= 0.0)) throw Error(ErrorCode::invalid_parameter, "evolution time must be non-negative");
    if (static_cast<std::size_t>(L.matrix().rows()) > dense_propagation_limit) {
        throw Error(ErrorCode::configuration, "space too large for the dense exponential");
    }
    const Eigen::MatrixXcd generator = t * Eigen::MatrixXcd(L.matrix());
    const Eigen::MatrixXcd propagator = generator.exp();
    const Eigen::VectorXcd w = propagator * detail::vec(rho0);
    return detail::unvec(w, static_cast<Eigen::Index>(L.dimension()));
}

} // namespace quadblock

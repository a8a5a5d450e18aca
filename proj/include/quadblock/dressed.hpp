// dressed.hpp: closed-form energy ladder of the pair-exchange coupling
// G a^+ b^2 + h.c.
//
// The coupling conserves P = 2 n + m (n photons in a_L, m phonons), so the
// effective Hamiltonian splits into manifolds of fixed P. With Delta_m =
// Delta/2 the bare energy of every state in manifold P is Delta P / 2, and the
// coupling inside it is a real tridiagonal matrix in units of G.
//
// State labels: the dressed states written |P_k> in the energy diagrams are
// mapped here to (pair number P, eigenvalue branch k) with eigenvalues sorted
// ascending. The map is a naming convention only.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "quadblock/error.hpp"

namespace quadblock {

struct FockPair {
    std::size_t photons;
    std::size_t phonons;

    friend bool operator==(const FockPair&, const FockPair&) = default;
};

struct Manifold {
    std::size_t pair_number;
    std::vector<FockPair> basis;  // photon number descending
    Eigen::MatrixXd matrix;        // coupling in units of G

    Eigen::VectorXd eigenvalues() const {
        if (matrix.rows() == 0) return {};
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix, Eigen::EigenvaluesOnly);
        return eig.eigenvalues();
    }
};

// All (n, m) with 2n + m = pair below the cutoffs; an empty cutoff means
// unbounded in that mode.
inline Manifold manifold(std::size_t pair, std::optional<std::size_t> photon_cutoff = std::nullopt,
                         std::optional<std::size_t> phonon_cutoff = std::nullopt) {
    Manifold mf;
    mf.pair_number = pair;
    for (std::size_t n = pair / 2 + 1; n-- > 0;) {
        const std::size_t m = pair - 2 * n;
        if (photon_cutoff && n >= *photon_cutoff) continue;
        if (phonon_cutoff && m >= *phonon_cutoff) continue;
        mf.basis.push_back({n, m});
    }
    const auto dim = static_cast<Eigen::Index>(mf.basis.size());
    mf.matrix = Eigen::MatrixXd::Zero(dim, dim);
    // <n+1, m-2| a^+ b^2 |n, m> = sqrt((n+1) m (m-1)); basis entries k, k+1 are
    // (n+1, m-2) and (n, m).
    for (Eigen::Index k = 0; k + 1 < dim; ++k) {
        const FockPair lower = mf.basis[static_cast<std::size_t>(k + 1)];
        const FockPair upper = mf.basis[static_cast<std::size_t>(k)];
        if (upper.photons != lower.photons + 1) continue;
        const double n = static_cast<double>(lower.photons);
        const double m = static_cast<double>(lower.phonons);
        const double element = std::sqrt((n + 1.0) * m * (m - 1.0));
        mf.matrix(k, k + 1) = element;
        mf.matrix(k + 1, k) = element;
    }
    return mf;
}

struct Resonance {
    std::size_t pair_number;
    std::size_t photon_order;         // photons absorbed from the lowest state of the same parity
    std::vector<double> delta_over_G; // ascending
};

// k-photon resonances from the bottom of each parity ladder (|0,0> for even P,
// the thermally populated |0,1> for odd P) into manifold P, k = floor(P/2).
// With Delta_m = Delta/2, resonance requires k Delta + G lambda = 0 for an
// eigenvalue lambda, i.e. Delta/G = -lambda/k; the spectra are symmetric, so
// the set is {lambda/k}.
inline std::vector<Resonance> resonance_detunings(std::size_t max_pair,
                                                  std::optional<std::size_t> photon_cutoff = std::nullopt,
                                                  std::optional<std::size_t> phonon_cutoff = std::nullopt) {
    if (max_pair < 2) {
        throw Error(ErrorCode::invalid_parameter, "max_pair must be at least 2");
    }
    std::vector<Resonance> out;
    for (std::size_t pair = 2; pair <= max_pair; ++pair) {
        const Manifold mf = manifold(pair, photon_cutoff, phonon_cutoff);
        const std::size_t k = pair / 2;
        Resonance r{pair, k, {}};
        const Eigen::VectorXd ev = mf.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) r.delta_over_G.push_back(-ev(i) / static_cast<double>(k));
        std::sort(r.delta_over_G.begin(), r.delta_over_G.end());
        out.push_back(std::move(r));
    }
    return out;
}

// Union of all resonance detunings, merged when closer than `merge_tol`.
inline std::vector<double> prediction_set(const std::vector<Resonance>& resonances, double merge_tol = 1e-9) {
    std::vector<double> all;
    for (const auto& r : resonances) all.insert(all.end(), r.delta_over_G.begin(), r.delta_over_G.end());
    std::sort(all.begin(), all.end());
    std::vector<double> unique;
    for (double v : all) {
        if (unique.empty() || std::abs(v - unique.back()) > merge_tol) unique.push_back(v);
    }
    for (double& v : unique) {
        if (std::abs(v) <= merge_tol) v = 0.0;
    }
    return unique;
}

// Distance to the closest prediction.
inline std::pair<double, double> nearest_prediction(const std::vector<double>& predictions, double x) {
    double best = std::numeric_limits<double>::quiet_NaN();
    double dist = std::numeric_limits<double>::infinity();
    for (double p : predictions) {
        if (std::abs(p - x) < dist) {
            dist = std::abs(p - x);
            best = p;
        }
    }
    return {best, dist};
}

} // namespace quadblock

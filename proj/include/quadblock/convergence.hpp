// convergence.hpp: truncation control: raise the Fock cutoffs until every
// requested observable is stable between successive levels.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "quadblock/error.hpp"
#include "quadblock/model.hpp"
#include "quadblock/observables.hpp"

namespace quadblock {

enum class Observable { T21, T12, g2_21, g2_12, n_L, n_R };

inline const char* to_string(Observable o) {
    switch (o) {
    case Observable::T21: return "T21";
    case Observable::T12: return "T12";
    case Observable::g2_21: return "g2_21_zero";
    case Observable::g2_12: return "g2_12_zero";
    case Observable::n_L: return "n_L";
    case Observable::n_R: return "n_R";
    }
    return "?";
}

inline std::vector<Observable> all_observables() {
    return {Observable::T21, Observable::T12, Observable::g2_21, Observable::g2_12, Observable::n_L,
            Observable::n_R};
}

struct ConvergenceOptions {
    double rel_tol = 1e-6;
    std::size_t max_photon = 10;
    std::size_t max_phonon = 24;
    SteadyStateOptions solver;
};

struct ConvergenceRow {
    std::size_t cutoff_photon;
    std::size_t cutoff_phonon;
    std::vector<double> values; // NaN where the observable is undefined
    double max_rel_change;      // against the previous accepted level; NaN for the first row
};

struct ConvergenceReport {
    std::size_t cutoff_photon = 0;
    std::size_t cutoff_phonon = 0;
    std::vector<Observable> observables;
    std::vector<ConvergenceRow> table;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, ConvergenceReport report)
        : Error(ErrorCode::convergence_failure, what), report_(std::move(report)) {}

    const ConvergenceReport& report() const noexcept { return report_; }

private:
    ConvergenceReport report_;
};

// Undefined observables (zero probe, zero occupation) evaluate to NaN.
inline std::vector<double> evaluate_observables(const SystemParams& p, const std::vector<Observable>& obs,
                                                const SteadyStateOptions& solver = {}) {
    bool need1 = false;
    bool need2 = false;
    bool need_g2 = false;
    for (Observable o : obs) {
        need1 |= (o == Observable::T21 || o == Observable::g2_21 || o == Observable::n_L);
        need2 |= (o == Observable::T12 || o == Observable::g2_12 || o == Observable::n_R);
        need_g2 |= (o == Observable::g2_21 || o == Observable::g2_12);
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    TransportRequest req;
    req.port1 = need1;
    req.port2 = need2;
    req.g2 = need_g2;
    req.solver = solver;

    TransportResult r;
    if (p.epsilon > 0.0) {
        r = solve_transport(p, req);
    } else {
        // Only occupations are defined without a probe.
        if (need1) {
            const auto s = solve_system(p, ProbePort::one, req.port1_layout, solver);
            PortSolution ps;
            ps.occupation = std::max(0.0, mean_occupation(s.steady.rho, mode_annihilator(s.modes, Mode::L)));
            r.port21 = ps;
        }
        if (need2) {
            const auto s = solve_system(p, ProbePort::two, req.port2_layout, solver);
            PortSolution ps;
            ps.occupation = std::max(0.0, mean_occupation(s.steady.rho, mode_annihilator(s.modes, Mode::R)));
            r.port12 = ps;
        }
    }
    const bool probed = p.epsilon > 0.0;
    std::vector<double> out;
    out.reserve(obs.size());
    for (Observable o : obs) {
        switch (o) {
        case Observable::T21: out.push_back(probed ? r.port21->transmission : nan); break;
        case Observable::T12: out.push_back(probed ? r.port12->transmission : nan); break;
        case Observable::g2_21: out.push_back(probed && r.port21->g2_zero ? *r.port21->g2_zero : nan); break;
        case Observable::g2_12: out.push_back(probed && r.port12->g2_zero ? *r.port12->g2_zero : nan); break;
        case Observable::n_L: out.push_back(r.port21->occupation); break;
        case Observable::n_R: out.push_back(r.port12->occupation); break;
        }
    }
    return out;
}

// |a - b| / max(|a|, |b|); zero when both vanish or both are undefined.
inline double relative_change(double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return 0.0;
    if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::infinity();
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

inline double max_relative_change(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, relative_change(a[k], b[k]));
    return worst;
}

// Starting from p's cutoffs, alternately probe photon+1 and phonon+1. A
// probe that moves any observable by more than rel_tol is accepted as the
// new level; the loop ends when neither probe does. The returned cutoffs are
// the certified (lower) level; the table lists every level evaluated.
inline ConvergenceReport converge_cutoffs(SystemParams p, const std::vector<Observable>& obs,
                                          const ConvergenceOptions& opt = {}) {
    p.validate();
    if (p.cutoff_phonon < 3) p.cutoff_phonon = 3;
    ConvergenceReport report;
    report.observables = obs;

    auto eval = [&](const SystemParams& q) { return evaluate_observables(q, obs, opt.solver); };
    std::vector<double> current = eval(p);
    report.table.push_back({p.cutoff_photon, p.cutoff_phonon, current,
                            std::numeric_limits<double>::quiet_NaN()});

    auto fail = [&](const std::string& which) {
        report.cutoff_photon = p.cutoff_photon;
        report.cutoff_phonon = p.cutoff_phonon;
        return ConvergenceError(which + " cutoff did not converge to relative tolerance " +
                                    std::to_string(opt.rel_tol) + " below its maximum",
                                report);
    };

    // Re-checks after a move reuse earlier solves.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> seen;
    bool moved = true;
    while (moved) {
        moved = false;
        for (int axis = 0; axis < 2; ++axis) {
            while (true) {
                SystemParams trial = p;
                if (axis == 0) ++trial.cutoff_photon;
                else ++trial.cutoff_phonon;
                if (trial.cutoff_photon > opt.max_photon || trial.cutoff_phonon > opt.max_phonon) {
                    throw fail(axis == 0 ? "photon" : "phonon");
                }
                const auto key = std::make_pair(trial.cutoff_photon, trial.cutoff_phonon);
                auto hit = seen.find(key);
                if (hit == seen.end()) {
                    hit = seen.emplace(key, eval(trial)).first;
                    report.table.push_back({trial.cutoff_photon, trial.cutoff_phonon, hit->second,
                                            max_relative_change(current, hit->second)});
                }
                std::vector<double> next = hit->second;
                const double change = max_relative_change(current, next);
                if (change < opt.rel_tol) break;
                p = trial;
                current = std::move(next);
                moved = true;
            }
        }
    }
    report.cutoff_photon = p.cutoff_photon;
    report.cutoff_phonon = p.cutoff_phonon;
    return report;
}

} // namespace quadblock

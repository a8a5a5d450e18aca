// run.hpp: sweep execution: one steady-state solve per point and direction,
// the delay scan from a single propagation, resonance prediction and the
// cutoff-certification report.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ctime>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "quadblock/convergence.hpp"
#include "quadblock/dressed.hpp"
#include "quadblock/error.hpp"
#include "quadblock/model.hpp"
#include "quadblock/observables.hpp"
#include "quadblock/sweep/config.hpp"

namespace quadblock::sweep {

inline constexpr const char* artifact_version = "0.1.0";

struct SweepRow {
    double sweep_value = 0.0;
    std::optional<double> T21, T12, isolation_db, g2_21_zero, g2_12_zero, n_L, n_R;
    std::optional<double> g2_21_tau, g2_12_tau;
    std::optional<Complex> mean_a_L, mean_a_R;
    std::size_t cutoff_photon = 0;
    std::size_t cutoff_phonon = 0;
    std::optional<double> residual_21, residual_12;
    std::string status = "ok";

    bool ok() const noexcept { return status == "ok"; }
};

struct Provenance {
    std::string config_hash;
    std::string version = artifact_version;
    std::string timestamp;
};

struct SweepResult {
    Variable variable = Variable::Delta;
    Provenance provenance;
    std::vector<SweepRow> rows;

    std::size_t failed_rows() const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); }));
    }
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Runs fn(i) for i in [0, n) on up to `threads` workers; results are written
// by index, so completion order never affects output order.
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn,
                         const ProgressFn& progress = {}) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            fn(i);
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(d, n);
            }
        }
    };
    if (threads == 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::vector<Observable> requested_observables(const SweepConfig& c) {
    std::vector<Observable> obs;
    const bool iso = c.wants("isolation_db");
    if (c.wants("T21") || iso) obs.push_back(Observable::T21);
    if (c.wants("T12") || iso) obs.push_back(Observable::T12);
    if (c.wants("g2_21_zero")) obs.push_back(Observable::g2_21);
    if (c.wants("g2_12_zero")) obs.push_back(Observable::g2_12);
    if (c.wants("n_L")) obs.push_back(Observable::n_L);
    if (c.wants("n_R")) obs.push_back(Observable::n_R);
    return obs;
}

inline ConvergenceOptions convergence_options(const SweepConfig& c) {
    ConvergenceOptions opt;
    opt.rel_tol = c.solver.convergence_tol;
    opt.max_photon = c.solver.max_photon;
    opt.max_phonon = c.solver.max_phonon;
    opt.solver.residual_tolerance = c.solver.steady_residual;
    return opt;
}

// Solves one Delta / n_th point. Errors are recorded in the row.
inline SweepRow solve_point(const SweepConfig& c, double value) {
    SweepRow row;
    row.sweep_value = value;
    try {
        SystemParams p = c.point_params(value);
        if (c.solver.cutoff_policy == CutoffPolicy::converge) {
            const auto report = converge_cutoffs(p, requested_observables(c), convergence_options(c));
            p.cutoff_photon = report.cutoff_photon;
            p.cutoff_phonon = report.cutoff_phonon;
        }
        row.cutoff_photon = p.cutoff_photon;
        row.cutoff_phonon = p.cutoff_phonon;

        const bool iso = c.wants("isolation_db");
        TransportRequest req;
        req.port1 = c.wants("T21") || c.wants("g2_21_zero") || c.wants("n_L") || iso;
        req.port2 = c.wants("T12") || c.wants("g2_12_zero") || c.wants("n_R") || iso;
        req.g2 = c.wants("g2_21_zero") || c.wants("g2_12_zero");
        req.solver.residual_tolerance = c.solver.steady_residual;
        const TransportResult r = solve_transport(p, req);

        if (r.port21) {
            const PortSolution& s = *r.port21;
            if (c.wants("T21")) row.T21 = s.transmission;
            if (c.wants("n_L")) row.n_L = s.occupation;
            if (c.wants("g2_21_zero")) {
                if (!s.g2_zero) throw Error(ErrorCode::undefined_correlation, "n_L vanishes");
                row.g2_21_zero = *s.g2_zero;
            }
            row.mean_a_L = s.mean_field;
            row.residual_21 = s.residual;
        }
        if (r.port12) {
            const PortSolution& s = *r.port12;
            if (c.wants("T12")) row.T12 = s.transmission;
            if (c.wants("n_R")) row.n_R = s.occupation;
            if (c.wants("g2_12_zero")) {
                if (!s.g2_zero) throw Error(ErrorCode::undefined_correlation, "n_R vanishes");
                row.g2_12_zero = *s.g2_zero;
            }
            row.mean_a_R = s.mean_field;
            row.residual_12 = s.residual;
        }
        if (iso) row.isolation_db = isolation(r.port21->transmission, r.port12->transmission);
    } catch (const std::exception& e) {
        SweepRow failed;
        failed.sweep_value = value;
        failed.cutoff_photon = row.cutoff_photon;
        failed.cutoff_phonon = row.cutoff_phonon;
        failed.status = e.what();
        return failed;
    }
    return row;
}

// g2(tau) rows for one fixed detuning, each direction from one propagation.
inline SweepResult run_g2_delay(const SweepConfig& config, const ProgressFn& progress = {}) {
    SweepConfig c = config;
    validate(c);
    if (c.variable != Variable::tau) {
        throw Error(ErrorCode::configuration, "run_g2_delay needs sweep.variable = tau");
    }
    SweepResult result;
    result.variable = Variable::tau;
    result.provenance.config_hash = config_hash(c);
    result.provenance.timestamp = utc_timestamp();
    const std::vector<double> grid = c.grid();
    result.rows.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) result.rows[i].sweep_value = grid[i];

    SystemParams p = c.resolved_base();
    std::string failure;
    try {
        if (c.solver.cutoff_policy == CutoffPolicy::converge) {
            std::vector<Observable> obs;
            if (c.wants("g2_21_tau")) obs.push_back(Observable::g2_21);
            if (c.wants("g2_12_tau")) obs.push_back(Observable::g2_12);
            const auto report = converge_cutoffs(p, obs, convergence_options(c));
            p.cutoff_photon = report.cutoff_photon;
            p.cutoff_phonon = report.cutoff_phonon;
        }
        std::vector<double> taus(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) taus[i] = delay_in_inverse_gamma(grid[i], p.gamma_c);
        PropagationOptions popt;
        popt.rtol = c.solver.evolve_rtol;
        SteadyStateOptions sopt;
        sopt.residual_tolerance = c.solver.steady_residual;

        auto scan = [&](ProbePort port, Mode mode, std::optional<double> SweepRow::*field,
                        std::optional<double> SweepRow::*residual) {
            const SolvedSystem s = solve_system(p, port, default_layout(port), sopt);
            const Operator a = mode_annihilator(s.modes, mode);
            const auto values = g2_tau(s.liouvillian, s.steady.rho, a, taus, popt);
            for (std::size_t i = 0; i < values.size(); ++i) {
                result.rows[i].*field = values[i];
                result.rows[i].*residual = s.steady.relative_residual;
            }
        };
        if (c.wants("g2_21_tau")) scan(ProbePort::one, Mode::L, &SweepRow::g2_21_tau, &SweepRow::residual_21);
        if (progress) progress(1, 2);
        if (c.wants("g2_12_tau")) scan(ProbePort::two, Mode::R, &SweepRow::g2_12_tau, &SweepRow::residual_12);
        if (progress) progress(2, 2);
    } catch (const std::exception& e) {
        failure = e.what();
    }
    for (auto& row : result.rows) {
        row.cutoff_photon = p.cutoff_photon;
        row.cutoff_phonon = p.cutoff_phonon;
        if (!failure.empty()) {
            const double v = row.sweep_value;
            row = SweepRow{};
            row.sweep_value = v;
            row.cutoff_photon = p.cutoff_photon;
            row.cutoff_phonon = p.cutoff_phonon;
            row.status = failure;
        }
    }
    return result;
}

inline SweepResult run_sweep(const SweepConfig& config, std::size_t threads = 1, const ProgressFn& progress = {}) {
    SweepConfig c = config;
    validate(c);
    if (c.variable == Variable::tau) return run_g2_delay(c, progress);
    SweepResult result;
    result.variable = c.variable;
    result.provenance.config_hash = config_hash(c);
    result.provenance.timestamp = utc_timestamp();
    const std::vector<double> grid = c.grid();
    result.rows.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) { result.rows[i] = solve_point(c, grid[i]); }, progress);
    return result;
}

// ---------------------------------------------------------------------------
// Resonance prediction versus detected extrema

struct Extremum {
    bool maximum = true;
    double delta_over_G = 0.0;
    double value = 0.0;
    double nearest_prediction = 0.0;
    double deviation = 0.0;
};

// Strict interior local extrema of ys over xs.
inline std::vector<Extremum> local_extrema(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<Extremum> out;
    for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
        const bool is_max = ys[i] > ys[i - 1] && ys[i] > ys[i + 1];
        const bool is_min = ys[i] < ys[i - 1] && ys[i] < ys[i + 1];
        if (is_max || is_min) out.push_back({is_max, xs[i], ys[i], 0.0, 0.0});
    }
    return out;
}

struct PredictionReport {
    std::vector<Resonance> resonances;
    std::vector<double> predictions; // Delta / G
    std::vector<Extremum> extrema;   // of T21, when a Delta sweep was available
};

inline PredictionReport compare_with_predictions(const SweepConfig& c, const SweepResult* sweep) {
    PredictionReport report;
    const SystemParams base = c.resolved_base();
    report.resonances = resonance_detunings(c.max_pair, std::nullopt, base.cutoff_phonon);
    report.predictions = prediction_set(report.resonances);
    if (sweep && sweep->variable == Variable::Delta) {
        std::vector<double> xs, ys;
        for (const auto& row : sweep->rows) {
            if (!row.ok() || !row.T21) continue;
            xs.push_back(row.sweep_value);
            ys.push_back(*row.T21);
        }
        report.extrema = local_extrema(xs, ys);
        for (auto& e : report.extrema) {
            const auto [nearest, dist] = nearest_prediction(report.predictions, e.delta_over_G);
            e.nearest_prediction = nearest;
            e.deviation = dist;
        }
    }
    return report;
}

inline PredictionReport predict_resonances(const SweepConfig& config, std::size_t threads = 1,
                                           const ProgressFn& progress = {}) {
    SweepConfig c = config;
    if (c.max_pair < 2) throw Error(ErrorCode::configuration, "predict.max_pair must be at least 2");
    validate(c);
    if (c.variable == Variable::Delta && c.wants("T21")) {
        SweepConfig t21_only = c;
        t21_only.outputs = {"T21"};
        const SweepResult sweep = run_sweep(t21_only, threads, progress);
        return compare_with_predictions(c, &sweep);
    }
    return compare_with_predictions(c, nullptr);
}

// ---------------------------------------------------------------------------
// Cutoff certification at representative sweep points

struct CertifiedPoint {
    double sweep_value = 0.0;
    std::optional<ConvergenceReport> report;
    std::string status = "ok";
};

// Certification points: the base point for tau sweeps; otherwise the first,
// middle and last grid values, plus for detuning sweeps the grid values
// closest to each dressed-state resonance inside the range.
inline std::vector<double> certification_points(const SweepConfig& c) {
    if (c.variable == Variable::tau) return {0.0};
    const auto grid = c.grid();
    std::vector<double> pts = {grid.front(), grid[grid.size() / 2], grid.back()};
    if (c.variable == Variable::Delta && c.max_pair >= 2) {
        for (double d : prediction_set(resonance_detunings(c.max_pair))) {
            if (d < grid.front() || d > grid.back()) continue;
            pts.push_back(*std::min_element(grid.begin(), grid.end(), [d](double x, double y) {
                return std::abs(x - d) < std::abs(y - d);
            }));
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

inline std::vector<CertifiedPoint> certify_cutoffs(const SweepConfig& config, std::size_t threads = 1) {
    SweepConfig c = config;
    validate(c);
    std::vector<Observable> obs;
    if (c.variable == Variable::tau) {
        if (c.wants("g2_21_tau")) obs.push_back(Observable::g2_21);
        if (c.wants("g2_12_tau")) obs.push_back(Observable::g2_12);
    } else {
        obs = requested_observables(c);
    }
    const auto pts = certification_points(c);
    std::vector<CertifiedPoint> out(pts.size());
    parallel_for(pts.size(), threads, [&](std::size_t i) {
        out[i].sweep_value = pts[i];
        const SystemParams p = c.variable == Variable::tau ? c.resolved_base() : c.point_params(pts[i]);
        try {
            out[i].report = converge_cutoffs(p, obs, convergence_options(c));
        } catch (const ConvergenceError& e) {
            out[i].report = e.report();
            out[i].status = e.what();
        } catch (const std::exception& e) {
            out[i].status = e.what();
        }
    });
    return out;
}

} // namespace quadblock::sweep

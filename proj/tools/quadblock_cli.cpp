// quadblock: command-line front end for blockade sweeps.
//
//   quadblock sweep    --preset fig2 --out fig2.csv --threads 4
//   quadblock g2tau    --config fig2d.cfg --out g2tau.csv
//   quadblock predict  --preset fig2
//   quadblock converge --preset fig2 --override base.n_th=1
//   quadblock presets  [--dump NAME]
//
// Exit codes: 0 success, 2 configuration error, 3 every point failed,
// 4 some points failed.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "quadblock/quadblock.hpp"

namespace qs = quadblock::sweep;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_all_failed = 3;
constexpr int exit_partial = 4;

struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::string out_path;
    std::size_t threads = 1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool out_required) {
    auto* cfg = cmd->add_option("--config", o.config_path, "configuration file (key = value)");
    auto* pre = cmd->add_option("--preset", o.preset, "named built-in configuration");
    cfg->excludes(pre);
    auto* out = cmd->add_option("--out", o.out_path, "CSV output path");
    if (out_required) out->required();
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--override", o.overrides, "key=value, applied after the config (repeatable)");
}

qs::SweepConfig load(const CommonOptions& o) {
    qs::SweepConfig c;
    if (!o.config_path.empty()) c = qs::load_config(o.config_path);
    else if (!o.preset.empty()) c = qs::parse_config(qs::find_preset(o.preset).text);
    else throw quadblock::Error(quadblock::ErrorCode::config_parse, "one of --config or --preset is required");
    for (const auto& ov : o.overrides) qs::apply_override(c, ov);
    qs::validate(c);
    const quadblock::SystemParams base = c.resolved_base();
    if (!base.weak_probe()) {
        std::cerr << "warning: epsilon = " << base.epsilon << " exceeds the weak-probe bound gamma_c/4 = "
                  << base.gamma_c / 4.0 << "; normalized transmissions depend on the probe strength\n";
    }
    return c;
}

qs::ProgressFn progress_printer(const char* what) {
    return [what](std::size_t done, std::size_t total) {
        const std::size_t step = std::max<std::size_t>(1, total / 20);
        if (done == total || done % step == 0) {
            std::cout << what << ": " << done << "/" << total << '\n' << std::flush;
        }
    };
}

int result_code(const qs::SweepResult& r) {
    const std::size_t failed = r.failed_rows();
    if (failed == 0) return exit_ok;
    return failed == r.rows.size() ? exit_all_failed : exit_partial;
}

int run_sweep_cmd(const CommonOptions& o, bool delay) {
    const qs::SweepConfig c = load(o);
    if (delay != (c.variable == qs::Variable::tau)) {
        std::cerr << "error: " << (delay ? "g2tau needs sweep.variable = tau" : "use g2tau for tau sweeps") << '\n';
        return exit_config;
    }
    std::cout << "config " << qs::config_hash(c) << ", " << c.points << " points over "
              << qs::to_string(c.variable) << '\n';
    const qs::SweepResult r = delay ? qs::run_g2_delay(c, progress_printer("g2tau"))
                                    : qs::run_sweep(c, o.threads, progress_printer("sweep"));
    qs::write_csv_file(o.out_path, r);
    std::cout << "wrote " << r.rows.size() << " rows to " << o.out_path << " (" << r.failed_rows()
              << " failed)\n";
    for (const auto& row : r.rows) {
        if (!row.ok()) std::cout << "  failed at " << row.sweep_value << ": " << row.status << '\n';
    }
    return result_code(r);
}

int run_predict_cmd(const CommonOptions& o) {
    const qs::SweepConfig c = load(o);
    const qs::PredictionReport report = qs::predict_resonances(c, o.threads, progress_printer("sweep"));
    std::cout << "pair  photons  Delta/G\n";
    for (const auto& r : report.resonances) {
        for (double d : r.delta_over_G) std::printf("%4zu  %7zu  %+.6f\n", r.pair_number, r.photon_order, d);
    }
    std::cout << "prediction set (Delta/G):";
    for (double d : report.predictions) std::printf(" %+.6f", d);
    std::cout << '\n';
    if (!report.extrema.empty()) {
        std::cout << "T21 extrema  Delta/G     T21           nearest     deviation\n";
        for (const auto& e : report.extrema) {
            std::printf("%-11s  %+.4f  %.6e  %+.6f  %.4f\n", e.maximum ? "max" : "min", e.delta_over_G, e.value,
                        e.nearest_prediction, e.deviation);
        }
    }
    if (!o.out_path.empty()) {
        std::ofstream out(o.out_path);
        out << "kind,delta_over_G,T21,nearest_prediction,deviation\n";
        for (double d : report.predictions) out << "prediction," << qs::detail::format_double(d) << ",,,\n";
        for (const auto& e : report.extrema) {
            out << (e.maximum ? "max," : "min,") << qs::detail::format_double(e.delta_over_G) << ','
                << qs::detail::format_double(e.value) << ',' << qs::detail::format_double(e.nearest_prediction)
                << ',' << qs::detail::format_double(e.deviation) << '\n';
        }
    }
    return exit_ok;
}

int run_converge_cmd(const CommonOptions& o) {
    const qs::SweepConfig c = load(o);
    const auto points = qs::certify_cutoffs(c, o.threads);
    std::optional<std::ofstream> out;
    if (!o.out_path.empty()) {
        out.emplace(o.out_path);
        *out << "sweep_value,cutoff_photon,cutoff_phonon,observable,value,max_rel_change\n";
    }
    std::size_t failed = 0;
    for (const auto& pt : points) {
        std::cout << "point " << pt.sweep_value << ": ";
        if (!pt.report) {
            std::cout << pt.status << '\n';
            ++failed;
            continue;
        }
        const auto& rep = *pt.report;
        if (pt.status == "ok") {
            std::cout << "certified cutoffs photon " << rep.cutoff_photon << ", phonon " << rep.cutoff_phonon << '\n';
        } else {
            std::cout << pt.status << '\n';
            ++failed;
        }
        for (const auto& row : rep.table) {
            std::printf("  (%2zu,%2zu) max rel change %.3e\n", row.cutoff_photon, row.cutoff_phonon,
                        row.max_rel_change);
            if (out) {
                for (std::size_t k = 0; k < rep.observables.size(); ++k) {
                    *out << qs::detail::format_double(pt.sweep_value) << ',' << row.cutoff_photon << ','
                         << row.cutoff_phonon << ',' << quadblock::to_string(rep.observables[k]) << ','
                         << qs::detail::format_double(row.values[k]) << ','
                         << qs::detail::format_double(row.max_rel_change) << '\n';
                }
            }
        }
    }
    if (failed == 0) return exit_ok;
    return failed == points.size() ? exit_all_failed : exit_partial;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadblock: nonreciprocal photon blockade in a quadratically coupled optomechanical system"};
    app.require_subcommand(1);

    CommonOptions sweep_opts, g2_opts, predict_opts, converge_opts;
    auto* sweep = app.add_subcommand("sweep", "Delta or n_th sweep of transmission, isolation and g2(0)");
    add_common(sweep, sweep_opts, true);
    auto* g2tau = app.add_subcommand("g2tau", "g2(tau) delay scan at one detuning");
    add_common(g2tau, g2_opts, true);
    auto* predict = app.add_subcommand("predict", "dressed-state resonance predictions versus T21 extrema");
    add_common(predict, predict_opts, false);
    auto* converge = app.add_subcommand("converge", "certify Fock cutoffs at representative points");
    add_common(converge, converge_opts, false);
    auto* list = app.add_subcommand("presets", "list built-in presets");
    std::string dump;
    list->add_option("--dump", dump, "print the configuration text of one preset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*sweep) return run_sweep_cmd(sweep_opts, false);
        if (*g2tau) return run_sweep_cmd(g2_opts, true);
        if (*predict) return run_predict_cmd(predict_opts);
        if (*converge) return run_converge_cmd(converge_opts);
        if (*list) {
            if (!dump.empty()) {
                std::cout << qs::find_preset(dump).text;
            } else {
                for (const auto& p : qs::presets()) std::cout << p.name << "  " << p.description << '\n';
            }
            return exit_ok;
        }
    } catch (const quadblock::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        const auto code = e.code();
        if (code == quadblock::ErrorCode::config_parse || code == quadblock::ErrorCode::configuration ||
            code == quadblock::ErrorCode::invalid_parameter || code == quadblock::ErrorCode::invalid_dimension) {
            return exit_config;
        }
        return exit_all_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_all_failed;
    }
    return exit_ok;
}

// presets.hpp: named configurations for the standard blockade scans.
// The same texts ship as files under presets/.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quadblock/error.hpp"
#include "quadblock/sweep/config.hpp"

namespace quadblock::sweep {

namespace detail {

// Cutoffs are the certified levels for each scan: photon 6 is needed once
// g2_12(0) at Delta = 0 is requested, photon 5 suffices otherwise.
inline std::string figure_base(int cutoff_photon) {
    return "base.G = 3\nbase.epsilon = 0.1\nbase.gamma_c = 1\nbase.gamma_m = 0.01\n"
           "base.cutoff_photon = " + std::to_string(cutoff_photon) +
           "\nbase.cutoff_phonon = 12\nconstraint.Delta_m = Delta/2\n";
}

} // namespace detail

struct Preset {
    std::string name;
    std::string description;
    std::string text;
};

inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = [] {
        const std::string base = detail::figure_base(5);
        auto delta_sweep = [&](const std::string& nth, const std::string& outputs, int photon = 5) {
            return detail::figure_base(photon) + "base.n_th = " + nth +
                   "\nsweep.variable = Delta\nsweep.min = -3\nsweep.max = 3\nsweep.points = 241\noutputs = " +
                   outputs + "\n";
        };
        auto nth_sweep = [&](const std::string& delta_over_G) {
            return base + "base.n_th = 0\nbase.Delta_over_G = " + delta_over_G +
                   "\nsweep.variable = n_th\nsweep.min = 0\nsweep.max = 1\nsweep.points = 21\n"
                   "outputs = T21,T12,isolation_db,g2_21_zero\n";
        };
        const std::string all_outputs = "T21,T12,isolation_db,g2_21_zero,g2_12_zero,n_L,n_R";
        return std::vector<Preset>{
            {"fig2", "transmission, isolation and g2(0) versus Delta/G", delta_sweep("0", all_outputs, 6)},
            {"fig2d", "g2_21(tau) at Delta = sqrt(2) G, tau in 2pi/gamma_c",
             base + "base.n_th = 0\nbase.Delta_over_G = 1.4142135623730951\n"
                    "sweep.variable = tau\nsweep.min = 0\nsweep.max = 1\nsweep.points = 201\n"
                    "outputs = g2_21_tau\n"},
            {"fig4ac-nth0", "T21 and g2_21(0) versus Delta/G at n_th = 0", delta_sweep("0", "T21,g2_21_zero")},
            {"fig4ac-nth0.1", "T21 and g2_21(0) versus Delta/G at n_th = 0.1", delta_sweep("0.1", "T21,g2_21_zero")},
            {"fig4ac-nth1", "T21 and g2_21(0) versus Delta/G at n_th = 1", delta_sweep("1", "T21,g2_21_zero")},
            {"fig4bd-delta0", "isolation and g2_21(0) versus n_th at Delta = 0", nth_sweep("0")},
            {"fig4bd-delta-sqrt2", "isolation and g2_21(0) versus n_th at Delta = sqrt(2) G",
             nth_sweep("1.4142135623730951")},
            {"fig4bd-delta-sqrt6", "isolation and g2_21(0) versus n_th at Delta = sqrt(6) G",
             nth_sweep("2.4494897427831779")},
        };
    }();
    return all;
}

inline const Preset& find_preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    throw Error(ErrorCode::config_parse, "unknown preset '" + std::string(name) + "'");
}

inline SweepConfig preset_config(std::string_view name) {
    SweepConfig c = parse_config(find_preset(name).text);
    validate(c);
    return c;
}

} // namespace quadblock::sweep

// blockade_point: transport through the quadratically coupled system at one
// detuning, with the nearest dressed-state resonance for comparison.
//
//   blockade_point [Delta/G] [n_th]     defaults: 1.4142 (the blockade peak), 0

#include <cstdio>
#include <cstdlib>

#include "quadblock/quadblock.hpp"

using namespace quadblock;

int main(int argc, char** argv) {
    const double x = argc > 1 ? std::atof(argv[1]) : std::sqrt(2.0);
    const double n_th = argc > 2 ? std::atof(argv[2]) : 0.0;

    const SystemParams p = figure_params(3.0 * x, n_th);
    const TransportResult r = solve_transport(p);

    std::printf("G = %g, epsilon = %g, gamma_m = %g, n_th = %g, Delta = %+.4f G\n", p.G, p.epsilon, p.gamma_m,
                p.n_th, x);
    std::printf("T21 = %.6e   T12 = %.6e   isolation = %+.2f dB\n", r.T21(), r.T12(), r.isolation_db());
    std::printf("g2_21(0) = %.6e   g2_12(0) = %.6e\n", *r.port21->g2_zero, *r.port12->g2_zero);
    std::printf("n_L = %.3e   n_R = %.3e   residuals %.1e / %.1e\n", r.n_L(), r.n_R(), r.port21->residual,
                r.port12->residual);

    const auto predictions = prediction_set(resonance_detunings(4));
    const auto [nearest, distance] = nearest_prediction(predictions, x);
    std::printf("nearest dressed resonance: Delta = %+.4f G (%.4f G away)\n", nearest, distance);
    return 0;
}

// Copyright 2026 The fockqubit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Walk-through of one heralded qubit from source to tomography:
//
//   1. seeded two-mode squeezing and a click on the idler detector,
//   2. signal-channel loss and the coherence factor,
//   3. 10^5 homodyne samples with a uniform phase scan,
//   4. maximum-likelihood reconstruction, Wigner function and efficiency,
//   5. a model fit of the coherence factor to the theory curve.
//
// Usage: heralded_qubit_demo [seed_fraction] [rng_seed]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "fockqubit/fockqubit.hpp"

using namespace fockqubit;

namespace {

void print_qubit(const char *label, const DensityMatrix &rho) {
    std::printf("  %-26s rho00 %.4f  rho11 %.4f  rho01 %+.4f%+.4fi  efficiency %.4f\n", label,
                rho(0, 0).real(), rho(1, 1).real(), rho(0, 1).real(), rho(0, 1).imag(), generalized_efficiency(rho));
}

}  // namespace

int main(int argc, char **argv) {
    try {
        const double seed_fraction = argc > 1 ? std::stod(argv[1]) : 0.24;
        const std::uint64_t rng_seed = argc > 2 ? std::stoull(argv[2]) : 1;
        const int dim = kDefaultDim;

        ModelParams params;  // fitted operating point
        const double added = added_rate_for_seed_fraction(seed_fraction, params.base_count_rate);
        params.alpha = seed_amplitude_for_added_rate(added, params);
        std::printf("source: r %.3f, |alpha| %.4f, seed adds %.1f kHz (%.0f%% of clicks)\n", params.r,
                    std::abs(params.alpha), added / 1e3, 100.0 * seed_fraction);

        // 1. Exact evolution and heralding.
        const auto evolved = evolve_two_mode_state(params, dim);
        const auto heralded = herald(DensityMatrix::from_pure(evolved.state), params.eta_idler);
        std::printf("herald probability %.5f per pulse (first order: %.5f), truncation leakage %.2e\n",
                    heralded.herald_probability, params.eta_idler * first_order_pr_count(params), evolved.leakage);
        print_qubit("heralded:", heralded.signal_state);
        print_qubit("first-order qubit:", DensityMatrix::from_pure(first_order_qubit(params, dim)));

        // 2. Channels.
        const auto lossy = apply_loss(heralded.signal_state, params.eta_signal);
        const auto state = apply_coherence_factor(lossy, params.coherence_factor);
        print_qubit("after loss:", lossy);
        print_qubit("after coherence factor:", state);

        // 3. Homodyne record.
        const auto samples = sample_quadratures(state, PhaseSchedule::uniform_scan(), 100000, rng_seed);
        std::printf("sampled %zu quadratures (seed %llu)\n", samples.size(), static_cast<unsigned long long>(rng_seed));

        // 4. Tomography.
        const auto report = maxlik_reconstruct(samples, 6);
        std::printf("reconstruction: %d iterations, converged %s, log-likelihood %.3f, fidelity %.5f\n",
                    report.iterations_run, report.converged ? "yes" : "no", report.loglik_trace.back(),
                    fidelity(embed(report.rho, dim), state));
        print_qubit("reconstructed:", report.rho);
        const auto grid = wigner(report.rho);
        std::printf("Wigner: W(0,0) model %.5f, reconstructed %.5f; grid integral %.5f\n", wigner_at(state, 0.0, 0.0),
                    wigner_at(report.rho, 0.0, 0.0), grid.integral());

        // 5. Theory curve and fit.
        const std::vector<double> rates{25.0, 50.0, 105.78947368421052, 200.0, 335.0, 450.0};
        const auto curve = theory_curves(params, rates, SourceModel::exact, true);
        std::printf("\n%12s %10s %10s %10s\n", "added_kHz", "rho11", "|rho01|", "efficiency");
        for (const auto &p : curve) {
            std::printf("%12.3f %10.5f %10.5f %10.5f\n", p.added_rate_khz, p.rho11, p.rho01_mag, p.efficiency);
        }
        ModelParams guess = params;
        guess.coherence_factor = 1.0;
        const auto fit = fit_model(curve, {FitParameter::coherence_factor}, guess);
        std::printf("fitted coherence factor %.5f (generated with %.2f) after %d iterations\n",
                    fit.params.coherence_factor, params.coherence_factor, fit.iterations);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

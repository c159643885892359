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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit status if
// any criterion fails. Each check compares the library against closed-form
// values or the independent oracles in oracles.hpp.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fockqubit/pipeline.hpp"
#include "oracles.hpp"

using namespace fockqubit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char *format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof(buffer), format, args...);
    return buffer;
}

int failures = 0;

void criterion(int id, const std::string &title, double budget_s, const std::function<Outcome()> &body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = body();
    } catch (const std::exception &e) {
        outcome.pass = false;
        outcome.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0.0 && elapsed > budget_s) {
        outcome.require(false, fmt("runtime %.1fs exceeds %.0fs", elapsed, budget_s));
    }
    if (!outcome.pass) ++failures;
    std::printf("%s [%2d] %s (%.1fs): %s\n", outcome.pass ? "PASS" : "FAIL", id, title.c_str(), elapsed,
                outcome.detail.c_str());
    std::fflush(stdout);
}

// Note: Outcome::detail doubles as the measurement log on success.
void note(Outcome &o, const std::string &text) {
    if (o.pass) o.detail += (o.detail.empty() ? "" : "; ") + text;
}

std::vector<double> rate_grid() { return {0.0, 25.0, 50.0, 105.78947368421052, 150.0, 200.0, 250.0, 335.0, 450.0}; }

}  // namespace

int main() {
    criterion(1, "heralded Fock point: model and closed-loop reconstruction", 120.0, [] {
        Outcome o;
        const ModelParams params;  // alpha = 0
        const auto model = modeled_signal_state(params, SourceModel::exact, kDefaultDim, true);
        const double rho11 = model.population(1);
        o.require(rho11 >= 0.44 && rho11 <= 0.50, fmt("model rho11 %.6f outside [0.44, 0.50]", rho11));
        std::vector<double> estimates;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto samples = sample_quadratures(model, PhaseSchedule::uniform_scan(), 100000, seed);
            const double est = maxlik_reconstruct(samples, kDefaultDim).rho.population(1);
            estimates.push_back(est);
            o.require(est >= 0.44 && est <= 0.50, fmt("seed %d rho11 %.5f outside bracket", int(seed), est));
            o.require(std::abs(est - rho11) <= 0.01, fmt("seed %d rho11 %.5f off model by > 0.01", int(seed), est));
        }
        double mean = 0.0;
        for (double e : estimates) mean += e / estimates.size();
        double var = 0.0;
        for (double e : estimates) var += (e - mean) * (e - mean) / (estimates.size() - 1);
        o.require(std::sqrt(var) <= 0.01, fmt("seed spread %.5f > 0.01", std::sqrt(var)));
        note(o, fmt("model rho11 %.5f, reconstructed mean %.5f, sd %.5f, range [%.5f, %.5f]", rho11, mean,
                    std::sqrt(var), *std::min_element(estimates.begin(), estimates.end()),
                    *std::max_element(estimates.begin(), estimates.end())));
        return o;
    });

    criterion(2, "qubit point: generalized efficiency at 24% seed clicks", 0.0, [] {
        Outcome o;
        ModelParams params;
        const double added = added_rate_for_seed_fraction(0.24, params.base_count_rate);
        params.alpha = seed_amplitude_for_added_rate(added, params);
        const double fraction = seed_to_count_rate(params).seed_fraction();
        const auto state = modeled_signal_state(params, SourceModel::exact, kDefaultDim, true);
        const double eff = generalized_efficiency(state);
        o.require(std::abs(fraction - 0.24) < 1e-12, fmt("seed fraction %.6f", fraction));
        o.require(eff >= 0.41 && eff <= 0.51, fmt("efficiency %.5f outside [0.41, 0.51]", eff));
        note(o, fmt("|alpha| %.5f, added %.3f kHz, efficiency %.5f", std::abs(params.alpha), added / 1e3, eff));
        return o;
    });

    criterion(3, "first-order click probability vs exact heralding", 10.0, [] {
        Outcome o;
        ModelParams params;
        params.eta_idler = 0.10;
        const TwoModeSqueezer squeezer(params.r, 12);
        double worst_ratio = 0.0;
        for (int k = 0; k <= 30; ++k) {
            params.alpha = 0.01 * k;
            const auto evolved = evolve_seeded(squeezer, params.alpha);
            const double exact = herald(DensityMatrix::from_pure(evolved.state), params.eta_idler).herald_probability /
                                 params.eta_idler;
            const double approx = first_order_pr_count(params);
            const double scale = std::norm(params.alpha) + params.r * params.r;
            const double deviation = std::abs(approx - exact) / exact;
            worst_ratio = std::max(worst_ratio, deviation / (3.0 * scale));
            o.require(deviation <= 3.0 * scale, fmt("|alpha| %.2f: deviation %.4g > %.4g", 0.01 * k, deviation,
                                                    3.0 * scale));
        }
        note(o, fmt("31 points, worst deviation / bound = %.3f", worst_ratio));
        return o;
    });

    criterion(4, "efficiency scales linearly with loss", 0.0, [] {
        Outcome o;
        std::mt19937_64 rng(4);
        double worst = 0.0;
        for (int s = 0; s < 1000; ++s) {
            const auto rho = embed(oracle::random_density(2, rng), 4);
            const double base = generalized_efficiency(rho);
            for (int t = 1; t <= 10; ++t) {
                const double T = 0.1 * t - 0.05 * (t == 10 ? 0 : 1);  // 0.05, 0.15, ..., 0.85, 1.0
                const double err = std::abs(generalized_efficiency(apply_loss(rho, T)) - T * base);
                worst = std::max(worst, err);
            }
        }
        o.require(worst <= 1e-9, fmt("max deviation %.3g", worst));
        note(o, fmt("1000 states x 10 T, max deviation %.3g", worst));
        return o;
    });

    criterion(5, "maximum likelihood: monotone ascent and qubit fidelity", 300.0, [] {
        Outcome o;
        std::mt19937_64 rng(5);
        double worst_fidelity = 1.0;
        double worst_drop = 0.0;
        for (int seed = 0; seed < 10; ++seed) {
            const auto truth = embed(oracle::random_density(2, rng, -1, 1 + seed % 2), 6);
            const auto samples = sample_quadratures(truth, PhaseSchedule::uniform_scan(), 100000, 500 + seed);
            const auto report = maxlik_reconstruct(samples, 6);
            for (std::size_t k = 1; k < report.loglik_trace.size(); ++k) {
                const double drop = report.loglik_trace[k - 1] - report.loglik_trace[k];
                worst_drop = std::max(worst_drop, drop);
            }
            worst_fidelity = std::min(worst_fidelity, fidelity(report.rho, truth));
        }
        o.require(worst_drop <= 1e-9, fmt("log-likelihood decreased by %.3g", worst_drop));
        o.require(worst_fidelity >= 0.99, fmt("fidelity %.5f < 0.99", worst_fidelity));
        note(o, fmt("10 seeds at dim 6, min fidelity %.5f, largest step decrease %.3g", worst_fidelity,
                    worst_drop));
        return o;
    });

    criterion(6, "loss channel vs beamsplitter oracle, semigroup", 0.0, [] {
        Outcome o;
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double oracle_err = 0.0;
        double semigroup_err = 0.0;
        for (int dim = 2; dim <= 8; ++dim) {
            for (int trial = 0; trial < 5; ++trial) {
                const auto rho = oracle::random_density(dim, rng);
                const double t1 = unit(rng);
                const double t2 = unit(rng);
                oracle_err = std::max(oracle_err, (apply_loss(rho, t1).matrix() - oracle::beamsplitter_loss(rho, t1))
                                                      .cwiseAbs()
                                                      .maxCoeff());
                semigroup_err = std::max(
                    semigroup_err,
                    (apply_loss(apply_loss(rho, t1), t2).matrix() - apply_loss(rho, t1 * t2).matrix()).cwiseAbs().maxCoeff());
            }
        }
        o.require(oracle_err <= 1e-10, fmt("oracle deviation %.3g", oracle_err));
        o.require(semigroup_err <= 1e-10, fmt("semigroup deviation %.3g", semigroup_err));
        note(o, fmt("dims 2..8, oracle %.3g, semigroup %.3g", oracle_err, semigroup_err));
        return o;
    });

    criterion(7, "Wigner anchors and normalization", 0.0, [] {
        Outcome o;
        const auto vac = DensityMatrix::from_pure(FockVector::basis(0, 6));
        const auto one = DensityMatrix::from_pure(FockVector::basis(1, 6));
        const double w0 = wigner_at(vac, 0.0, 0.0);
        const double w1 = wigner_at(one, 0.0, 0.0);
        o.require(std::abs(w0 - 1.0 / std::numbers::pi) <= 1e-6, fmt("vacuum W(0,0) %.9f", w0));
        o.require(std::abs(w1 + 1.0 / std::numbers::pi) <= 1e-6, fmt("single photon W(0,0) %.9f", w1));
        ModelParams params;
        params.alpha = 0.12;
        double worst = 0.0;
        for (const auto &rho : {vac, one, modeled_signal_state(params, SourceModel::exact, kDefaultDim, true)}) {
            worst = std::max(worst, std::abs(wigner(rho).integral() - 1.0));
        }
        o.require(worst <= 1e-3, fmt("grid integral off by %.3g", worst));
        note(o, fmt("W0(0,0) %.8f, W1(0,0) %.8f, max |integral - 1| %.2g", w0, w1, worst));
        return o;
    });

    criterion(8, "coherence factor scales |rho01| by 0.81", 0.0, [] {
        Outcome o;
        const ModelParams params;
        double worst = 0.0;
        for (auto model : {SourceModel::exact, SourceModel::first_order}) {
            const auto with = theory_curves(params, rate_grid(), model, true);
            const auto without = theory_curves(params, rate_grid(), model, false);
            for (std::size_t k = 0; k < with.size(); ++k) {
                if (without[k].rho01_mag == 0.0) {
                    o.require(with[k].rho01_mag == 0.0, "non-zero coherence at zero seed");
                    continue;
                }
                worst = std::max(worst, std::abs(with[k].rho01_mag / without[k].rho01_mag - 0.81));
            }
        }
        o.require(worst <= 1e-12, fmt("ratio off by %.3g", worst));
        note(o, fmt("%zu rates x 2 models, max |ratio - 0.81| %.2g", rate_grid().size(), worst));
        return o;
    });

    criterion(9, "model fit recovers r and coherence factor", 0.0, [] {
        Outcome o;
        const ModelParams truth;
        ModelParams init = truth;
        init.r = 0.27;
        init.coherence_factor = 0.95;
        const FitMask mask{FitParameter::r, FitParameter::coherence_factor};
        auto data = theory_curves(truth, rate_grid(), SourceModel::exact, true);
        const auto clean = fit_model(data, mask, init);
        // Same fit with reconstruction-scale noise (sigma 0.004 per metric). At a
        // fixed added rate the state depends on r mostly through |alpha| / r, which
        // the rate calibration pins, so only c is expected to survive the noise.
        std::mt19937_64 rng(9);
        std::normal_distribution<double> noise(0.0, 0.004);
        for (auto &p : data) {
            p.rho11 += noise(rng);
            p.rho01_mag = std::max(0.0, p.rho01_mag + noise(rng));
        }
        const auto noisy = fit_model(data, mask, init);
        o.require(std::abs(clean.params.r - truth.r) <= 0.02 * truth.r, fmt("r %.5f not within 2%%", clean.params.r));
        for (const auto *fit : {&clean, &noisy}) {
            const double c = fit->params.coherence_factor;
            o.require(std::abs(c - truth.coherence_factor) <= 0.02, fmt("c %.5f not within 0.02", c));
        }
        note(o, fmt("noiseless r %.5f c %.5f; noisy r %.5f c %.5f", clean.params.r, clean.params.coherence_factor,
                    noisy.params.r, noisy.params.coherence_factor));
        return o;
    });

    criterion(10, "identical configs give byte-identical outputs", 0.0, [] {
        Outcome o;
        const fs::path base = fs::temp_directory_path() / "fockqubit_acceptance";
        fs::remove_all(base);
        PipelineConfig config;
        config.dim = 8;
        config.reconstruction_dim = 6;
        config.n_samples = 5000;
        config.grid = {0.0, 105.78947368421052, 335.0};
        config.seed = 10;
        std::vector<fs::path> roots{base / "a", base / "b"};
        for (const auto &root : roots) {
            config.output_dir = root.string();
            run_pipeline(config);
        }
        std::size_t files = 0;
        const auto read = [](const fs::path &p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream s;
            s << in.rdbuf();
            return s.str();
        };
        for (const auto &entry : fs::recursive_directory_iterator(roots[0])) {
            if (!entry.is_regular_file()) continue;
            const fs::path rel = fs::relative(entry.path(), roots[0]);
            const fs::path twin = roots[1] / rel;
            if (rel == "manifest.json") {
                // The manifest echoes output_dir; everything else must match.
                auto a = load_manifest(entry.path().string());
                auto b = load_manifest(twin.string());
                a["config"]["run"].erase("output_dir");
                b["config"]["run"].erase("output_dir");
                o.require(a == b, "manifests differ beyond output_dir");
            } else {
                o.require(fs::exists(twin) && read(entry.path()) == read(twin), "differs: " + rel.string());
            }
            ++files;
        }
        o.require(files >= 20, fmt("only %zu files written", files));
        note(o, fmt("%zu files compared byte for byte", files));
        fs::remove_all(base);
        return o;
    });

    std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}

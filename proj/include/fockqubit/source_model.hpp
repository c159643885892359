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

#pragma once

// Seeded two-mode squeezing followed by on/off photon detection on the idler.
//
// The interaction generator is r (a_i a_s + a_i^dag a_s^dag) with r = gamma t / hbar,
// applied as exp(-i r (...)) to |alpha>_idler |0>_signal. To first order the
// output is |0,0> + alpha|1,0> - i r |1,1>, and a click on the idler leaves
// the signal in alpha|0> - i r|1>.

#include <cmath>
#include <complex>
#include <string>

#include "fockqubit/fock_core.hpp"

namespace fockqubit {

/// Fitted physical parameters of the source and the two detection channels.
struct ModelParams {
    double r = 0.22;                    ///< squeezing strength gamma t / hbar
    Complex alpha{0.0, 0.0};            ///< seed amplitude in the idler input
    double eta_signal = 0.49;           ///< signal-channel transmissivity
    double eta_idler = 0.10;            ///< idler-channel (detector) efficiency
    double coherence_factor = 0.81;     ///< multiplier on rho_01
    double base_count_rate = 335000.0;  ///< idler counts per second at alpha = 0

    void validate() const {
        if (!(r >= 0.0) || !(r < 0.5)) {
            throw Error(ErrorCode::invalid_parameter, "r must lie in [0, 0.5)");
        }
        if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
            throw Error(ErrorCode::invalid_parameter, "alpha must be finite");
        }
        if (!(eta_signal > 0.0 && eta_signal <= 1.0)) {
            throw Error(ErrorCode::invalid_parameter, "eta_signal must lie in (0, 1]");
        }
        if (!(eta_idler > 0.0 && eta_idler <= 1.0)) {
            throw Error(ErrorCode::invalid_parameter, "eta_idler must lie in (0, 1]");
        }
        if (!(coherence_factor >= 0.0 && coherence_factor <= 1.0)) {
            throw Error(ErrorCode::invalid_parameter, "coherence_factor must lie in [0, 1]");
        }
        if (!(base_count_rate >= 0.0) || !std::isfinite(base_count_rate)) {
            throw Error(ErrorCode::invalid_parameter, "base_count_rate must be finite and >= 0");
        }
    }
};

/// Normalized conditional signal state and the probability of the click.
struct HeraldOutcome {
    DensityMatrix signal_state;
    double herald_probability;
};

/// Heralded signal state to first order: alpha|0> - i r|1>, normalized.
inline FockVector first_order_qubit(const ModelParams &params, int dim = kDefaultDim) {
    params.validate();
    if (params.alpha == Complex{0.0, 0.0} && params.r == 0.0) {
        throw Error(ErrorCode::undefined_state, "alpha = 0 and r = 0 leave nothing to herald");
    }
    ComplexVector v = ComplexVector::Zero(dim);
    v(0) = params.alpha;
    v(1) = -kI * params.r;
    return FockVector(dim, std::move(v)).normalized();
}

/// First-order click probability |alpha|^2 + r^2 (unit detector efficiency).
inline double first_order_pr_count(const ModelParams &params) {
    params.validate();
    return std::norm(params.alpha) + params.r * params.r;
}

/// Weight of the pure two-mode state in the top two Fock levels of either mode.
inline double truncation_leakage(const FockVector &psi) {
    if (psi.modes() != 2) {
        throw Error(ErrorCode::invalid_mode, "truncation_leakage expects a two-mode state");
    }
    const int dim = psi.dim();
    double leak = 0.0;
    for (int i = 0; i < dim; ++i) {
        for (int s = 0; s < dim; ++s) {
            if (i >= dim - 2 || s >= dim - 2) {
                leak += std::norm(psi.amplitude(i, s));
            }
        }
    }
    return leak;
}

/// Propagator exp(-i r (a_i a_s + h.c.)) on the truncated two-mode space,
/// diagonalized once so that many seed amplitudes can share it.
class TwoModeSqueezer {
   public:
    TwoModeSqueezer(double r, int dim) : r_(r), dim_(dim) {
        if (dim < 6) {
            throw Error(ErrorCode::invalid_dimension, "two-mode evolution needs dim >= 6");
        }
        if (!(r >= 0.0) || !(r < 0.5)) {
            throw Error(ErrorCode::invalid_parameter, "r must lie in [0, 0.5)");
        }
        const ComplexMatrix a = annihilation(dim).matrix();
        const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
        ComplexMatrix pair(n, n);
        // kron(a, a): idler-major, so the idler factor is the outer block index.
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                pair.block(static_cast<Eigen::Index>(i) * dim, static_cast<Eigen::Index>(j) * dim, dim, dim) =
                    a(i, j) * a;
            }
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(r * (pair + pair.adjoint()));
        const ComplexVector phases = (-kI * solver.eigenvalues().cast<Complex>()).array().exp();
        propagator_ = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    }

    double r() const noexcept { return r_; }
    int dim() const noexcept { return dim_; }
    const ComplexMatrix &propagator() const noexcept { return propagator_; }

    FockVector evolve(const FockVector &input) const {
        if (input.modes() != 2 || input.dim() != dim_) {
            throw Error(ErrorCode::dimension_mismatch, "input must be a two-mode state of matching dim");
        }
        return FockVector(dim_, propagator_ * input.amplitudes(), 2);
    }

   private:
    double r_;
    int dim_;
    ComplexMatrix propagator_;
};

inline constexpr double kMaxEvolutionLeakage = 1e-6;

struct TwoModeEvolution {
    FockVector state;
    double leakage;
};

/// Evolve |alpha>_idler |0>_signal; throws truncation_overflow when the
/// weight in the top two levels of either mode reaches 1e-6.
inline TwoModeEvolution evolve_seeded(const TwoModeSqueezer &squeezer, Complex alpha) {
    const int dim = squeezer.dim();
    const FockVector state =
        squeezer.evolve(tensor(coherent_state(alpha, dim), FockVector::basis(0, dim))).normalized();
    const double leakage = truncation_leakage(state);
    if (leakage >= kMaxEvolutionLeakage) {
        throw Error(ErrorCode::truncation_overflow,
                    "evolution leaks " + std::to_string(leakage) + " into the top Fock levels; increase dim");
    }
    return {state, leakage};
}

/// Exact exp(-i r (a_i a_s + h.c.)) |alpha, 0> on the truncated two-mode space.
inline TwoModeEvolution evolve_two_mode_state(const ModelParams &params, int dim = kDefaultDim) {
    params.validate();
    return evolve_seeded(TwoModeSqueezer(params.r, dim), params.alpha);
}

inline DensityMatrix evolve_two_mode(const ModelParams &params, int dim = kDefaultDim) {
    return DensityMatrix::from_pure(evolve_two_mode_state(params, dim).state);
}

/// Click probability of an on/off detector with efficiency eta given n photons.
inline double click_probability(int photons, double eta) { return 1.0 - std::pow(1.0 - eta, photons); }

inline constexpr double kMinHeraldProbability = 1e-15;

/// Condition the signal mode on a click of an on/off idler detector with
/// efficiency eta: POVM element sum_n (1 - (1-eta)^n) |n><n| on the idler.
inline HeraldOutcome herald(const DensityMatrix &rho, double eta_idler) {
    if (rho.modes() != 2) {
        throw Error(ErrorCode::invalid_mode, "herald expects a two-mode state");
    }
    if (!(eta_idler > 0.0 && eta_idler <= 1.0)) {
        throw Error(ErrorCode::invalid_parameter, "eta_idler must lie in (0, 1]");
    }
    const int dim = rho.dim();
    ComplexMatrix conditional = ComplexMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        const Eigen::Index offset = static_cast<Eigen::Index>(n) * dim;
        conditional += click_probability(n, eta_idler) * rho.matrix().block(offset, offset, dim, dim);
    }
    const double probability = conditional.trace().real();
    if (!(probability >= kMinHeraldProbability)) {
        throw Error(ErrorCode::no_herald, "herald probability is zero");
    }
    return {DensityMatrix(dim, 1, conditional / probability), probability};
}

struct CountRates {
    double added;  ///< counts per second contributed by the seed
    double total;  ///< base + added

    double seed_fraction() const { return total > 0.0 ? added / total : 0.0; }
};

/// First-order rate bookkeeping: rates are proportional to the two terms of
/// |alpha|^2 + r^2, so the seed adds base * |alpha|^2 / r^2.
inline CountRates seed_to_count_rate(const ModelParams &params) {
    params.validate();
    if (params.r == 0.0) {
        throw Error(ErrorCode::domain, "count-rate calibration requires r > 0");
    }
    const double added = params.base_count_rate * std::norm(params.alpha) / (params.r * params.r);
    return {added, params.base_count_rate + added};
}

/// Inverse of seed_to_count_rate: |alpha| producing the given added rate.
inline double seed_amplitude_for_added_rate(double added_rate, const ModelParams &params) {
    if (!(added_rate >= 0.0) || !std::isfinite(added_rate)) {
        throw Error(ErrorCode::domain, "added rate must be finite and >= 0");
    }
    if (params.r == 0.0 || params.base_count_rate <= 0.0) {
        throw Error(ErrorCode::domain, "rate inversion requires r > 0 and a positive base rate");
    }
    return params.r * std::sqrt(added_rate / params.base_count_rate);
}

/// Added rate at which a fraction f of the clicks comes from the seed.
inline double added_rate_for_seed_fraction(double fraction, double base_count_rate) {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw Error(ErrorCode::domain, "seed fraction must lie in [0, 1)");
    }
    return base_count_rate * fraction / (1.0 - fraction);
}

enum class SourceModel { first_order, exact };

inline std::string to_string(SourceModel model) { return model == SourceModel::exact ? "exact" : "first-order"; }

inline SourceModel parse_source_model(const std::string &text) {
    if (text == "exact") return SourceModel::exact;
    if (text == "first-order" || text == "first_order") return SourceModel::first_order;
    throw Error(ErrorCode::config, "unknown model '" + text + "' (expected exact or first-order)");
}

/// Normalized heralded signal state before any signal-channel loss.
inline DensityMatrix heralded_signal_state(const ModelParams &params, SourceModel model, int dim = kDefaultDim) {
    if (model == SourceModel::first_order) {
        return DensityMatrix::from_pure(first_order_qubit(params, dim));
    }
    return herald(evolve_two_mode(params, dim), params.eta_idler).signal_state;
}

}  // namespace fockqubit

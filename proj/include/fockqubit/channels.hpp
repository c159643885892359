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

#include <cmath>
#include <vector>

#include "fockqubit/fock_core.hpp"

namespace fockqubit {

/// Beamsplitter loss of transmissivity T.
class LossChannel {
   public:
    explicit LossChannel(double transmissivity) : transmissivity_(transmissivity) {
        if (!(transmissivity > 0.0 && transmissivity <= 1.0)) {
            throw Error(ErrorCode::invalid_parameter, "transmissivity must lie in (0, 1]");
        }
    }

    double transmissivity() const noexcept { return transmissivity_; }

    /// Kraus operators A_k = sum_n sqrt(C(n,k) T^(n-k) (1-T)^k) |n-k><n|, k = 0..dim-1.
    std::vector<ComplexMatrix> kraus_operators(int dim) const {
        detail::require_dim(dim);
        const double t = transmissivity_;
        std::vector<ComplexMatrix> ops;
        ops.reserve(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k) {
            ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
            for (int n = k; n < dim; ++n) {
                const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
                const double weight = std::exp(log_binom) * std::pow(t, n - k) * std::pow(1.0 - t, k);
                a(n - k, n) = std::sqrt(weight);
            }
            ops.push_back(std::move(a));
        }
        return ops;
    }

    DensityMatrix apply(const DensityMatrix &rho) const {
        if (rho.modes() != 1) {
            throw Error(ErrorCode::invalid_mode, "loss acts on single-mode states");
        }
        if (transmissivity_ == 1.0) {
            return rho;
        }
        ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
        for (const auto &a : kraus_operators(rho.dim())) {
            out.noalias() += a * rho.matrix() * a.adjoint();
        }
        return DensityMatrix(rho.dim(), 1, std::move(out));
    }

   private:
    double transmissivity_;
};

inline DensityMatrix apply_loss(const DensityMatrix &rho, double transmissivity) {
    return LossChannel(transmissivity).apply(rho);
}

/// Scales rho_01 and rho_10 by c; every other element is untouched.
inline DensityMatrix apply_coherence_factor(const DensityMatrix &rho, double c) {
    if (!(c >= 0.0 && c <= 1.0)) {
        throw Error(ErrorCode::invalid_parameter, "coherence factor must lie in [0, 1]");
    }
    if (rho.modes() != 1) {
        throw Error(ErrorCode::invalid_mode, "coherence factor acts on single-mode states");
    }
    ComplexMatrix m = rho.matrix();
    m(0, 1) *= c;
    m(1, 0) *= c;
    return DensityMatrix(rho.dim(), 1, std::move(m));
}

}  // namespace fockqubit

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

#include "fockqubit/fock_core.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace fockqubit;

TEST(fock_core, annihilation_entries) {
    const auto a2 = annihilation(2);
    EXPECT_EQ(a2(0, 0), Complex(0.0));
    EXPECT_EQ(a2(0, 1), Complex(1.0));
    EXPECT_EQ(a2(1, 0), Complex(0.0));
    EXPECT_EQ(a2(1, 1), Complex(0.0));

    const auto a3 = annihilation(3);
    EXPECT_NEAR(a3(1, 2).real(), 1.41421356, 1e-8);
    for (int n = 1; n < 3; ++n) {
        for (int r = 0; r < 3; ++r) {
            if (r != n - 1) EXPECT_EQ(a3(r, n), Complex(0.0));
        }
    }
}

TEST(fock_core, annihilation_kills_vacuum) {
    const auto out = annihilation(6).apply(FockVector::basis(0, 6));
    EXPECT_EQ(out.norm(), 0.0);
}

TEST(fock_core, annihilation_rejects_small_dim) {
    try {
        annihilation(1);
        FAIL() << "expected invalid-dimension";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_dimension);
    }
}

TEST(fock_core, commutator_is_identity_below_truncation_edge) {
    for (int dim : {4, 6, 10}) {
        const ComplexMatrix a = annihilation(dim).matrix();
        const ComplexMatrix comm = a * a.adjoint() - a.adjoint() * a;
        const int keep = dim - 2;
        const ComplexMatrix diff = comm.topLeftCorner(keep, keep) - ComplexMatrix::Identity(keep, keep);
        EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-12) << "dim " << dim;
    }
}

TEST(fock_core, coherent_state_vacuum_and_ratio) {
    const auto vac = coherent_state(0.0, 10);
    EXPECT_EQ(vac[0], Complex(1.0));
    for (int n = 1; n < 10; ++n) EXPECT_EQ(vac[n], Complex(0.0));

    const auto c = coherent_state(0.1, 10);
    EXPECT_NEAR(std::abs(c[0] / c[1]), 10.0, 1e-12);
    EXPECT_NEAR(c.norm(), 1.0, 1e-12);
}

TEST(fock_core, coherent_state_mean_photon_number_at_qubit_point) {
    const double alpha = 0.56 * 0.22;
    const auto c = coherent_state(alpha, 10);
    double mean = 0.0;
    for (int n = 0; n < 10; ++n) mean += n * std::norm(c[n]);
    // (0.56 * 0.22)^2 = 0.01517824
    EXPECT_NEAR(mean, 0.01517824, 1e-6);
    EXPECT_NEAR(mean, alpha * alpha, 1e-12);
}

TEST(fock_core, coherent_state_tail_overflow) {
    try {
        coherent_state(2.0, 6);
        FAIL() << "expected truncation-overflow";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::truncation_overflow);
    }
    EXPECT_NO_THROW(coherent_state(Complex(0.3, 0.2), 10));
}

TEST(fock_core, tensor_ordering_is_idler_major) {
    const auto v00 = tensor(FockVector::basis(0, 4), FockVector::basis(0, 4));
    EXPECT_EQ(v00[0], Complex(1.0));
    const auto v10 = tensor(FockVector::basis(1, 4), FockVector::basis(0, 4));
    EXPECT_EQ(v10[joint_index(1, 0, 4)], Complex(1.0));
    EXPECT_EQ(joint_index(1, 0, 4), 4);
    EXPECT_EQ(v10.amplitude(1, 0), Complex(1.0));
    EXPECT_EQ(v10.amplitude(0, 1), Complex(0.0));
}

TEST(fock_core, tensor_rejects_mismatched_dims) {
    try {
        tensor(FockVector::basis(0, 4), FockVector::basis(0, 5));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
    }
    const auto two = tensor(FockVector::basis(0, 4), FockVector::basis(0, 4));
    EXPECT_THROW(tensor(two, FockVector::basis(0, 4)), Error);
}

TEST(fock_core, partial_trace_examples) {
    const int d = 5;
    const auto vac = DensityMatrix::from_pure(FockVector::basis(0, 0, d));
    const auto kept = partial_trace(vac, Mode::signal);
    EXPECT_EQ(kept(0, 0), Complex(1.0));
    EXPECT_NEAR(kept.trace(), 1.0, 1e-15);

    ComplexVector bell = ComplexVector::Zero(d * d);
    bell(joint_index(0, 0, d)) = 1.0 / std::sqrt(2.0);
    bell(joint_index(1, 1, d)) = 1.0 / std::sqrt(2.0);
    const auto reduced = partial_trace(DensityMatrix::from_pure(FockVector(d, bell, 2)), Mode::signal);
    ComplexMatrix expected = ComplexMatrix::Zero(d, d);
    expected(0, 0) = 0.5;
    expected(1, 1) = 0.5;
    EXPECT_LT((reduced.matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(fock_core, partial_trace_requires_two_modes) {
    try {
        partial_trace(DensityMatrix::maximally_mixed(3), Mode::signal);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_mode);
    }
    const auto two = DensityMatrix::from_pure(FockVector::basis(0, 0, 3));
    EXPECT_THROW(partial_trace(two, static_cast<Mode>(7)), Error);
}

TEST(fock_core, partial_trace_matches_index_contraction) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 5;
        // Entangled (non-product) two-mode state.
        ComplexMatrix g = ComplexMatrix::Random(d * d, 3);
        ComplexMatrix m = g * g.adjoint();
        m /= m.trace();
        const DensityMatrix rho(d, 2, m);
        for (Mode keep : {Mode::idler, Mode::signal}) {
            const auto fast = partial_trace(rho, keep);
            EXPECT_LT((fast.matrix() - oracle::brute_partial_trace(rho, keep)).cwiseAbs().maxCoeff(), 1e-13);
            EXPECT_NEAR(fast.trace(), rho.trace(), 1e-12);
        }
    }
}

TEST(fock_core, tensor_partial_trace_round_trip_property) {
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 5);
        const auto a = oracle::random_density(d, rng);
        const auto b = oracle::random_density(d, rng);
        const auto joint = tensor(a, b);
        EXPECT_LT((partial_trace(joint, Mode::idler).matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((partial_trace(joint, Mode::signal).matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NO_THROW(joint.check_physical());

        const auto u = oracle::random_vector(d, rng);
        const auto v = oracle::random_vector(d, rng);
        const auto pure = DensityMatrix::from_pure(tensor(u, v));
        EXPECT_LT((partial_trace(pure, Mode::idler).matrix() - DensityMatrix::from_pure(u).matrix())
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-12);
    }
}

TEST(fock_core, fidelity_examples) {
    std::mt19937_64 rng(5);
    const auto rho = oracle::random_density(6, rng);
    EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-9);

    const auto zero = DensityMatrix::from_pure(FockVector::basis(0, 2));
    const auto one = DensityMatrix::from_pure(FockVector::basis(1, 2));
    EXPECT_NEAR(fidelity(zero, one), 0.0, 1e-12);

    const std::vector<double> half{0.5, 0.5};
    EXPECT_NEAR(fidelity(zero, DensityMatrix::diagonal(half, 2)), 0.5, 1e-12);
}

TEST(fock_core, fidelity_with_pure_state_is_expectation) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = oracle::random_density(5, rng);
        const auto psi = oracle::random_vector(5, rng);
        const double expectation = psi.amplitudes().dot(rho.matrix() * psi.amplitudes()).real();
        EXPECT_NEAR(fidelity(rho, DensityMatrix::from_pure(psi)), expectation, 1e-9);
    }
}

TEST(fock_core, fidelity_dimension_mismatch) {
    try {
        fidelity(DensityMatrix::maximally_mixed(3), DensityMatrix::maximally_mixed(4));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
    }
}

TEST(fock_core, check_physical_flags_violations) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.2;
    m(1, 1) = -0.2;
    EXPECT_THROW(DensityMatrix(2, 1, m).check_physical(), Error);
    m(1, 1) = 0.0;
    m(0, 0) = 1.0;
    m(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix(2, 1, m).check_physical(), Error);
    m(0, 1) = 0.0;
    EXPECT_NO_THROW(DensityMatrix(2, 1, m).check_physical());
    // Unnormalized conditional states pass when unit trace is not required.
    EXPECT_NO_THROW(DensityMatrix(2, 1, 0.3 * m).check_physical(false));
}

TEST(fock_core, rotate_phase_multiplies_coherences) {
    std::mt19937_64 rng(3);
    const auto rho = oracle::random_density(4, rng);
    const auto rotated = rotate_phase(rho, 0.7);
    EXPECT_NEAR(std::abs(rotated(0, 2) - rho(0, 2) * std::polar(1.0, 1.4)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(rotated(3, 1) - rho(3, 1) * std::polar(1.0, -1.4)), 0.0, 1e-14);
}

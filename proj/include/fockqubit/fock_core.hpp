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

// Truncated Fock-space states and operators for one or two bosonic modes.
//
// Two-mode objects use idler-major ordering: the joint index of
// |n_idler, n_signal> is n_idler * dim + n_signal, so the idler index varies
// slowest. Every module relies on this convention.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fockqubit/error.hpp"

namespace fockqubit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kDefaultDim = 10;
inline constexpr Complex kI{0.0, 1.0};

enum class Mode { idler = 0, signal = 1 };

inline std::string to_string(Mode mode) { return mode == Mode::idler ? "idler" : "signal"; }

inline Eigen::Index joint_index(int n_idler, int n_signal, int dim) {
    return static_cast<Eigen::Index>(n_idler) * dim + n_signal;
}

namespace detail {

inline void require_dim(int dim) {
    if (dim < 2) {
        throw Error(ErrorCode::invalid_dimension, "dim must be >= 2, got " + std::to_string(dim));
    }
}

inline void require_modes(int modes) {
    if (modes != 1 && modes != 2) {
        throw Error(ErrorCode::invalid_mode, "modes must be 1 or 2, got " + std::to_string(modes));
    }
}

inline Eigen::Index space_size(int dim, int modes) {
    return modes == 1 ? dim : static_cast<Eigen::Index>(dim) * dim;
}

}  // namespace detail

/// Pure-state amplitudes over number states of one mode, or of two modes in
/// idler-major order.
class FockVector {
   public:
    FockVector(int dim, ComplexVector amplitudes, int modes = 1)
        : dim_(dim), modes_(modes), amplitudes_(std::move(amplitudes)) {
        detail::require_dim(dim_);
        detail::require_modes(modes_);
        if (amplitudes_.size() != detail::space_size(dim_, modes_)) {
            throw Error(ErrorCode::dimension_mismatch, "amplitude vector length does not match dim^modes");
        }
    }

    static FockVector basis(int n, int dim) {
        detail::require_dim(dim);
        if (n < 0 || n >= dim) {
            throw Error(ErrorCode::invalid_dimension, "number state outside truncation");
        }
        ComplexVector v = ComplexVector::Zero(dim);
        v(n) = 1.0;
        return FockVector(dim, std::move(v));
    }

    static FockVector basis(int n_idler, int n_signal, int dim) {
        detail::require_dim(dim);
        if (n_idler < 0 || n_idler >= dim || n_signal < 0 || n_signal >= dim) {
            throw Error(ErrorCode::invalid_dimension, "number state outside truncation");
        }
        ComplexVector v = ComplexVector::Zero(detail::space_size(dim, 2));
        v(joint_index(n_idler, n_signal, dim)) = 1.0;
        return FockVector(dim, std::move(v), 2);
    }

    int dim() const noexcept { return dim_; }
    int modes() const noexcept { return modes_; }
    Eigen::Index size() const noexcept { return amplitudes_.size(); }
    const ComplexVector &amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](Eigen::Index i) const { return amplitudes_(i); }
    Complex amplitude(int n_idler, int n_signal) const {
        return amplitudes_(joint_index(n_idler, n_signal, dim_));
    }

    double norm() const { return amplitudes_.norm(); }

    FockVector normalized() const {
        const double n = norm();
        if (n == 0.0) {
            throw Error(ErrorCode::undefined_state, "cannot normalize the zero vector");
        }
        return FockVector(dim_, amplitudes_ / n, modes_);
    }

   private:
    int dim_;
    int modes_;
    ComplexVector amplitudes_;
};

/// Density matrix over a Fock basis. Unnormalized instances are allowed
/// (e.g. conditional states before division by the herald probability);
/// check_physical() asserts the full invariant set.
class DensityMatrix {
   public:
    DensityMatrix(int dim, int modes, ComplexMatrix elements)
        : dim_(dim), modes_(modes), elements_(std::move(elements)) {
        detail::require_dim(dim_);
        detail::require_modes(modes_);
        const auto n = detail::space_size(dim_, modes_);
        if (elements_.rows() != n || elements_.cols() != n) {
            throw Error(ErrorCode::dimension_mismatch, "matrix size does not match dim^modes");
        }
    }

    static DensityMatrix from_pure(const FockVector &psi) {
        const ComplexVector &v = psi.amplitudes();
        return DensityMatrix(psi.dim(), psi.modes(), v * v.adjoint());
    }

    /// Single-mode diagonal state; probabilities beyond the list are zero.
    static DensityMatrix diagonal(std::span<const double> probabilities, int dim) {
        detail::require_dim(dim);
        if (static_cast<int>(probabilities.size()) > dim) {
            throw Error(ErrorCode::dimension_mismatch, "more probabilities than Fock levels");
        }
        ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
        for (std::size_t n = 0; n < probabilities.size(); ++n) {
            m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = probabilities[n];
        }
        return DensityMatrix(dim, 1, std::move(m));
    }

    static DensityMatrix maximally_mixed(int dim) {
        detail::require_dim(dim);
        return DensityMatrix(dim, 1, ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
    }

    int dim() const noexcept { return dim_; }
    int modes() const noexcept { return modes_; }
    Eigen::Index size() const noexcept { return elements_.rows(); }
    const ComplexMatrix &matrix() const noexcept { return elements_; }
    Complex operator()(Eigen::Index row, Eigen::Index col) const { return elements_(row, col); }

    double trace() const { return elements_.trace().real(); }

    /// Diagonal element <n|rho|n> of a single-mode matrix.
    double population(int n) const { return elements_(n, n).real(); }

    double mean_photon_number() const {
        if (modes_ != 1) {
            throw Error(ErrorCode::invalid_mode, "mean_photon_number expects a single-mode state");
        }
        double mean = 0.0;
        for (int n = 1; n < dim_; ++n) {
            mean += n * population(n);
        }
        return mean;
    }

    DensityMatrix normalized() const {
        const double t = trace();
        if (!(t > 0.0)) {
            throw Error(ErrorCode::invalid_state, "cannot normalize a matrix with non-positive trace");
        }
        return DensityMatrix(dim_, modes_, elements_ / t);
    }

    double hermiticity_error() const { return (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff(); }

    double min_eigenvalue() const {
        const ComplexMatrix h = 0.5 * (elements_ + elements_.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

    /// Throws invalid_state unless Hermitian, PSD and (optionally) unit trace.
    void check_physical(bool require_unit_trace = true, double hermitian_tol = 1e-10,
                        double eigen_tol = 1e-9, double trace_tol = 1e-10) const {
        if (hermiticity_error() > hermitian_tol) {
            throw Error(ErrorCode::invalid_state, "density matrix is not Hermitian");
        }
        if (min_eigenvalue() < -eigen_tol) {
            throw Error(ErrorCode::invalid_state, "density matrix has a negative eigenvalue");
        }
        if (require_unit_trace && std::abs(trace() - 1.0) > trace_tol) {
            throw Error(ErrorCode::invalid_state, "density matrix trace differs from 1");
        }
    }

   private:
    int dim_;
    int modes_;
    ComplexMatrix elements_;
};

/// Single-mode operator on the truncated space.
class ModeOperator {
   public:
    ModeOperator(int dim, ComplexMatrix elements) : dim_(dim), elements_(std::move(elements)) {
        detail::require_dim(dim_);
        if (elements_.rows() != dim_ || elements_.cols() != dim_) {
            throw Error(ErrorCode::dimension_mismatch, "operator size does not match dim");
        }
    }

    int dim() const noexcept { return dim_; }
    const ComplexMatrix &matrix() const noexcept { return elements_; }
    Complex operator()(Eigen::Index row, Eigen::Index col) const { return elements_(row, col); }

    ModeOperator adjoint() const { return ModeOperator(dim_, elements_.adjoint()); }

    FockVector apply(const FockVector &psi) const {
        if (psi.modes() != 1 || psi.dim() != dim_) {
            throw Error(ErrorCode::dimension_mismatch, "operator and state dimensions differ");
        }
        return FockVector(dim_, elements_ * psi.amplitudes());
    }

   private:
    int dim_;
    ComplexMatrix elements_;
};

/// a|n> = sqrt(n)|n-1>; the a^dagger column for |dim-1> is lost to truncation.
inline ModeOperator annihilation(int dim) {
    detail::require_dim(dim);
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        m(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return ModeOperator(dim, std::move(m));
}

inline ModeOperator creation(int dim) { return annihilation(dim).adjoint(); }

inline ModeOperator number_operator(int dim) {
    detail::require_dim(dim);
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) {
        m(n, n) = static_cast<double>(n);
    }
    return ModeOperator(dim, std::move(m));
}

/// Largest truncated tail weight accepted by coherent_state.
inline constexpr double kCoherentTailTolerance = 1e-8;

/// Coherent state exp(-|a|^2/2) sum a^n/sqrt(n!) |n>, renormalized on the
/// truncated space.
inline FockVector coherent_state(Complex alpha, int dim) {
    detail::require_dim(dim);
    const double mean = std::norm(alpha);
    ComplexVector v(dim);
    Complex term = std::exp(-0.5 * mean);
    v(0) = term;
    for (int n = 1; n < dim; ++n) {
        term *= alpha / std::sqrt(static_cast<double>(n));
        v(n) = term;
    }
    // Sum the discarded tail directly so tiny tails are not lost to cancellation.
    double tail = 0.0;
    double weight = std::norm(term);
    for (int n = dim; n < dim + 400; ++n) {
        weight *= mean / n;
        tail += weight;
        if (weight < 1e-300 || weight < tail * 1e-17) break;
    }
    if (tail > kCoherentTailTolerance) {
        throw Error(ErrorCode::truncation_overflow,
                    "coherent state tail weight " + std::to_string(tail) + " exceeds tolerance; increase dim");
    }
    return FockVector(dim, v / v.norm());
}

inline FockVector tensor(const FockVector &idler, const FockVector &signal) {
    if (idler.modes() != 1 || signal.modes() != 1) {
        throw Error(ErrorCode::invalid_mode, "tensor expects single-mode factors");
    }
    if (idler.dim() != signal.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "tensor factors must share dim");
    }
    const int dim = idler.dim();
    ComplexVector v(detail::space_size(dim, 2));
    for (int i = 0; i < dim; ++i) {
        v.segment(static_cast<Eigen::Index>(i) * dim, dim) = idler[i] * signal.amplitudes();
    }
    return FockVector(dim, std::move(v), 2);
}

inline DensityMatrix tensor(const DensityMatrix &idler, const DensityMatrix &signal) {
    if (idler.modes() != 1 || signal.modes() != 1) {
        throw Error(ErrorCode::invalid_mode, "tensor expects single-mode factors");
    }
    if (idler.dim() != signal.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "tensor factors must share dim");
    }
    const int dim = idler.dim();
    ComplexMatrix m(detail::space_size(dim, 2), detail::space_size(dim, 2));
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            m.block(static_cast<Eigen::Index>(i) * dim, static_cast<Eigen::Index>(j) * dim, dim, dim) =
                idler(i, j) * signal.matrix();
        }
    }
    return DensityMatrix(dim, 2, std::move(m));
}

/// Reduced state of the kept mode of a two-mode matrix.
inline DensityMatrix partial_trace(const DensityMatrix &rho, Mode keep) {
    if (rho.modes() != 2) {
        throw Error(ErrorCode::invalid_mode, "partial_trace expects a two-mode matrix");
    }
    if (keep != Mode::idler && keep != Mode::signal) {
        throw Error(ErrorCode::invalid_mode, "keep must be idler or signal");
    }
    const int dim = rho.dim();
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    const ComplexMatrix &m = rho.matrix();
    if (keep == Mode::signal) {
        for (int i = 0; i < dim; ++i) {
            out += m.block(static_cast<Eigen::Index>(i) * dim, static_cast<Eigen::Index>(i) * dim, dim, dim);
        }
    } else {
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                out(i, j) = m.block(static_cast<Eigen::Index>(i) * dim, static_cast<Eigen::Index>(j) * dim, dim, dim)
                                .trace();
            }
        }
    }
    return DensityMatrix(dim, 1, std::move(out));
}

namespace detail {

/// Principal square root of a Hermitian PSD matrix; small negative
/// eigenvalues from rounding are clipped to zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix &m) {
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace detail

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; equals <psi|rho|psi>
/// when sigma = |psi><psi|.
inline double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dim() != sigma.dim() || rho.modes() != sigma.modes()) {
        throw Error(ErrorCode::dimension_mismatch, "fidelity operands differ in shape");
    }
    const ComplexMatrix root = detail::psd_sqrt(rho.matrix());
    const ComplexMatrix inner = root * sigma.matrix() * root;
    const ComplexMatrix h = 0.5 * (inner + inner.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    // Eigenvalues at rounding level would otherwise contribute sqrt(eps).
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(solver.eigenvalues().maxCoeff(), 0.0);
    double tr = 0.0;
    for (double lambda : solver.eigenvalues()) {
        if (lambda > floor) tr += std::sqrt(lambda);
    }
    return std::clamp(tr * tr, 0.0, 1.0);
}

/// R rho R^dagger with R = exp(-i phi n), i.e. rho_mn -> rho_mn e^{i(n-m)phi}.
inline DensityMatrix rotate_phase(const DensityMatrix &rho, double phi) {
    if (rho.modes() != 1) {
        throw Error(ErrorCode::invalid_mode, "rotate_phase expects a single-mode state");
    }
    ComplexMatrix m = rho.matrix();
    for (int r = 0; r < rho.dim(); ++r) {
        for (int c = 0; c < rho.dim(); ++c) {
            m(r, c) *= std::polar(1.0, (c - r) * phi);
        }
    }
    return DensityMatrix(rho.dim(), 1, std::move(m));
}

/// Embed a single-mode matrix into a larger (or equal) truncation.
inline DensityMatrix embed(const DensityMatrix &rho, int dim) {
    if (rho.modes() != 1) {
        throw Error(ErrorCode::invalid_mode, "embed expects a single-mode state");
    }
    if (dim < rho.dim()) {
        throw Error(ErrorCode::invalid_dimension, "embed target smaller than source");
    }
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m.topLeftCorner(rho.dim(), rho.dim()) = rho.matrix();
    return DensityMatrix(dim, 1, std::move(m));
}

}  // namespace fockqubit

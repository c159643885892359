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

// Independent reference computations used only by the test suites. None of
// these call into the code path they are used to check.

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "fockqubit/fock_core.hpp"

namespace fockqubit::oracle {

/// Random density matrix of rank `rank` supported on the first `support` levels.
inline DensityMatrix random_density(int dim, std::mt19937_64 &rng, int support = -1, int rank = -1) {
    if (support < 0) support = dim;
    if (rank < 0) rank = support;
    std::normal_distribution<double> normal;
    ComplexMatrix g = ComplexMatrix::Zero(dim, rank);
    for (int r = 0; r < support; ++r) {
        for (int c = 0; c < rank; ++c) g(r, c) = Complex(normal(rng), normal(rng));
    }
    ComplexMatrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix(dim, 1, m);
}

inline FockVector random_vector(int dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> normal;
    ComplexVector v(dim);
    for (int n = 0; n < dim; ++n) v(n) = Complex(normal(rng), normal(rng));
    return FockVector(dim, v / v.norm());
}

/// Partial trace by explicit four-index contraction.
inline ComplexMatrix brute_partial_trace(const DensityMatrix &rho, Mode keep) {
    const int d = rho.dim();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            for (int k = 0; k < d; ++k) {
                if (keep == Mode::signal) {
                    out(a, b) += rho(k * d + a, k * d + b);
                } else {
                    out(a, b) += rho(a * d + k, b * d + k);
                }
            }
        }
    }
    return out;
}

/// Loss as a physical beamsplitter: mix the mode with a vacuum ancilla via
/// exp(theta (a^dag b - a b^dag)), cos(theta) = sqrt(T), then trace the ancilla.
/// Photon number is conserved, so blocks with total n <= dim-1 are exact.
inline ComplexMatrix beamsplitter_loss(const DensityMatrix &rho, double transmissivity) {
    const int d = rho.dim();
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    ComplexMatrix a = ComplexMatrix::Zero(d, d);
    for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    const ComplexMatrix eye = ComplexMatrix::Identity(d, d);
    // system-major ordering: index = n_sys * d + n_anc.
    ComplexMatrix a_sys(n, n), a_anc(n, n);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            a_sys.block(i * d, j * d, d, d) = a(i, j) * eye;
            a_anc.block(i * d, j * d, d, d) = eye(i, j) * a;
        }
    }
    const double theta = std::acos(std::sqrt(transmissivity));
    const ComplexMatrix gen = theta * (a_sys.adjoint() * a_anc - a_sys * a_anc.adjoint());
    const ComplexMatrix u = gen.exp();
    ComplexMatrix joint = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) joint(i * d, j * d) = rho(i, j);
    }
    const ComplexMatrix out = u * joint * u.adjoint();
    ComplexMatrix reduced = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) reduced(i, j) += out(i * d + k, j * d + k);
        }
    }
    return reduced;
}

/// Number-state wavefunction from the physicists' Hermite polynomial.
inline double number_state_wavefunction(int n, double x) {
    const double norm = 1.0 / std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(std::numbers::pi));
    return norm * std::hermite(static_cast<unsigned>(n), x) * std::exp(-0.5 * x * x);
}

inline double pdf(const DensityMatrix &rho, double theta, double x) {
    double p = 0.0;
    for (int m = 0; m < rho.dim(); ++m) {
        for (int n = 0; n < rho.dim(); ++n) {
            p += (rho(m, n) * std::polar(1.0, (n - m) * theta)).real() * number_state_wavefunction(m, x) *
                 number_state_wavefunction(n, x);
        }
    }
    return p;
}

/// Composite Simpson rule on [lo, hi] with an even number of panels.
inline double simpson(const std::function<double(double)> &f, double lo, double hi, int panels = 4000) {
    if (panels % 2) ++panels;
    const double h = (hi - lo) / panels;
    double s = f(lo) + f(hi);
    for (int k = 1; k < panels; ++k) s += f(lo + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// W(x, p) = (1/pi) int <x+y|rho|x-y> e^{-2ipy} dy.
inline double wigner_integral(const DensityMatrix &rho, double x, double p) {
    const auto integrand = [&](double y) {
        Complex total{};
        for (int m = 0; m < rho.dim(); ++m) {
            for (int n = 0; n < rho.dim(); ++n) {
                total += rho(m, n) * number_state_wavefunction(m, x + y) * number_state_wavefunction(n, x - y);
            }
        }
        return (total * std::polar(1.0, -2.0 * p * y)).real();
    };
    return simpson(integrand, -12.0, 12.0, 6000) / std::numbers::pi;
}

/// Rejection sampler for p(x|theta) with a flat envelope on [-L, L].
inline std::vector<double> rejection_samples(const DensityMatrix &rho, double theta, std::size_t count,
                                             std::uint64_t seed, double half_width = 8.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-half_width, half_width);
    std::uniform_real_distribution<double> uy(0.0, 1.0);
    double peak = 0.0;
    for (int k = 0; k <= 4000; ++k) peak = std::max(peak, pdf(rho, theta, -half_width + k * half_width / 2000.0));
    peak *= 1.05;
    std::vector<double> out;
    while (out.size() < count) {
        const double x = ux(rng);
        if (uy(rng) * peak <= pdf(rho, theta, x)) out.push_back(x);
    }
    return out;
}

/// Kolmogorov-Smirnov statistic of a sample against a CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)> &cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

/// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace fockqubit::oracle

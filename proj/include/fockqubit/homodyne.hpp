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

// Balanced homodyne statistics under x = (a + a^dag)/sqrt(2), vacuum variance 1/2.
// The rotated quadrature x_theta = (a e^{-i theta} + a^dag e^{i theta})/sqrt(2)
// has eigenvectors with <n|x_theta> = e^{i n theta} psi_n(x).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fockqubit/fock_core.hpp"

namespace fockqubit {

struct QuadratureSample {
    double theta;  ///< local-oscillator phase in [0, 2pi)
    double x;      ///< measured quadrature value
};

/// Number-state wavefunctions psi_0(x) .. psi_{dim-1}(x).
inline std::vector<double> hermite_functions(double x, int dim) {
    std::vector<double> psi(static_cast<std::size_t>(std::max(dim, 1)));
    psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    if (dim > 1) psi[1] = std::sqrt(2.0) * x * psi[0];
    for (int n = 1; n + 1 < dim; ++n) {
        psi[n + 1] = std::sqrt(2.0 / (n + 1)) * x * psi[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * psi[n - 1];
    }
    return psi;
}

/// Quadrature eigenvector components e^{i n theta} psi_n(x).
inline ComplexVector quadrature_eigenvector(double theta, double x, int dim) {
    const auto psi = hermite_functions(x, dim);
    ComplexVector v(dim);
    for (int n = 0; n < dim; ++n) {
        v(n) = std::polar(psi[static_cast<std::size_t>(n)], n * theta);
    }
    return v;
}

namespace detail {

inline constexpr double kNormalizationTol = 1e-8;

inline void require_normalized_single_mode(const DensityMatrix &rho) {
    if (rho.modes() != 1) {
        throw Error(ErrorCode::invalid_mode, "homodyne statistics need a single-mode state");
    }
    if (std::abs(rho.trace() - 1.0) > kNormalizationTol) {
        throw Error(ErrorCode::invalid_state, "density matrix is not normalized");
    }
}

}  // namespace detail

/// p(x | theta) = sum_mn rho_mn e^{i(n-m)theta} psi_m(x) psi_n(x).
inline double quadrature_pdf(const DensityMatrix &rho, double theta, double x) {
    detail::require_normalized_single_mode(rho);
    const ComplexVector v = quadrature_eigenvector(theta, x, rho.dim());
    const double p = v.dot(rho.matrix() * v).real();
    return std::max(p, 0.0);
}

/// Local-oscillator phase assigned to each sample of a record.
class PhaseSchedule {
   public:
    enum class Kind { uniform_scan, fixed_list };

    /// Phase swept linearly through [0, 2pi) `sweeps` times over the record.
    static PhaseSchedule uniform_scan(double sweeps = 1.0) {
        if (!(sweeps > 0.0) || !std::isfinite(sweeps)) {
            throw Error(ErrorCode::invalid_parameter, "sweep count must be positive");
        }
        return PhaseSchedule(Kind::uniform_scan, sweeps, {});
    }

    /// Cycles through the given phases.
    static PhaseSchedule fixed_list(std::vector<double> phases) {
        if (phases.empty()) {
            throw Error(ErrorCode::invalid_parameter, "phase list must be non-empty");
        }
        for (double &p : phases) p = wrap(p);
        return PhaseSchedule(Kind::fixed_list, 0.0, std::move(phases));
    }

    Kind kind() const noexcept { return kind_; }
    double sweeps() const noexcept { return sweeps_; }
    const std::vector<double> &phases() const noexcept { return phases_; }

    double phase_at(std::size_t index, std::size_t count) const {
        if (kind_ == Kind::fixed_list) {
            return phases_[index % phases_.size()];
        }
        const double fraction = static_cast<double>(index) / static_cast<double>(count);
        return wrap(2.0 * std::numbers::pi * sweeps_ * fraction);
    }

    static double wrap(double theta) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double t = std::fmod(theta, two_pi);
        if (t < 0.0) t += two_pi;
        if (t >= two_pi) t = 0.0;
        return t;
    }

   private:
    PhaseSchedule(Kind kind, double sweeps, std::vector<double> phases)
        : kind_(kind), sweeps_(sweeps), phases_(std::move(phases)) {}

    Kind kind_;
    double sweeps_;
    std::vector<double> phases_;
};

inline constexpr int kSamplingGridPoints = 4096;
inline constexpr double kSamplingGridSigmas = 6.0;

/// Uniform double in (0, 1) from the top 53 bits of a 64-bit engine; portable
/// across standard libraries, unlike std::uniform_real_distribution.
inline double uniform_open01(std::mt19937_64 &engine) {
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse-CDF sampler. The CDF at any phase is a trigonometric polynomial
/// in theta whose coefficient tables are tabulated once on the x grid.
class QuadratureSampler {
   public:
    explicit QuadratureSampler(const DensityMatrix &rho, int grid_points = kSamplingGridPoints)
        : dim_(rho.dim()), grid_points_(grid_points) {
        detail::require_normalized_single_mode(rho);
        if (grid_points_ < 16) {
            throw Error(ErrorCode::invalid_parameter, "sampling grid too coarse");
        }
        half_width_ = kSamplingGridSigmas * max_quadrature_rms(rho);
        step_ = 2.0 * half_width_ / (grid_points_ - 1);

        const auto k_points = static_cast<std::size_t>(grid_points_);
        cumulative_.assign(static_cast<std::size_t>(dim_), std::vector<Complex>(k_points, Complex{}));
        std::vector<Complex> previous(static_cast<std::size_t>(dim_), Complex{});
        for (std::size_t k = 0; k < k_points; ++k) {
            const auto psi = hermite_functions(grid_x(k), dim_);
            for (int d = 0; d < dim_; ++d) {
                Complex g{};
                for (int m = 0; m + d < dim_; ++m) {
                    g += rho(m, m + d) * psi[static_cast<std::size_t>(m)] * psi[static_cast<std::size_t>(m + d)];
                }
                auto &column = cumulative_[static_cast<std::size_t>(d)];
                column[k] = k == 0 ? Complex{} : column[k - 1] + 0.5 * step_ * (previous[static_cast<std::size_t>(d)] + g);
                previous[static_cast<std::size_t>(d)] = g;
            }
        }
    }

    double half_width() const noexcept { return half_width_; }

    /// Grid CDF at index k for phase theta, before normalization.
    double cdf_at(std::size_t k, double theta) const {
        double c = cumulative_[0][k].real();
        for (int d = 1; d < dim_; ++d) {
            c += 2.0 * (std::polar(1.0, d * theta) * cumulative_[static_cast<std::size_t>(d)][k]).real();
        }
        return c;
    }

    double draw(double theta, double u) const {
        const std::size_t last = static_cast<std::size_t>(grid_points_) - 1;
        const double target = u * cdf_at(last, theta);
        std::size_t lo = 0;
        std::size_t hi = last;
        double c_lo = cdf_at(lo, theta);
        double c_hi = cdf_at(hi, theta);
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            const double c_mid = cdf_at(mid, theta);
            if (c_mid < target) {
                lo = mid;
                c_lo = c_mid;
            } else {
                hi = mid;
                c_hi = c_mid;
            }
        }
        const double span = c_hi - c_lo;
        const double frac = span > 0.0 ? std::clamp((target - c_lo) / span, 0.0, 1.0) : 0.5;
        return grid_x(lo) + frac * step_;
    }

    /// sqrt of the largest <x_theta^2> over theta.
    static double max_quadrature_rms(const DensityMatrix &rho) {
        const int dim = rho.dim();
        const ComplexMatrix a = annihilation(dim).matrix();
        const double mean_n = rho.mean_photon_number();
        const Complex a2 = (rho.matrix() * a * a).trace();
        return std::sqrt(std::abs(a2) + mean_n + 0.5);
    }

   private:
    double grid_x(std::size_t k) const { return -half_width_ + static_cast<double>(k) * step_; }

    int dim_;
    int grid_points_;
    double half_width_ = 0.0;
    double step_ = 0.0;
    std::vector<std::vector<Complex>> cumulative_;
};

/// i.i.d. draws from quadrature_pdf at the scheduled phases; the record is a
/// pure function of (rho, schedule, n, seed).
inline std::vector<QuadratureSample> sample_quadratures(const DensityMatrix &rho, const PhaseSchedule &schedule,
                                                        std::size_t n, std::uint64_t seed) {
    if (n < 1) {
        throw Error(ErrorCode::invalid_parameter, "sample count must be >= 1");
    }
    const QuadratureSampler sampler(rho);
    std::mt19937_64 engine(seed);
    std::vector<QuadratureSample> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double theta = schedule.phase_at(j, n);
        out.push_back({theta, sampler.draw(theta, uniform_open01(engine))});
    }
    return out;
}

namespace detail {

inline std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

inline double parse_double(std::string_view text, const std::string &context) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
        throw Error(ErrorCode::io, "cannot parse number '" + std::string(text) + "' in " + context);
    }
    return value;
}

}  // namespace detail

/// CSV with header `theta,x`, one sample per line, shortest round-trip decimals.
inline void write_quadratures_csv(std::ostream &out, const std::vector<QuadratureSample> &samples) {
    out << "theta,x\n";
    for (const auto &s : samples) {
        out << detail::format_double(s.theta) << ',' << detail::format_double(s.x) << '\n';
    }
}

inline void write_quadratures_csv(const std::string &path, const std::vector<QuadratureSample> &samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io, "cannot open " + path + " for writing");
    }
    write_quadratures_csv(out, samples);
    if (!out) {
        throw Error(ErrorCode::io, "write failed for " + path);
    }
}

inline std::vector<QuadratureSample> read_quadratures_csv(std::istream &in, const std::string &context = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::io, "empty quadrature file " + context);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "theta,x") {
        throw Error(ErrorCode::io, "quadrature file " + context + " must start with header 'theta,x'");
    }
    std::vector<QuadratureSample> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorCode::io, context + ":" + std::to_string(line_no) + ": expected two columns");
        }
        const std::string where = context + ":" + std::to_string(line_no);
        const std::string_view view(line);
        samples.push_back({detail::parse_double(view.substr(0, comma), where),
                           detail::parse_double(view.substr(comma + 1), where)});
    }
    return samples;
}

inline std::vector<QuadratureSample> read_quadratures_csv(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io, "cannot open " + path);
    }
    return read_quadratures_csv(in, path);
}

}  // namespace fockqubit

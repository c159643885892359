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

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fockqubit/channels.hpp"
#include "fockqubit/homodyne.hpp"
#include "fockqubit/source_model.hpp"

namespace fockqubit {

// ---------------------------------------------------------------------------
// Wigner function
// ---------------------------------------------------------------------------

struct WignerGridSpec {
    double x_min = -4.0;
    double x_max = 4.0;
    int x_points = 121;
    double p_min = -4.0;
    double p_max = 4.0;
    int p_points = 121;
};

struct WignerGrid {
    std::vector<double> x_axis;
    std::vector<double> p_axis;
    Eigen::MatrixXd values;  ///< values(i, j) = W(x_axis[i], p_axis[j])
    bool boundary_warning = false;

    /// Trapezoidal estimate of the integral of W over the grid.
    double integral() const {
        const auto trapezoid_weights = [](const std::vector<double> &axis) {
            std::vector<double> w(axis.size(), 0.0);
            for (std::size_t k = 0; k + 1 < axis.size(); ++k) {
                const double h = axis[k + 1] - axis[k];
                w[k] += 0.5 * h;
                w[k + 1] += 0.5 * h;
            }
            return w;
        };
        const auto wx = trapezoid_weights(x_axis);
        const auto wp = trapezoid_weights(p_axis);
        double total = 0.0;
        for (std::size_t i = 0; i < wx.size(); ++i) {
            for (std::size_t j = 0; j < wp.size(); ++j) {
                total += wx[i] * wp[j] * values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
        return total;
    }
};

inline constexpr double kWignerBoundaryTolerance = 1e-4;

/// W(x, p) = (1/pi) Tr[rho D(a) (-1)^n D(a)^dag] with a = (x + i p)/sqrt(2),
/// using the Laguerre closed form of the displaced-parity matrix elements.
inline double wigner_at(const DensityMatrix &rho, double x, double p) {
    if (rho.modes() != 1) {
        throw Error(ErrorCode::invalid_mode, "Wigner function needs a single-mode state");
    }
    const int dim = rho.dim();
    const Complex alpha = Complex(x, p) / std::numbers::sqrt2;
    const double r2 = std::norm(alpha);
    const double gauss = std::exp(-2.0 * r2);
    double total = 0.0;
    for (int n = 0; n < dim; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        // m = n: diagonal term.
        total += rho(n, n).real() * sign * gauss * std::assoc_laguerre(n, 0, 4.0 * r2);
        Complex power = 1.0;
        for (int m = n + 1; m < dim; ++m) {
            power *= 2.0 * alpha;
            const double log_ratio = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0));
            const Complex parity_mn = sign * std::exp(log_ratio) * power * gauss *
                                      std::assoc_laguerre(static_cast<unsigned>(n), static_cast<unsigned>(m - n), 4.0 * r2);
            // rho_nm * O_mn plus its conjugate partner rho_mn * O_nm.
            total += 2.0 * (rho(n, m) * parity_mn).real();
        }
    }
    return total / std::numbers::pi;
}

inline WignerGrid wigner(const DensityMatrix &rho, const WignerGridSpec &spec = {}) {
    detail::require_normalized_single_mode(rho);
    if (spec.x_points < 2 || spec.p_points < 2 || !(spec.x_max > spec.x_min) || !(spec.p_max > spec.p_min)) {
        throw Error(ErrorCode::invalid_parameter, "Wigner grid needs >= 2 points and a positive extent per axis");
    }
    WignerGrid grid;
    const auto axis = [](double lo, double hi, int count) {
        std::vector<double> a(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) a[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
        return a;
    };
    grid.x_axis = axis(spec.x_min, spec.x_max, spec.x_points);
    grid.p_axis = axis(spec.p_min, spec.p_max, spec.p_points);
    grid.values.resize(spec.x_points, spec.p_points);
    double boundary = 0.0;
    for (int i = 0; i < spec.x_points; ++i) {
        for (int j = 0; j < spec.p_points; ++j) {
            const double w = wigner_at(rho, grid.x_axis[static_cast<std::size_t>(i)], grid.p_axis[static_cast<std::size_t>(j)]);
            grid.values(i, j) = w;
            if (i == 0 || j == 0 || i == spec.x_points - 1 || j == spec.p_points - 1) {
                boundary = std::max(boundary, std::abs(w));
            }
        }
    }
    grid.boundary_warning = boundary > kWignerBoundaryTolerance;
    return grid;
}

inline void write_wigner_csv(std::ostream &out, const WignerGrid &grid) {
    out << "x,p,W\n";
    for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
            out << detail::format_double(grid.x_axis[i]) << ',' << detail::format_double(grid.p_axis[j]) << ','
                << detail::format_double(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
                << '\n';
        }
    }
}

inline void write_wigner_csv(const std::string &path, const WignerGrid &grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io, "cannot open " + path + " for writing");
    }
    write_wigner_csv(out, grid);
    if (!out) {
        throw Error(ErrorCode::io, "write failed for " + path);
    }
}

inline nlohmann::json wigner_to_json(const WignerGrid &grid) {
    nlohmann::json values = nlohmann::json::array();
    for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(grid.values.cols()));
        for (Eigen::Index j = 0; j < grid.values.cols(); ++j) row[static_cast<std::size_t>(j)] = grid.values(i, j);
        values.push_back(row);
    }
    return {{"x_axis", grid.x_axis},
            {"p_axis", grid.p_axis},
            {"values", values},
            {"boundary_warning", grid.boundary_warning},
            {"integral", grid.integral()}};
}

// ---------------------------------------------------------------------------
// Generalized efficiency
// ---------------------------------------------------------------------------

/// rho_11 / (1 - |rho_01|^2 / rho_11), ignoring photon numbers above one.
/// Pure vacuum (rho_11 = 0) maps to 0.
inline double generalized_efficiency(const DensityMatrix &rho) {
    if (rho.modes() != 1) {
        throw Error(ErrorCode::invalid_mode, "generalized efficiency needs a single-mode state");
    }
    const double rho11 = rho(1, 1).real();
    if (rho11 == 0.0) return 0.0;
    if (rho11 < 0.0) {
        throw Error(ErrorCode::invalid_state, "rho_11 is negative");
    }
    const double denominator = 1.0 - std::norm(rho(0, 1)) / rho11;
    if (!(denominator > 0.0)) {
        throw Error(ErrorCode::invalid_state, "|rho_01|^2 >= rho_11 violates qubit positivity");
    }
    return rho11 / denominator;
}

// ---------------------------------------------------------------------------
// Model curves
// ---------------------------------------------------------------------------

struct CurvePoint {
    double added_rate_khz = 0.0;
    double rho11 = 0.0;
    double rho01_mag = 0.0;
    double efficiency = 0.0;
};

inline CurvePoint curve_point(const DensityMatrix &rho, double added_rate_khz) {
    return {added_rate_khz, rho(1, 1).real(), std::abs(rho(0, 1)), generalized_efficiency(rho)};
}

struct CurveOptions {
    int dim = kDefaultDim;
    bool with_coherence_factor = false;
};

/// Heralded signal state after the signal-channel loss and, optionally, the
/// coherence factor (applied after loss).
inline DensityMatrix modeled_signal_state(const ModelParams &params, SourceModel model, int dim,
                                          bool with_coherence_factor) {
    DensityMatrix rho = apply_loss(heralded_signal_state(params, model, dim), params.eta_signal);
    if (with_coherence_factor) {
        rho = apply_coherence_factor(rho, params.coherence_factor);
    }
    return rho;
}

/// Seed amplitude for an added idler rate in kHz; the seed phase is taken from
/// params.alpha (zero phase when alpha is zero).
inline Complex seed_for_rate_khz(const ModelParams &params, double added_rate_khz) {
    const double magnitude = seed_amplitude_for_added_rate(added_rate_khz * 1e3, params);
    const double phase = params.alpha == Complex{} ? 0.0 : std::arg(params.alpha);
    return std::polar(magnitude, phase);
}

/// rho_11, |rho_01| and efficiency of the modeled signal state at each added
/// idler count rate (kHz).
inline std::vector<CurvePoint> theory_curves(const ModelParams &params, const std::vector<double> &rate_grid_khz,
                                             SourceModel model, bool with_coherence_factor,
                                             int dim = kDefaultDim) {
    params.validate();
    std::vector<CurvePoint> points;
    points.reserve(rate_grid_khz.size());
    if (model == SourceModel::exact) {
        const TwoModeSqueezer squeezer(params.r, dim);
        for (double rate : rate_grid_khz) {
            const Complex alpha = seed_for_rate_khz(params, rate);
            const auto evolved = evolve_seeded(squeezer, alpha);
            DensityMatrix rho = herald(DensityMatrix::from_pure(evolved.state), params.eta_idler).signal_state;
            rho = apply_loss(rho, params.eta_signal);
            if (with_coherence_factor) rho = apply_coherence_factor(rho, params.coherence_factor);
            points.push_back(curve_point(rho, rate));
        }
    } else {
        for (double rate : rate_grid_khz) {
            ModelParams at = params;
            at.alpha = seed_for_rate_khz(params, rate);
            points.push_back(curve_point(modeled_signal_state(at, model, dim, with_coherence_factor), rate));
        }
    }
    return points;
}

inline void write_curves_csv(std::ostream &out, const std::vector<CurvePoint> &points) {
    out << "added_rate_khz,rho11,rho01_mag,efficiency\n";
    for (const auto &p : points) {
        out << detail::format_double(p.added_rate_khz) << ',' << detail::format_double(p.rho11) << ','
            << detail::format_double(p.rho01_mag) << ',' << detail::format_double(p.efficiency) << '\n';
    }
}

inline std::vector<CurvePoint> read_curves_csv(std::istream &in, const std::string &context = "<stream>") {
    std::string line;
    if (!std::getline(in, line) || line.rfind("added_rate_khz,rho11,rho01_mag,efficiency", 0) != 0) {
        throw Error(ErrorCode::io, context + ": missing curve header");
    }
    std::vector<CurvePoint> points;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<double> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(detail::parse_double(std::string_view(line).substr(start, comma - start), context));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 4) {
            throw Error(ErrorCode::io, context + ": curve rows need four columns");
        }
        points.push_back({fields[0], fields[1], fields[2], fields[3]});
    }
    return points;
}

inline void write_curves_csv(const std::string &path, const std::vector<CurvePoint> &points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io, "cannot open " + path + " for writing");
    }
    write_curves_csv(out, points);
    if (!out) {
        throw Error(ErrorCode::io, "write failed for " + path);
    }
}

inline std::vector<CurvePoint> read_curves_csv(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io, "cannot open " + path);
    }
    return read_curves_csv(in, path);
}

// ---------------------------------------------------------------------------
// Model fitting
// ---------------------------------------------------------------------------

enum class FitParameter : unsigned { r = 1u, eta_signal = 2u, eta_idler = 4u, coherence_factor = 8u };

/// Set of free parameters.
class FitMask {
   public:
    FitMask() = default;
    FitMask(std::initializer_list<FitParameter> params) {
        for (auto p : params) bits_ |= static_cast<unsigned>(p);
    }
    bool contains(FitParameter p) const { return (bits_ & static_cast<unsigned>(p)) != 0; }
    bool empty() const { return bits_ == 0; }

   private:
    unsigned bits_ = 0;
};

struct FitOptions {
    SourceModel model = SourceModel::exact;
    int dim = kDefaultDim;
    bool with_coherence_factor = true;
    int max_iter = 2000;
    double size_tol = 1e-9;  ///< simplex characteristic size at which the search stops
};

struct FitResult {
    ModelParams params;
    double residual = 0.0;  ///< sum of squared (rho_11, |rho_01|) residuals
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  ///< best objective after each accepted step
};

namespace detail {

struct Bound {
    double lo;
    double hi;
};

inline Bound fit_bound(FitParameter p) {
    switch (p) {
        case FitParameter::r: return {1e-6, 0.49};
        case FitParameter::eta_signal: return {1e-6, 1.0};
        case FitParameter::eta_idler: return {1e-6, 1.0};
        case FitParameter::coherence_factor: return {0.0, 1.0};
    }
    return {0.0, 1.0};
}

inline double &fit_slot(ModelParams &params, FitParameter p) {
    switch (p) {
        case FitParameter::r: return params.r;
        case FitParameter::eta_signal: return params.eta_signal;
        case FitParameter::eta_idler: return params.eta_idler;
        case FitParameter::coherence_factor: return params.coherence_factor;
    }
    return params.r;
}

struct FitProblem {
    const std::vector<CurvePoint> *data;
    const FitOptions *options;
    ModelParams base;
    std::vector<FitParameter> free;

    ModelParams params_at(const gsl_vector *v) const {
        ModelParams p = base;
        for (std::size_t k = 0; k < free.size(); ++k) {
            const Bound b = fit_bound(free[k]);
            fit_slot(p, free[k]) = std::clamp(gsl_vector_get(v, k), b.lo, b.hi);
        }
        return p;
    }

    /// Squared distance to the box, added so the simplex is pushed back inside.
    double outside_penalty(const gsl_vector *v) const {
        double penalty = 0.0;
        for (std::size_t k = 0; k < free.size(); ++k) {
            const Bound b = fit_bound(free[k]);
            const double x = gsl_vector_get(v, k);
            const double d = x < b.lo ? b.lo - x : (x > b.hi ? x - b.hi : 0.0);
            penalty += d * d;
        }
        return penalty;
    }
};

inline double fit_objective(const ModelParams &params, const std::vector<CurvePoint> &data,
                            const FitOptions &options) {
    std::vector<double> rates;
    rates.reserve(data.size());
    for (const auto &d : data) rates.push_back(d.added_rate_khz);
    const auto model =
        theory_curves(params, rates, options.model, options.with_coherence_factor, options.dim);
    double sum = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) {
        const double d11 = model[k].rho11 - data[k].rho11;
        const double d01 = model[k].rho01_mag - data[k].rho01_mag;
        sum += d11 * d11 + d01 * d01;
    }
    return sum;
}

inline double gsl_fit_objective(const gsl_vector *v, void *raw) {
    const auto *problem = static_cast<const FitProblem *>(raw);
    try {
        return fit_objective(problem->params_at(v), *problem->data, *problem->options) + problem->outside_penalty(v);
    } catch (const Error &) {
        // nmsimplex2 rejects non-finite values, so infeasible points get a huge finite cost.
        return 1e300;
    }
}

}  // namespace detail

/// Least-squares fit of the free parameters to (rho_11, |rho_01|) curves by a
/// bounded Nelder-Mead simplex search. The returned residual never exceeds the
/// residual at `init`.
inline FitResult fit_model(const std::vector<CurvePoint> &data, const FitMask &free, const ModelParams &init,
                           const FitOptions &options = {}) {
    if (data.size() < 4) {
        throw Error(ErrorCode::invalid_parameter, "fit_model needs at least 4 data points");
    }
    if (free.empty()) {
        throw Error(ErrorCode::invalid_parameter, "fit_model needs at least one free parameter");
    }
    init.validate();

    detail::FitProblem problem{&data, &options, init, {}};
    for (auto p : {FitParameter::r, FitParameter::eta_signal, FitParameter::eta_idler, FitParameter::coherence_factor}) {
        if (free.contains(p)) problem.free.push_back(p);
    }
    const std::size_t n = problem.free.size();

    FitResult result;
    result.params = init;
    result.residual = detail::fit_objective(init, data, options);
    result.objective_trace.push_back(result.residual);

    gsl_vector *x = gsl_vector_alloc(n);
    gsl_vector *steps = gsl_vector_alloc(n);
    ModelParams scratch = init;
    for (std::size_t k = 0; k < n; ++k) {
        const double value = detail::fit_slot(scratch, problem.free[k]);
        gsl_vector_set(x, k, value);
        gsl_vector_set(steps, k, std::max(0.1 * std::abs(value), 0.02));
    }

    gsl_multimin_function fn{&detail::gsl_fit_objective, n, &problem};
    gsl_multimin_fminimizer *solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(solver, &fn, x, steps);

    int status = GSL_CONTINUE;
    int iter = 0;
    while (status == GSL_CONTINUE && iter < options.max_iter) {
        ++iter;
        if (gsl_multimin_fminimizer_iterate(solver) != GSL_SUCCESS) break;
        if (solver->fval < result.residual) {
            const ModelParams candidate = problem.params_at(solver->x);
            const double objective = detail::fit_objective(candidate, data, options);
            if (objective < result.residual) {
                result.residual = objective;
                result.params = candidate;
                result.objective_trace.push_back(objective);
            }
        }
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), options.size_tol);
    }
    result.iterations = iter;
    result.converged = status == GSL_SUCCESS;

    gsl_multimin_fminimizer_free(solver);
    gsl_vector_free(steps);
    gsl_vector_free(x);
    return result;
}

}  // namespace fockqubit

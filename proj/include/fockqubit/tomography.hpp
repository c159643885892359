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

// Iterative maximum-likelihood state reconstruction from homodyne records:
// rho <- N[R(rho) rho R(rho)], R(rho) = (1/N) sum_j Pi_j / Tr(Pi_j rho),
// with one rank-one projector Pi_j = |x_{theta_j}><x_{theta_j}| per sample.

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fockqubit/homodyne.hpp"

namespace fockqubit {

struct MaxLikOptions {
    int max_iter = 2000;
    double tol = 1e-8;  ///< stop when relative log-likelihood gain falls below this
    /// Dilution epsilon of R_eps = (I + eps R)/(1 + eps); infinity is plain RrhoR.
    double dilution = std::numeric_limits<double>::infinity();
    /// Absolute slack below which a log-likelihood drop is treated as rounding.
    double monotonic_slack = 1e-9;
};

struct ReconstructionReport {
    DensityMatrix rho;
    std::vector<double> loglik_trace;  ///< log-likelihood of each iterate, starting value first
    int iterations_run = 0;
    bool converged = false;
    int dim = 0;
    std::size_t sample_count = 0;
    int diluted_steps = 0;  ///< steps that needed a diluted retry to keep the likelihood monotone
};

/// Sample record projected onto the truncated Fock basis: row j holds
/// e^{i n theta_j} psi_n(x_j).
class ProjectorTable {
   public:
    ProjectorTable(const std::vector<QuadratureSample> &samples, int dim) : dim_(dim) {
        detail::require_dim(dim);
        const auto rows = static_cast<Eigen::Index>(samples.size());
        vectors_.resize(rows, dim);
        for (Eigen::Index j = 0; j < rows; ++j) {
            const auto &s = samples[static_cast<std::size_t>(j)];
            if (!std::isfinite(s.x) || !std::isfinite(s.theta)) {
                throw Error(ErrorCode::rejected_input, "sample " + std::to_string(j) + " is not finite");
            }
            vectors_.row(j) = quadrature_eigenvector(s.theta, s.x, dim).transpose();
        }
    }

    int dim() const noexcept { return dim_; }
    Eigen::Index size() const noexcept { return vectors_.rows(); }

    /// Tr(Pi_j rho) for every sample.
    Eigen::VectorXd probabilities(const ComplexMatrix &rho) const {
        const ComplexMatrix weighted = vectors_.conjugate() * rho;
        return weighted.cwiseProduct(vectors_).rowwise().sum().real();
    }

    /// (1/N) sum_j Pi_j * weight_j.
    ComplexMatrix weighted_sum(const Eigen::VectorXd &weights) const {
        const ComplexMatrix scaled = weights.cast<Complex>().asDiagonal() * vectors_.conjugate();
        return vectors_.transpose() * scaled / static_cast<double>(vectors_.rows());
    }

   private:
    int dim_;
    ComplexMatrix vectors_;
};

namespace detail {

/// Sum of log probabilities; -infinity when any sample has zero probability.
inline double sum_log(const Eigen::VectorXd &p) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        if (!(p(j) > 0.0)) return -std::numeric_limits<double>::infinity();
        total += std::log(p(j));
    }
    return total;
}

inline ComplexMatrix hermitize(const ComplexMatrix &m) { return 0.5 * (m + m.adjoint()); }

}  // namespace detail

/// sum_j log p(x_j | theta_j). Returns -infinity if a sample is impossible
/// under a rank-deficient rho; callers test with std::isinf.
inline double loglikelihood(const DensityMatrix &rho, const std::vector<QuadratureSample> &samples) {
    detail::require_normalized_single_mode(rho);
    double total = 0.0;
    for (const auto &s : samples) {
        const double p = quadrature_pdf(rho, s.theta, s.x);
        if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
        total += std::log(p);
    }
    return total;
}

inline constexpr std::size_t kMinReconstructionSamples = 1000;

/// Reconstruct from a prepared projector table, starting at `initial`.
inline ReconstructionReport maxlik_reconstruct(const ProjectorTable &table, const DensityMatrix &initial,
                                               const MaxLikOptions &options = {}) {
    const int dim = table.dim();
    if (static_cast<std::size_t>(table.size()) < kMinReconstructionSamples) {
        throw Error(ErrorCode::rejected_input, "maximum-likelihood reconstruction needs >= 1000 samples");
    }
    if (initial.modes() != 1 || initial.dim() != dim) {
        throw Error(ErrorCode::dimension_mismatch, "initial state does not match reconstruction dim");
    }
    if (options.max_iter < 0 || !(options.tol >= 0.0) || !(options.dilution > 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "invalid maximum-likelihood options");
    }

    const ComplexMatrix identity = ComplexMatrix::Identity(dim, dim);
    ComplexMatrix rho = initial.normalized().matrix();
    Eigen::VectorXd p = table.probabilities(rho);
    double loglik = detail::sum_log(p);
    if (std::isinf(loglik)) {
        throw Error(ErrorCode::invalid_state, "initial state assigns zero probability to a sample");
    }

    ReconstructionReport report{DensityMatrix(dim, 1, rho), {loglik}, 0, false, dim,
                                static_cast<std::size_t>(table.size()), 0};

    // One RrhoR step with dilution eps (infinite eps is the plain step).
    auto step = [&](const ComplexMatrix &r_op, double eps) {
        const ComplexMatrix r = std::isinf(eps) ? r_op : ComplexMatrix((identity + eps * r_op) / (1.0 + eps));
        ComplexMatrix next = detail::hermitize(r * rho * r);
        next /= next.trace().real();
        return next;
    };

    for (int iter = 0; iter < options.max_iter; ++iter) {
        const ComplexMatrix r_op = detail::hermitize(table.weighted_sum(p.cwiseInverse()));
        ComplexMatrix next = step(r_op, options.dilution);
        Eigen::VectorXd next_p = table.probabilities(next);
        double next_loglik = detail::sum_log(next_p);

        // A plain step can overshoot; a small enough dilution always ascends.
        double eps = std::isinf(options.dilution) ? 1.0 : options.dilution / 2.0;
        bool diluted = false;
        while (!(next_loglik >= loglik - options.monotonic_slack) && eps > 1e-12) {
            next = step(r_op, eps);
            next_p = table.probabilities(next);
            next_loglik = detail::sum_log(next_p);
            eps /= 2.0;
            diluted = true;
        }
        if (!(next_loglik >= loglik - options.monotonic_slack)) {
            throw Error(ErrorCode::internal, "log-likelihood decreased during maximum-likelihood iteration");
        }
        if (diluted) ++report.diluted_steps;

        const double gain = next_loglik - loglik;
        rho = std::move(next);
        p = std::move(next_p);
        loglik = next_loglik;
        report.loglik_trace.push_back(loglik);
        report.iterations_run = iter + 1;
        if (gain < options.tol * std::abs(loglik)) {
            report.converged = true;
            break;
        }
    }
    report.rho = DensityMatrix(dim, 1, rho);
    return report;
}

/// Reconstruct starting from the maximally mixed state.
inline ReconstructionReport maxlik_reconstruct(const std::vector<QuadratureSample> &samples, int dim,
                                               int max_iter = 2000, double tol = 1e-8) {
    if (samples.size() < kMinReconstructionSamples) {
        throw Error(ErrorCode::rejected_input, "maximum-likelihood reconstruction needs >= 1000 samples");
    }
    const ProjectorTable table(samples, dim);
    MaxLikOptions options;
    options.max_iter = max_iter;
    options.tol = tol;
    return maxlik_reconstruct(table, DensityMatrix::maximally_mixed(dim), options);
}

inline ReconstructionReport maxlik_reconstruct(const std::vector<QuadratureSample> &samples, int dim,
                                               const MaxLikOptions &options) {
    if (samples.size() < kMinReconstructionSamples) {
        throw Error(ErrorCode::rejected_input, "maximum-likelihood reconstruction needs >= 1000 samples");
    }
    const ProjectorTable table(samples, dim);
    return maxlik_reconstruct(table, DensityMatrix::maximally_mixed(dim), options);
}

// JSON forms. Complex matrices are row-major nested [re, im] pairs.

inline nlohmann::json matrix_to_json(const ComplexMatrix &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json &j) {
    if (!j.is_array() || j.empty()) {
        throw Error(ErrorCode::io, "matrix must be a non-empty array of rows");
    }
    const auto n = static_cast<Eigen::Index>(j.size());
    ComplexMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw Error(ErrorCode::io, "matrix must be square");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto &pair = row[static_cast<std::size_t>(c)];
            if (!pair.is_array() || pair.size() != 2) {
                throw Error(ErrorCode::io, "matrix entries must be [re, im] pairs");
            }
            m(r, c) = Complex(pair[0].get<double>(), pair[1].get<double>());
        }
    }
    return m;
}

inline nlohmann::json density_matrix_to_json(const DensityMatrix &rho) {
    return {{"dim", rho.dim()}, {"modes", rho.modes()}, {"rho", matrix_to_json(rho.matrix())}};
}

inline DensityMatrix density_matrix_from_json(const nlohmann::json &j) {
    try {
        const int dim = j.at("dim").get<int>();
        const int modes = j.contains("modes") ? j.at("modes").get<int>() : 1;
        return DensityMatrix(dim, modes, matrix_from_json(j.at("rho")));
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::io, std::string("malformed density matrix JSON: ") + e.what());
    }
}

inline nlohmann::json report_to_json(const ReconstructionReport &report) {
    nlohmann::json j = density_matrix_to_json(report.rho);
    j["loglik_trace"] = report.loglik_trace;
    j["iterations_run"] = report.iterations_run;
    j["converged"] = report.converged;
    j["sample_count"] = report.sample_count;
    j["diluted_steps"] = report.diluted_steps;
    return j;
}

inline ReconstructionReport report_from_json(const nlohmann::json &j) {
    try {
        ReconstructionReport report{density_matrix_from_json(j), {}, 0, false, 0, 0, 0};
        report.dim = report.rho.dim();
        report.loglik_trace = j.at("loglik_trace").get<std::vector<double>>();
        report.iterations_run = j.at("iterations_run").get<int>();
        report.converged = j.at("converged").get<bool>();
        report.sample_count = j.value("sample_count", std::size_t{0});
        report.diluted_steps = j.value("diluted_steps", 0);
        return report;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::io, std::string("malformed reconstruction report: ") + e.what());
    }
}

namespace detail {

inline void write_json_file(const std::string &path, const nlohmann::json &j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io, "cannot open " + path + " for writing");
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw Error(ErrorCode::io, "write failed for " + path);
    }
}

inline nlohmann::json read_json_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io, "cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::io, path + ": " + e.what());
    }
}

}  // namespace detail

inline void write_report_json(const std::string &path, const ReconstructionReport &report) {
    detail::write_json_file(path, report_to_json(report));
}

inline ReconstructionReport read_report_json(const std::string &path) {
    return report_from_json(detail::read_json_file(path));
}

}  // namespace fockqubit

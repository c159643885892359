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

// fockqubit command-line front end.
//
//   fockqubit run <config>                 full pipeline (simulate, sample, reconstruct, analyze)
//   fockqubit curves <config>              model curves only
//   fockqubit reconstruct <csv> --dim N    maximum-likelihood estimate from a quadrature record
//   fockqubit wigner <report.json>         Wigner grid of a reconstruction
//   fockqubit compare <manifest_a> <manifest_b>
//
// Exit status: 0 success, 1 error, 2 comparison failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "fockqubit/pipeline.hpp"
#include "fockqubit/version.hpp"

namespace {

using namespace fockqubit;

constexpr int kExitError = 1;
constexpr int kExitCompareFailed = 2;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> stages;

    void attach(CLI::App *cmd) {
        cmd->add_option("--seed", seed, "Override the master seed");
        cmd->add_option("--out", out, "Override the output directory");
        cmd->add_option("--stages", stages, "Comma-separated subset of simulate,sample,reconstruct,analyze");
    }

    void apply(PipelineConfig &config) const {
        if (seed) config.seed = *seed;
        if (out) config.output_dir = *out;
        if (stages) config.stages = StageSet::parse(*stages);
    }
};

void print_points(const nlohmann::json &manifest) {
    std::printf("%5s %14s %10s %10s %10s %10s %10s %10s\n", "point", "added_khz", "rho11", "|rho01|", "eff",
                "rec_rho11", "rec_rho01", "rec_eff");
    for (const auto &p : manifest.at("points")) {
        const auto &m = p.at("model");
        std::printf("%5d %14.6g %10.6f %10.6f %10.6f", p.at("index").get<int>(), p.at("added_rate_khz").get<double>(),
                    m.at("rho11").get<double>(), m.at("rho01_mag").get<double>(), m.at("efficiency").get<double>());
        const auto &r = p.at("reconstructed");
        if (r.is_null()) {
            std::printf(" %10s %10s %10s\n", "-", "-", "-");
        } else {
            std::printf(" %10.6f %10.6f %10.6f\n", r.at("rho11").get<double>(), r.at("rho01_mag").get<double>(),
                        r.at("efficiency").get<double>());
        }
    }
}

int cmd_run(const std::string &config_path, const Overrides &overrides, bool curves_only) {
    PipelineConfig config = load_config(config_path);
    overrides.apply(config);
    if (curves_only) config.stages = {Stage::analyze};
    const auto manifest = run_pipeline(config);
    print_points(manifest.json);
    std::cout << "manifest: " << manifest.path.string() << '\n';
    return 0;
}

int cmd_reconstruct(const std::string &csv, int dim, const std::string &out, int max_iter, double tol) {
    const auto samples = read_quadratures_csv(csv);
    MaxLikOptions options;
    options.max_iter = max_iter;
    options.tol = tol;
    const auto report = maxlik_reconstruct(samples, dim, options);
    const std::string target =
        out.empty() ? (std::filesystem::path(csv).parent_path() / "reconstruction.json").string() : out;
    write_report_json(target, report);
    const auto point = curve_point(report.rho, 0.0);
    std::printf("samples %zu  dim %d  iterations %d  converged %s\n", report.sample_count, report.dim,
                report.iterations_run, report.converged ? "yes" : "no");
    std::printf("rho00 %.6f  rho11 %.6f  |rho01| %.6f  efficiency %.6f  loglik %.6f\n", report.rho.population(0),
                point.rho11, point.rho01_mag, point.efficiency, report.loglik_trace.back());
    std::cout << "report: " << target << '\n';
    return 0;
}

int cmd_wigner(const std::string &report_path, const std::string &out, double extent, int points) {
    const auto report = read_report_json(report_path);
    WignerGridSpec spec{-extent, extent, points, -extent, extent, points};
    const auto grid = wigner(report.rho, spec);
    const std::string target =
        out.empty() ? (std::filesystem::path(report_path).parent_path() / "wigner.csv").string() : out;
    write_wigner_csv(target, grid);
    std::printf("W(0,0) %.8f  integral %.6f\n", wigner_at(report.rho, 0.0, 0.0), grid.integral());
    if (grid.boundary_warning) {
        std::cerr << "warning: Wigner function is not negligible at the grid boundary; widen --extent\n";
    }
    std::cout << "wigner: " << target << '\n';
    return 0;
}

int cmd_compare(const std::string &a, const std::string &b, const CompareOptions &options) {
    const auto ma = load_manifest(a);
    const auto mb = load_manifest(b);
    try {
        const auto report = compare_runs(ma, mb, options);
        print_compare_report(std::cout, report);
        return report.pass ? 0 : kExitCompareFailed;
    } catch (const Error &e) {
        if (e.code() != ErrorCode::structural_diff) throw;
        std::cout << "FAIL: " << e.what() << '\n';
        return kExitCompareFailed;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"fockqubit: heralded Fock-qubit simulation, homodyne tomography and model analysis"};
    app.set_version_flag("--version", std::string(fockqubit::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    Overrides run_overrides;
    auto *run = app.add_subcommand("run", "Run the configured pipeline stages");
    run->add_option("config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    run_overrides.attach(run);

    Overrides curve_overrides;
    auto *curves = app.add_subcommand("curves", "Write model curves for the configured grid (no sampling)");
    curves->add_option("config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    curve_overrides.attach(curves);

    std::string csv_path;
    std::string reconstruct_out;
    int dim = kDefaultDim;
    MaxLikOptions defaults;
    int max_iter = defaults.max_iter;
    double tol = defaults.tol;
    auto *reconstruct = app.add_subcommand("reconstruct", "Maximum-likelihood estimate from a theta,x CSV");
    reconstruct->add_option("csv", csv_path, "Quadrature record")->required()->check(CLI::ExistingFile);
    reconstruct->add_option("--dim", dim, "Fock-space truncation")->required();
    reconstruct->add_option("--out", reconstruct_out, "Report path (default: reconstruction.json next to the CSV)");
    reconstruct->add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str();
    reconstruct->add_option("--tol", tol, "Relative log-likelihood gain at which to stop")->capture_default_str();

    std::string report_path;
    std::string wigner_out;
    double extent = 4.0;
    int points = 121;
    auto *wig = app.add_subcommand("wigner", "Wigner grid of a reconstruction report");
    wig->add_option("report", report_path, "reconstruction.json")->required()->check(CLI::ExistingFile);
    wig->add_option("--out", wigner_out, "CSV path (default: wigner.csv next to the report)");
    wig->add_option("--extent", extent, "Half-width of the square grid")->capture_default_str();
    wig->add_option("--points", points, "Points per axis")->capture_default_str();

    std::string manifest_a;
    std::string manifest_b;
    CompareOptions compare_options;
    auto *compare = app.add_subcommand("compare", "Per-point differences between two runs");
    compare->add_option("manifest_a", manifest_a, "Manifest file or run directory")->required();
    compare->add_option("manifest_b", manifest_b, "Manifest file or run directory")->required();
    compare->add_option("--rho11-tol", compare_options.rho11_tol)->capture_default_str();
    compare->add_option("--rho01-tol", compare_options.rho01_tol)->capture_default_str();
    compare->add_option("--efficiency-tol", compare_options.efficiency_tol)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*run) return cmd_run(config_path, run_overrides, false);
        if (*curves) return cmd_run(config_path, curve_overrides, true);
        if (*reconstruct) return cmd_reconstruct(csv_path, dim, reconstruct_out, max_iter, tol);
        if (*wig) return cmd_wigner(report_path, wigner_out, extent, points);
        if (*compare) return cmd_compare(manifest_a, manifest_b, compare_options);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

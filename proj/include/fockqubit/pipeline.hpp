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

// Config-driven simulate -> sample -> reconstruct -> analyze runner.
//
// Output layout under output_dir:
//   point_NNN/state.json            modeled signal state          (simulate)
//   point_NNN/quadratures.csv       homodyne record               (sample)
//   point_NNN/quadratures.json      record metadata sidecar       (sample)
//   point_NNN/reconstruction.json   maximum-likelihood report     (reconstruct)
//   point_NNN/wigner.csv            Wigner grid of the estimate   (analyze)
//   curve_*.csv, measured.csv       model and reconstructed curves (analyze)
//   manifest.json                   config echo, seeds, results, SHA-256 per file

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fockqubit/fockqubit.hpp"

namespace fockqubit {

enum class Stage : unsigned { simulate = 1u, sample = 2u, reconstruct = 4u, analyze = 8u };

class StageSet {
   public:
    StageSet() = default;
    StageSet(std::initializer_list<Stage> stages) {
        for (auto s : stages) bits_ |= static_cast<unsigned>(s);
    }
    static StageSet all() { return {Stage::simulate, Stage::sample, Stage::reconstruct, Stage::analyze}; }

    /// Comma-separated stage names, e.g. "sample,reconstruct".
    static StageSet parse(const std::string &text) {
        StageSet set;
        std::stringstream in(text);
        std::string item;
        while (std::getline(in, item, ',')) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            if (item.empty()) continue;
            if (item == "simulate") set.bits_ |= static_cast<unsigned>(Stage::simulate);
            else if (item == "sample") set.bits_ |= static_cast<unsigned>(Stage::sample);
            else if (item == "reconstruct") set.bits_ |= static_cast<unsigned>(Stage::reconstruct);
            else if (item == "analyze") set.bits_ |= static_cast<unsigned>(Stage::analyze);
            else throw Error(ErrorCode::config, "unknown stage '" + item + "'");
        }
        if (set.empty()) throw Error(ErrorCode::config, "no stages selected");
        return set;
    }

    bool contains(Stage s) const { return (bits_ & static_cast<unsigned>(s)) != 0; }
    bool empty() const { return bits_ == 0; }

    std::string to_string() const {
        std::string out;
        for (auto [s, name] : {std::pair{Stage::simulate, "simulate"}, {Stage::sample, "sample"},
                               {Stage::reconstruct, "reconstruct"}, {Stage::analyze, "analyze"}}) {
            if (contains(s)) out += (out.empty() ? "" : ",") + std::string(name);
        }
        return out;
    }

   private:
    unsigned bits_ = 0;
};

enum class GridKind { rate_khz, alpha };

struct PipelineConfig {
    ModelParams params;  ///< alpha's phase sets the seed phase; its magnitude comes from the grid
    SourceModel model = SourceModel::exact;
    bool with_coherence_factor = true;
    int dim = kDefaultDim;
    int reconstruction_dim = kDefaultDim;
    std::size_t n_samples = 100000;
    double phase_sweeps = 1.0;
    int max_iter = 2000;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    GridKind grid_kind = GridKind::rate_khz;
    /// Added idler rates in kHz, or seed amplitudes |alpha|. The default
    /// includes the point where 24% of clicks come from the seed.
    std::vector<double> grid{0.0, 50.0, 335.0 * 0.24 / 0.76, 200.0, 335.0};
    std::string output_dir = "run";
    StageSet stages = StageSet::all();

    void validate() const {
        params.validate();
        if (grid.empty()) throw Error(ErrorCode::config, "grid must be non-empty");
        for (double g : grid) {
            if (!(g >= 0.0) || !std::isfinite(g)) throw Error(ErrorCode::config, "grid values must be finite and >= 0");
        }
        if (dim < 2 || reconstruction_dim < 2) throw Error(ErrorCode::config, "dims must be >= 2");
        if (model == SourceModel::exact && dim < 6) throw Error(ErrorCode::config, "exact model needs dim >= 6");
        if (stages.contains(Stage::reconstruct) && n_samples < kMinReconstructionSamples) {
            throw Error(ErrorCode::config, "n_samples must be >= 1000 when reconstruct is enabled");
        }
        if (n_samples < 1) throw Error(ErrorCode::config, "n_samples must be >= 1");
        if (output_dir.empty()) throw Error(ErrorCode::config, "output_dir must be set");
        if (stages.empty()) throw Error(ErrorCode::config, "no stages selected");
        if (grid_kind == GridKind::rate_khz && (params.r == 0.0 || params.base_count_rate <= 0.0)) {
            throw Error(ErrorCode::config, "a rate grid needs r > 0 and a positive base_count_rate");
        }
    }
};

namespace detail {

inline std::vector<double> parse_number_list(const std::string &text, const std::string &key) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        try {
            out.push_back(parse_double(item, key));
        } catch (const Error &) {
            throw Error(ErrorCode::config, "cannot parse '" + item + "' in " + key);
        }
    }
    return out;
}

template <typename T>
T get_or(const boost::property_tree::ptree &tree, const std::string &key, T fallback) {
    try {
        return tree.get<T>(key, fallback);
    } catch (const boost::property_tree::ptree_error &e) {
        throw Error(ErrorCode::config, "bad value for " + key + ": " + e.what());
    }
}

inline bool parse_bool(const std::string &text, const std::string &key) {
    if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
    if (text == "false" || text == "no" || text == "0" || text == "off") return false;
    throw Error(ErrorCode::config, "expected a boolean for " + key + ", got '" + text + "'");
}

}  // namespace detail

/// Parse an INI document. Unset keys keep the defaults above.
inline PipelineConfig parse_config(std::istream &in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error &e) {
        throw Error(ErrorCode::config, e.what());
    }
    static const std::map<std::string, std::vector<std::string>> known{
        {"run", {"seed", "output_dir", "stages"}},
        {"model",
         {"r", "alpha_phase", "eta_signal", "eta_idler", "coherence_factor", "base_count_rate", "kind",
          "with_coherence_factor"}},
        {"simulation", {"dim"}},
        {"grid", {"rate_khz", "alpha"}},
        {"homodyne", {"n_samples", "phase_sweeps"}},
        {"tomography", {"dim", "max_iter", "tol"}},
    };
    for (const auto &[section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) throw Error(ErrorCode::config, "unknown section [" + section + "]");
        for (const auto &[key, value] : body) {
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
                throw Error(ErrorCode::config, "unknown key " + section + "." + key);
            }
        }
    }

    PipelineConfig c;
    c.seed = detail::get_or<std::uint64_t>(tree, "run.seed", c.seed);
    c.output_dir = detail::get_or<std::string>(tree, "run.output_dir", c.output_dir);
    if (auto s = tree.get_optional<std::string>("run.stages")) c.stages = StageSet::parse(*s);

    c.params.r = detail::get_or(tree, "model.r", c.params.r);
    const double phase = detail::get_or(tree, "model.alpha_phase", 0.0);
    c.params.alpha = std::polar(1.0, phase);
    c.params.eta_signal = detail::get_or(tree, "model.eta_signal", c.params.eta_signal);
    c.params.eta_idler = detail::get_or(tree, "model.eta_idler", c.params.eta_idler);
    c.params.coherence_factor = detail::get_or(tree, "model.coherence_factor", c.params.coherence_factor);
    c.params.base_count_rate = detail::get_or(tree, "model.base_count_rate", c.params.base_count_rate);
    if (auto k = tree.get_optional<std::string>("model.kind")) c.model = parse_source_model(*k);
    if (auto w = tree.get_optional<std::string>("model.with_coherence_factor")) {
        c.with_coherence_factor = detail::parse_bool(*w, "model.with_coherence_factor");
    }

    c.dim = detail::get_or(tree, "simulation.dim", c.dim);
    c.reconstruction_dim = detail::get_or(tree, "tomography.dim", c.dim);
    c.max_iter = detail::get_or(tree, "tomography.max_iter", c.max_iter);
    c.tol = detail::get_or(tree, "tomography.tol", c.tol);
    c.n_samples = detail::get_or<std::size_t>(tree, "homodyne.n_samples", c.n_samples);
    c.phase_sweeps = detail::get_or(tree, "homodyne.phase_sweeps", c.phase_sweeps);

    const auto rates = tree.get_optional<std::string>("grid.rate_khz");
    const auto alphas = tree.get_optional<std::string>("grid.alpha");
    if (rates && alphas) throw Error(ErrorCode::config, "set only one of grid.rate_khz and grid.alpha");
    if (rates) {
        c.grid_kind = GridKind::rate_khz;
        c.grid = detail::parse_number_list(*rates, "grid.rate_khz");
    } else if (alphas) {
        c.grid_kind = GridKind::alpha;
        c.grid = detail::parse_number_list(*alphas, "grid.alpha");
    }
    return c;
}

inline PipelineConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open config " + path);
    return parse_config(in);
}

inline nlohmann::json config_to_json(const PipelineConfig &c) {
    return {
        {"model",
         {{"r", c.params.r},
          {"alpha_phase", c.params.alpha == Complex{} ? 0.0 : std::arg(c.params.alpha)},
          {"eta_signal", c.params.eta_signal},
          {"eta_idler", c.params.eta_idler},
          {"coherence_factor", c.params.coherence_factor},
          {"base_count_rate", c.params.base_count_rate},
          {"kind", to_string(c.model)},
          {"with_coherence_factor", c.with_coherence_factor}}},
        {"simulation", {{"dim", c.dim}}},
        {"grid", {{c.grid_kind == GridKind::rate_khz ? "rate_khz" : "alpha", c.grid}}},
        {"homodyne", {{"n_samples", c.n_samples}, {"phase_sweeps", c.phase_sweeps}}},
        {"tomography", {{"dim", c.reconstruction_dim}, {"max_iter", c.max_iter}, {"tol", c.tol}}},
        {"run", {{"seed", c.seed}, {"output_dir", c.output_dir}, {"stages", c.stages.to_string()}}},
    };
}

/// Per-grid-point seed derived from (master seed, index) through std::seed_seq,
/// whose mixing algorithm is fixed by the standard.
inline std::uint64_t derive_seed(std::uint64_t master, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline std::string sha256_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string() + " for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::internal, "SHA-256 initialisation failed");
    }
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < length; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 0xf];
    }
    return out;
}

struct GridPoint {
    std::size_t index;
    double added_rate_khz;
    Complex alpha;
    std::uint64_t seed;
    std::string dir;  ///< relative to output_dir
};

struct PointResult {
    GridPoint point;
    CurvePoint model;
    double herald_probability = 0.0;
    std::optional<CurvePoint> reconstructed;
    std::optional<int> iterations;
};

struct RunManifest {
    nlohmann::json json;
    std::filesystem::path path;
};

namespace detail {

inline std::vector<GridPoint> grid_points(const PipelineConfig &c) {
    const double phase = c.params.alpha == Complex{} ? 0.0 : std::arg(c.params.alpha);
    std::vector<GridPoint> points;
    for (std::size_t k = 0; k < c.grid.size(); ++k) {
        GridPoint p;
        p.index = k;
        if (c.grid_kind == GridKind::rate_khz) {
            p.added_rate_khz = c.grid[k];
            ModelParams params = c.params;
            params.alpha = std::polar(1.0, phase);
            p.alpha = seed_for_rate_khz(params, p.added_rate_khz);
        } else {
            p.alpha = std::polar(c.grid[k], phase);
            ModelParams params = c.params;
            params.alpha = p.alpha;
            p.added_rate_khz = c.params.r > 0.0 ? seed_to_count_rate(params).added / 1e3 : 0.0;
        }
        p.seed = derive_seed(c.seed, k);
        char name[32];
        std::snprintf(name, sizeof(name), "point_%03zu", k);
        p.dir = name;
        points.push_back(p);
    }
    return points;
}

inline std::string stage_of(const std::string &relative) {
    const auto name = std::filesystem::path(relative).filename().string();
    if (name == "state.json") return "simulate";
    if (name.rfind("quadratures", 0) == 0) return "sample";
    if (name == "reconstruction.json") return "reconstruct";
    return "analyze";
}

/// Run `task(k)` for k in [0, count) on a small worker pool; rethrows the
/// first failure in index order.
template <typename Task>
void parallel_for(std::size_t count, Task &&task) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                task(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    std::vector<std::future<void>> futures;
    for (std::size_t w = 1; w < workers; ++w) futures.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto &f : futures) f.get();
    for (auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline nlohmann::json curve_point_json(const CurvePoint &p) {
    return {{"added_rate_khz", p.added_rate_khz},
            {"rho11", p.rho11},
            {"rho01_mag", p.rho01_mag},
            {"efficiency", p.efficiency}};
}

}  // namespace detail

/// Execute the enabled stages for every grid point and write the manifest.
/// Identical configs produce byte-identical files.
inline RunManifest run_pipeline(const PipelineConfig &config) {
    namespace fs = std::filesystem;
    config.validate();
    const fs::path root(config.output_dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec || !fs::is_directory(root)) {
        throw Error(ErrorCode::io, "cannot create output directory " + root.string());
    }

    const auto points = detail::grid_points(config);
    std::vector<PointResult> results(points.size());

    // Model values are cheap and always recomputed so the manifest is complete.
    std::optional<TwoModeSqueezer> squeezer;
    if (config.model == SourceModel::exact) squeezer.emplace(config.params.r, config.dim);

    detail::parallel_for(points.size(), [&](std::size_t k) {
        const GridPoint &gp = points[k];
        PointResult &res = results[k];
        res.point = gp;
        ModelParams params = config.params;
        params.alpha = gp.alpha;

        DensityMatrix heralded = DensityMatrix::maximally_mixed(config.dim);
        if (config.model == SourceModel::exact) {
            const auto evolved = evolve_seeded(*squeezer, gp.alpha);
            const auto outcome = herald(DensityMatrix::from_pure(evolved.state), params.eta_idler);
            heralded = outcome.signal_state;
            res.herald_probability = outcome.herald_probability;
        } else {
            heralded = DensityMatrix::from_pure(first_order_qubit(params, config.dim));
            res.herald_probability = params.eta_idler * first_order_pr_count(params);
        }
        DensityMatrix state = apply_loss(heralded, params.eta_signal);
        if (config.with_coherence_factor) state = apply_coherence_factor(state, params.coherence_factor);
        res.model = curve_point(state, gp.added_rate_khz);

        const fs::path dir = root / gp.dir;
        const bool touches_point = config.stages.contains(Stage::simulate) ||
                                   config.stages.contains(Stage::sample) ||
                                   config.stages.contains(Stage::reconstruct);
        if (touches_point) fs::create_directories(dir);

        if (config.stages.contains(Stage::simulate)) {
            nlohmann::json j = density_matrix_to_json(state);
            j["alpha"] = {gp.alpha.real(), gp.alpha.imag()};
            j["added_rate_khz"] = gp.added_rate_khz;
            j["herald_probability"] = res.herald_probability;
            j["model"] = to_string(config.model);
            j["with_coherence_factor"] = config.with_coherence_factor;
            detail::write_json_file((dir / "state.json").string(), j);
        }

        if (config.stages.contains(Stage::sample)) {
            const fs::path state_file = dir / "state.json";
            if (!fs::exists(state_file)) {
                throw Error(ErrorCode::dependency, "sample stage needs " + state_file.string() + " (run simulate)");
            }
            const DensityMatrix stored = density_matrix_from_json(detail::read_json_file(state_file.string()));
            const auto schedule = PhaseSchedule::uniform_scan(config.phase_sweeps);
            const auto samples = sample_quadratures(stored, schedule, config.n_samples, gp.seed);
            write_quadratures_csv((dir / "quadratures.csv").string(), samples);
            detail::write_json_file((dir / "quadratures.json").string(),
                                    {{"seed", gp.seed},
                                     {"n", config.n_samples},
                                     {"phase_schedule", {{"kind", "uniform-scan"}, {"sweeps", config.phase_sweeps}}},
                                     {"alpha", {gp.alpha.real(), gp.alpha.imag()}},
                                     {"added_rate_khz", gp.added_rate_khz},
                                     {"params", config_to_json(config)["model"]}});
        }

        if (config.stages.contains(Stage::reconstruct)) {
            const fs::path csv = dir / "quadratures.csv";
            if (!fs::exists(csv)) {
                throw Error(ErrorCode::dependency, "reconstruct stage needs " + csv.string() + " (run sample)");
            }
            const auto samples = read_quadratures_csv(csv.string());
            const auto report = maxlik_reconstruct(samples, config.reconstruction_dim, config.max_iter, config.tol);
            write_report_json((dir / "reconstruction.json").string(), report);
        }

        const fs::path report_file = dir / "reconstruction.json";
        if (fs::exists(report_file)) {
            const auto report = read_report_json(report_file.string());
            res.reconstructed = curve_point(report.rho, gp.added_rate_khz);
            res.iterations = report.iterations_run;
            if (config.stages.contains(Stage::analyze)) {
                write_wigner_csv((dir / "wigner.csv").string(), wigner(report.rho));
            }
        }
    });

    if (config.stages.contains(Stage::analyze)) {
        std::vector<double> rates;
        for (const auto &p : points) rates.push_back(p.added_rate_khz);
        ModelParams params = config.params;
        const auto write_curve = [&](const std::string &name, SourceModel model, bool with_c) {
            write_curves_csv((root / name).string(), theory_curves(params, rates, model, with_c, config.dim));
        };
        if (config.params.r > 0.0) {
            write_curve("curve_exact.csv", SourceModel::exact, false);
            write_curve("curve_exact_coherence.csv", SourceModel::exact, true);
            write_curve("curve_first_order.csv", SourceModel::first_order, false);
        }
        std::vector<CurvePoint> measured;
        for (const auto &r : results) {
            if (r.reconstructed) measured.push_back(*r.reconstructed);
        }
        if (!measured.empty()) {
            write_curves_csv((root / "measured.csv").string(), measured);
        }
    }

    // Manifest: everything except the manifest itself, sorted by path.
    nlohmann::json files = nlohmann::json::object();
    std::vector<std::string> relative_paths;
    for (const auto &entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), root).generic_string();
        if (rel == "manifest.json") continue;
        relative_paths.push_back(rel);
    }
    std::sort(relative_paths.begin(), relative_paths.end());
    for (const auto &rel : relative_paths) {
        files[detail::stage_of(rel)][rel] = sha256_file(root / rel);
    }

    nlohmann::json point_list = nlohmann::json::array();
    for (const auto &r : results) {
        nlohmann::json j{{"index", r.point.index},
                         {"dir", r.point.dir},
                         {"added_rate_khz", r.point.added_rate_khz},
                         {"alpha", {r.point.alpha.real(), r.point.alpha.imag()}},
                         {"seed", r.point.seed},
                         {"herald_probability", r.herald_probability},
                         {"model", detail::curve_point_json(r.model)}};
        j["reconstructed"] = r.reconstructed ? detail::curve_point_json(*r.reconstructed) : nlohmann::json(nullptr);
        if (r.iterations) j["iterations"] = *r.iterations;
        point_list.push_back(std::move(j));
    }

    RunManifest manifest;
    manifest.json = {{"tool", "fockqubit"},
                     {"version", kVersion},
                     {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                           "." + std::to_string(EIGEN_MINOR_VERSION)},
                     {"config", config_to_json(config)},
                     {"stages_run", config.stages.to_string()},
                     {"points", point_list},
                     {"files", files}};
    manifest.path = root / "manifest.json";
    detail::write_json_file(manifest.path.string(), manifest.json);
    return manifest;
}

// ---------------------------------------------------------------------------
// Run comparison
// ---------------------------------------------------------------------------

/// Per-metric tolerance on |a - b|. The defaults are 3-sigma bands for two
/// 10^5-sample, dim-10 reconstructions that differ only in seed:
/// 3 * sqrt(2) * sigma_single, with sigma_single measured over 12 seeds at
/// added rates 0, 105.8 and 335 kHz (largest of the three: rho11 0.0046,
/// |rho01| 0.0030, efficiency 0.0056).
struct CompareOptions {
    double rho11_tol = 0.02;
    double rho01_tol = 0.013;
    double efficiency_tol = 0.024;
};

struct CompareRow {
    std::size_t index;
    double added_rate_khz;
    std::string source;  ///< "reconstructed" or "model"
    CurvePoint a;
    CurvePoint b;
    bool within = true;
    bool identical = true;

    double rho01_ratio() const { return b.rho01_mag > 0.0 ? a.rho01_mag / b.rho01_mag : 0.0; }
};

struct CompareReport {
    std::vector<CompareRow> rows;
    bool pass = true;
    bool identical = true;
};

inline nlohmann::json load_manifest(const std::string &path) {
    std::filesystem::path p(path);
    if (std::filesystem::is_directory(p)) p /= "manifest.json";
    return detail::read_json_file(p.string());
}

inline CompareReport compare_runs(const nlohmann::json &a, const nlohmann::json &b, const CompareOptions &options = {}) {
    const auto read_point = [](const nlohmann::json &j) {
        return CurvePoint{j.at("added_rate_khz").get<double>(), j.at("rho11").get<double>(),
                          j.at("rho01_mag").get<double>(), j.at("efficiency").get<double>()};
    };
    CompareReport report;
    try {
        const auto &pa = a.at("points");
        const auto &pb = b.at("points");
        if (pa.size() != pb.size()) {
            throw Error(ErrorCode::structural_diff, "runs have different grid sizes (" + std::to_string(pa.size()) +
                                                        " vs " + std::to_string(pb.size()) + ")");
        }
        for (std::size_t k = 0; k < pa.size(); ++k) {
            const double ra = pa[k].at("added_rate_khz").get<double>();
            const double rb = pb[k].at("added_rate_khz").get<double>();
            if (std::abs(ra - rb) > 1e-9 * std::max(1.0, std::abs(ra))) {
                throw Error(ErrorCode::structural_diff, "grid point " + std::to_string(k) + " differs in added rate");
            }
            CompareRow row;
            row.index = k;
            row.added_rate_khz = ra;
            const bool both_reconstructed = !pa[k].at("reconstructed").is_null() && !pb[k].at("reconstructed").is_null();
            row.source = both_reconstructed ? "reconstructed" : "model";
            row.a = read_point(pa[k].at(row.source));
            row.b = read_point(pb[k].at(row.source));
            row.identical = row.a.rho11 == row.b.rho11 && row.a.rho01_mag == row.b.rho01_mag &&
                            row.a.efficiency == row.b.efficiency;
            row.within = std::abs(row.a.rho11 - row.b.rho11) <= options.rho11_tol &&
                         std::abs(row.a.rho01_mag - row.b.rho01_mag) <= options.rho01_tol &&
                         std::abs(row.a.efficiency - row.b.efficiency) <= options.efficiency_tol;
            report.pass = report.pass && row.within;
            report.identical = report.identical && row.identical;
            report.rows.push_back(row);
        }
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::io, std::string("malformed manifest: ") + e.what());
    }
    return report;
}

inline void print_compare_report(std::ostream &out, const CompareReport &report) {
    out << "index,added_rate_khz,source,d_rho11,d_rho01_mag,d_efficiency,rho01_ratio,status\n";
    for (const auto &r : report.rows) {
        out << r.index << ',' << r.added_rate_khz << ',' << r.source << ',' << (r.a.rho11 - r.b.rho11) << ','
            << (r.a.rho01_mag - r.b.rho01_mag) << ',' << (r.a.efficiency - r.b.efficiency) << ','
            << r.rho01_ratio() << ',' << (r.identical ? "identical" : (r.within ? "stochastic" : "FAIL")) << '\n';
    }
    out << (report.pass ? (report.identical ? "PASS: runs identical\n" : "PASS: differences within statistical bands\n")
                        : "FAIL: differences exceed tolerance\n");
}

}  // namespace fockqubit

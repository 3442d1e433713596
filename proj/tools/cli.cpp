#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "attnpca/attention.hpp"
#include "attnpca/datamodel.hpp"
#include "attnpca/error.hpp"
#include "attnpca/facespace.hpp"
#include "attnpca/harness.hpp"
#include "attnpca/synth.hpp"
#include "key_value_config.hpp"

namespace fs = std::filesystem;

namespace attnpca::cli {

namespace {

// Flags shared by every subcommand.
struct CommonOptions {
    std::optional<std::string> config;
    std::optional<std::string> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* app, CommonOptions& common) {
    app->add_option("--config", common.config, "Key-value config file; flags override its values");
    app->add_option("--seed", common.seed, "Root random seed");
    app->add_option("--out", common.out, "Output path");
}

// Resolves a setting: command-line flag first, then config key.
class Settings {
public:
    Settings(const CommonOptions& common, const std::set<std::string>& allowed_keys) : common_(common) {
        if (common.config) {
            config_ = KeyValueConfig::parse_file(*common.config);
            std::set<std::string> keys = allowed_keys;
            keys.insert({"seed", "out"});
            config_.check_keys(keys);
        }
    }

    std::optional<std::string> get(const std::optional<std::string>& flag, const std::string& key) const {
        if (flag) return flag;
        return config_.get(key);
    }

    std::string get_or(const std::optional<std::string>& flag, const std::string& key, std::string fallback) const {
        return get(flag, key).value_or(std::move(fallback));
    }

    std::string require(const std::optional<std::string>& flag, const std::string& key) const {
        auto v = get(flag, key);
        if (!v) throw UsageError("missing required setting '" + key + "' (flag --" + dashed(key) + " or config key)");
        return *v;
    }

    // Flag paths are relative to the working directory, config paths to the config file.
    std::optional<fs::path> path(const std::optional<std::string>& flag, const std::string& key) const {
        if (flag) return fs::path(*flag);
        if (auto v = config_.get(key)) return config_.resolve(*v);
        return std::nullopt;
    }

    fs::path require_path(const std::optional<std::string>& flag, const std::string& key) const {
        auto p = path(flag, key);
        if (!p) throw UsageError("missing required setting '" + key + "' (flag --" + dashed(key) + " or config key)");
        return *p;
    }

    std::uint64_t seed() const {
        if (auto s = get(common_.seed, "seed")) return parse_u64(*s, "seed");
        return 0;
    }

    fs::path out() const { return require_path(common_.out, "out"); }

private:
    static std::string dashed(std::string key) {
        std::replace(key.begin(), key.end(), '_', '-');
        return key;
    }

    const CommonOptions& common_;
    KeyValueConfig config_;
};

fs::path with_extension(fs::path p, const std::string& ext) {
    p.replace_extension(ext);
    return p;
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// ---------------------------------------------------------------- build-map

struct BuildMapOptions {
    CommonOptions common;
    std::optional<std::string> gaze_dir, stimulus_width, stimulus_height, width, height, radius, min_duration, rate,
        sigma, skip_first, aggregate;
};

struct Participant {
    std::string name;
    std::vector<fs::path> trials;
};

std::vector<Participant> discover_participants(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("gaze directory " + dir.string() + " does not exist");
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(dir)) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());

    std::vector<Participant> out;
    for (const auto& p : entries) {
        if (fs::is_regular_file(p) && p.extension() == ".csv") {
            out.push_back(Participant{p.stem().string(), {p}});
        } else if (fs::is_directory(p)) {
            Participant part{p.filename().string(), {}};
            for (const auto& t : fs::directory_iterator(p))
                if (t.is_regular_file() && t.path().extension() == ".csv") part.trials.push_back(t.path());
            std::sort(part.trials.begin(), part.trials.end());
            if (!part.trials.empty()) out.push_back(std::move(part));
        }
    }
    return out;
}

int cmd_build_map(const BuildMapOptions& o, std::ostream& out, std::ostream& err) {
    const Settings s(o.common, {"gaze_dir", "stimulus_width", "stimulus_height", "width", "height", "radius",
                                "min_duration", "rate", "sigma", "skip_first", "aggregate"});
    const fs::path gaze_dir = s.require_path(o.gaze_dir, "gaze_dir");
    const fs::path out_path = s.out();
    const int stim_w = static_cast<int>(parse_int(s.get_or(o.stimulus_width, "stimulus_width", "512"), "stimulus_width"));
    const int stim_h =
        static_cast<int>(parse_int(s.get_or(o.stimulus_height, "stimulus_height", "512"), "stimulus_height"));
    const int width = static_cast<int>(parse_int(s.get_or(o.width, "width", "128"), "width"));
    const int height = static_cast<int>(parse_int(s.get_or(o.height, "height", "128"), "height"));
    FixationFilterParams filter;
    filter.radius_px = parse_double(s.get_or(o.radius, "radius", "50"), "radius");
    filter.min_duration_ms = parse_double(s.get_or(o.min_duration, "min_duration", "60"), "min_duration");
    filter.rate_hz = parse_double(s.get_or(o.rate, "rate", "300"), "rate");
    const double sigma = parse_double(s.get_or(o.sigma, "sigma", "25"), "sigma");
    const long skip = parse_int(s.get_or(o.skip_first, "skip_first", "2"), "skip_first");
    const std::string aggregate = s.get_or(o.aggregate, "aggregate", "sum");
    if (skip < 0) throw UsageError("skip_first must be non-negative");
    if (aggregate != "sum" && aggregate != "per_trial") throw UsageError("aggregate must be sum or per_trial");
    if (stim_w < 1 || stim_h < 1 || width < 1 || height < 1) throw UsageError("map dimensions must be positive");
    if (stim_w % width != 0 || stim_h % height != 0)
        throw UsageError("stimulus size must be an integer multiple of the map size");

    const auto participants = discover_participants(gaze_dir);
    if (participants.empty()) throw DataError("no gaze trials found in " + gaze_dir.string());

    std::vector<HeatMap> heats;
    std::size_t kept_participants = 0;
    for (const auto& part : participants) {
        std::vector<std::vector<GazeSample>> trials;
        double fraction = 0.0;
        for (const auto& t : part.trials) {
            trials.push_back(read_gaze_csv(t));
            fraction += valid_fraction(trials.back());
        }
        fraction /= static_cast<double>(trials.size());
        if (fraction < kMinValidFraction) {
            err << "warning: excluding participant '" << part.name << "': " << format_number(100.0 * fraction)
                << "% valid samples (< " << format_number(100.0 * kMinValidFraction) << "%)\n";
            continue;
        }
        ++kept_participants;
        for (const auto& samples : trials) {
            const auto fixations = filter_fixations(samples, filter);
            HeatMap heat = accumulate_heatmap(fixations, stim_w, stim_h, sigma, static_cast<std::size_t>(skip));
            if (aggregate == "per_trial") {
                const double total = heat.total();
                if (!(total > 0.0)) continue;
                std::vector<double> v = heat.values();
                for (auto& x : v) x /= total;
                heat = HeatMap(stim_w, stim_h, std::move(v));
            }
            heats.push_back(std::move(heat));
        }
    }
    if (kept_participants == 0)
        throw DataError("no valid trials: every participant is below the validity threshold");
    if (heats.empty()) throw DataError("no trial produced fixations after skipping");

    const HeatMap averaged = average_heatmaps(heats);
    AttentionMap map;
    try {
        map = normalize(downsample(averaged, width, height));
    } catch (const DataError&) {
        throw DataError("no fixation mass remains after filtering and skipping");
    }

    ensure_parent(out_path);
    write_attention_map(out_path, map);
    write_pgm(with_extension(out_path, ".pgm"), attention_to_raster(map, ImageGeometry{height, width}));
    out << "# seed=" << s.seed() << '\n'
        << "participants=" << kept_participants << '/' << participants.size() << " trials=" << heats.size()
        << " map=" << out_path.string() << " n=" << map.size() << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------------- fit

struct FitOptions {
    CommonOptions common;
    std::optional<std::string> dataset, method, map, components;
    bool verify_uniform = false;
};

bool verify_uniform_equivalence(const DataMatrix& data, Eigen::Index m, std::ostream& out) {
    const FaceSpace pca = fit_pca(data, m);
    const FaceSpace wpca = fit_wpca(data, uniform_map(static_cast<std::size_t>(data.dimension())), m);
    const double n = static_cast<double>(data.dimension());
    double worst_cos = 1.0;
    double worst_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        worst_cos = std::min(worst_cos, std::abs(pca.components.col(i).dot(wpca.components.col(i))));
        worst_ratio = std::max(worst_ratio, std::abs(wpca.eigenvalues[i] * n / pca.eigenvalues[i] - 1.0));
    }
    const bool ok = worst_cos >= 1.0 - 1e-8 && worst_ratio <= 1e-8;
    out << "verify-uniform: " << (ok ? "ok" : "FAILED") << " min|cos|=" << format_number(worst_cos)
        << " max|ratio-1|=" << format_number(worst_ratio) << '\n';
    return ok;
}

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream&) {
    const Settings s(o.common, {"dataset", "method", "map", "components"});
    const Method method = parse_method(s.require(o.method, "method"));
    const auto map_path = s.path(o.map, "map");
    if (method == Method::pca && map_path) throw UsageError("pca does not take an attention map");
    if (method != Method::pca && !map_path) throw UsageError(std::string(to_string(method)) + " needs --map");
    const long m = parse_int(s.require(o.components, "components"), "components");
    if (m < 1) throw UsageError("components must be at least 1");
    const fs::path out_path = s.out();

    std::optional<AttentionMap> map;
    if (map_path) map = read_attention_map(*map_path);
    const DataMatrix data = load_dataset(read_manifest(s.require_path(o.dataset, "dataset")));

    FaceSpace space;
    switch (method) {
    case Method::pca: space = fit_pca(data, m); break;
    case Method::wpca: space = fit_wpca(data, *map, m); break;
    case Method::dpca: space = fit_dpca(data, *map, m); break;
    }

    ensure_parent(out_path);
    write_face_space(out_path, space);
    std::ofstream meta(with_extension(out_path, ".json"), std::ios::binary);
    meta << face_space_metadata(space, {{"seed", std::to_string(s.seed())},
                                        {"image_geometry", std::to_string(data.geometry().rows) + "x" +
                                                               std::to_string(data.geometry().cols)},
                                        {"samples", std::to_string(data.sample_count())}});
    if (!meta) throw DataError("failed writing face space metadata");
    out << "# seed=" << s.seed() << '\n'
        << "method=" << to_string(method) << " m=" << space.component_count() << " n=" << space.dimension()
        << " out=" << out_path.string() << '\n';

    if (o.verify_uniform && !verify_uniform_equivalence(data, m, out)) return kNumericalError;
    return kSuccess;
}

// --------------------------------------------------------------- experiment

struct ExperimentOptions {
    CommonOptions common;
    std::optional<std::string> dataset, test_dataset, map, task, methods, conditions, components, folds, repeats,
        protocol, covariance, threads, fixation_count, fixation_sigma;
};

int cmd_experiment(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
    const Settings s(o.common, {"dataset", "test_dataset", "map", "task", "methods", "conditions", "components",
                                "folds", "repeats", "protocol", "covariance", "threads", "fixation_count",
                                "fixation_sigma"});
    ExperimentConfig config;
    config.seed = s.seed();
    config.task = parse_task(s.get_or(o.task, "task", "gender"));
    config.protocol = parse_protocol(s.get_or(o.protocol, "protocol", "cv10"));
    config.covariance = parse_covariance_mode(s.get_or(o.covariance, "covariance", "pooled"));
    config.folds = static_cast<std::size_t>(parse_u64(s.get_or(o.folds, "folds", "10"), "folds"));
    config.repeats = static_cast<std::size_t>(parse_u64(s.get_or(o.repeats, "repeats", "1"), "repeats"));
    config.threads = static_cast<std::size_t>(parse_u64(s.get_or(o.threads, "threads", "0"), "threads"));
    config.methods.clear();
    for (const auto& m : split_list(s.get_or(o.methods, "methods", "wpca,dpca"))) config.methods.push_back(parse_method(m));
    config.component_grid.clear();
    for (long m : parse_int_list(s.get_or(o.components, "components", "20:240:20"))) config.component_grid.push_back(m);
    const auto fixation_count = parse_u64(s.get_or(o.fixation_count, "fixation_count", "256"), "fixation_count");
    const double fixation_sigma = parse_double(s.get_or(o.fixation_sigma, "fixation_sigma", "2"), "fixation_sigma");
    const fs::path out_dir = s.out();

    const auto map_path = s.path(o.map, "map");
    std::vector<MapProvenance> kinds;
    for (const auto& c : split_list(s.get_or(o.conditions, "conditions", "empirical,random_uniform")))
        kinds.push_back(parse_provenance(c));
    if (config.methods.empty()) throw UsageError("no methods given");

    // Fail fast on every input before any computation.
    const fs::path dataset_path = s.require_path(o.dataset, "dataset");
    if (!fs::exists(dataset_path)) throw DataError("dataset manifest " + dataset_path.string() + " not found");
    std::optional<fs::path> test_path = s.path(o.test_dataset, "test_dataset");
    if (config.protocol == Protocol::cross_db && !test_path) throw UsageError("cross_db needs test_dataset");
    if (test_path && !fs::exists(*test_path)) throw DataError("test manifest " + test_path->string() + " not found");
    std::optional<AttentionMap> empirical;
    if (std::find(kinds.begin(), kinds.end(), MapProvenance::empirical) != kinds.end()) {
        if (!map_path) throw UsageError("the empirical condition needs a map");
        if (!fs::exists(*map_path)) throw DataError("attention map " + map_path->string() + " not found");
        empirical = read_attention_map(*map_path);
    }
    for (auto kind : kinds) {
        MapCondition c;
        c.kind = kind;
        if (kind == MapProvenance::empirical) c.map = empirical;
        c.fixation_count = static_cast<std::size_t>(fixation_count);
        c.kernel_sigma = fixation_sigma;
        config.maps.push_back(std::move(c));
    }

    const DataMatrix data = load_dataset(read_manifest(dataset_path));
    std::optional<DataMatrix> test;
    if (config.protocol == Protocol::cross_db) test = load_dataset(read_manifest(*test_path));

    const ExperimentResult result = run_sweep(config, data, test ? &*test : nullptr);
    const auto summary = summarize(result);

    std::vector<ConditionComparison> comparisons;
    for (Method m : config.methods) {
        if (m == Method::pca || !empirical) continue;
        for (const auto& c : config.maps) {
            if (c.kind == MapProvenance::empirical) continue;
            try {
                comparisons.push_back(compare_conditions(result, m, "empirical", to_string(c.kind)));
            } catch (const UsageError& e) {
                err << "warning: skipping paired test: " << e.what() << '\n';
            }
        }
    }

    fs::create_directories(out_dir);
    {
        std::ofstream f(out_dir / "results.csv", std::ios::binary);
        write_results_csv(f, result);
    }
    {
        std::ofstream f(out_dir / "summary.csv", std::ios::binary);
        write_summary_csv(f, summary, config.seed);
    }
    {
        std::ofstream f(out_dir / "paired_tests.csv", std::ios::binary);
        write_comparisons_csv(f, comparisons, config.seed);
    }

    out << "# seed=" << config.seed << '\n'
        << "rows=" << result.rows.size() << " out=" << out_dir.string() << '\n';
    for (const auto& c : comparisons)
        out << to_string(c.method) << ": " << c.map_a << " mean=" << format_number(c.mean_a) << " vs " << c.map_b
            << " mean=" << format_number(c.mean_b) << " p(greater)=" << format_number(c.greater.p_value)
            << " p(two-sided)=" << format_number(c.two_sided.p_value) << '\n';
    return kSuccess;
}

// -------------------------------------------------------------------- synth

struct SynthOptions {
    CommonOptions common;
    std::optional<std::string> rows, cols, per_class, patch_row, patch_col, patch_size, base, signal, noise_sd,
        nuisance_count, nuisance_sigma, nuisance_sd, labels;
};

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream&) {
    const Settings s(o.common, {"rows", "cols", "per_class", "patch_row", "patch_col", "patch_size", "base", "signal",
                                "noise_sd", "nuisance_count", "nuisance_sigma", "nuisance_sd", "labels"});
    SynthSpec spec;
    const auto int_of = [&](const std::optional<std::string>& flag, const char* key, long fallback) {
        return parse_int(s.get_or(flag, key, std::to_string(fallback)), key);
    };
    const auto real_of = [&](const std::optional<std::string>& flag, const char* key, double fallback) {
        const auto v = s.get(flag, key);
        return v ? parse_double(*v, key) : fallback;
    };
    spec.rows = static_cast<int>(int_of(o.rows, "rows", spec.rows));
    spec.cols = static_cast<int>(int_of(o.cols, "cols", spec.cols));
    const long per_class = int_of(o.per_class, "per_class", static_cast<long>(spec.per_class));
    if (per_class < 0) throw UsageError("per_class must be positive");
    spec.per_class = static_cast<std::size_t>(per_class);
    spec.patch_row = static_cast<int>(int_of(o.patch_row, "patch_row", spec.patch_row));
    spec.patch_col = static_cast<int>(int_of(o.patch_col, "patch_col", spec.patch_col));
    spec.patch_size = static_cast<int>(int_of(o.patch_size, "patch_size", spec.patch_size));
    spec.base = real_of(o.base, "base", spec.base);
    spec.signal = real_of(o.signal, "signal", spec.signal);
    spec.noise_sd = real_of(o.noise_sd, "noise_sd", spec.noise_sd);
    const long nuisance = int_of(o.nuisance_count, "nuisance_count", static_cast<long>(spec.nuisance_count));
    if (nuisance < 0) throw UsageError("nuisance_count must be non-negative");
    spec.nuisance_count = static_cast<std::size_t>(nuisance);
    spec.nuisance_sigma = real_of(o.nuisance_sigma, "nuisance_sigma", spec.nuisance_sigma);
    spec.nuisance_sd = real_of(o.nuisance_sd, "nuisance_sd", spec.nuisance_sd);
    const std::string labels = s.get_or(o.labels, "labels", "gender");
    if (labels != "gender" && labels != "expression") throw UsageError("labels must be gender or expression");
    spec.expression_labels = labels == "expression";
    validate(spec);

    const fs::path dir = s.out();
    const auto dataset = generate_synthetic(spec, s.seed());
    write_synthetic(dataset, spec, dir);
    out << "# seed=" << s.seed() << '\n'
        << "images=" << dataset.images.size() << " geometry=" << spec.rows << 'x' << spec.cols
        << " manifest=" << (dir / "manifest.csv").string() << " map=" << (dir / "true_map.bin").string() << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------- summarize

struct SummarizeOptions {
    CommonOptions common;
    std::optional<std::string> results;
    bool pooled = false;
};

int cmd_summarize(const SummarizeOptions& o, std::ostream& out, std::ostream&) {
    const Settings s(o.common, {"results"});
    const fs::path results_path = s.require_path(o.results, "results");
    std::ifstream in(results_path);
    if (!in) throw DataError("cannot open results " + results_path.string());
    const ExperimentResult result = read_results_csv(in);
    const auto rows = summarize(result, o.pooled ? SummaryGrouping::pooled : SummaryGrouping::per_components);
    const fs::path out_path = s.out();
    ensure_parent(out_path);
    std::ofstream f(out_path, std::ios::binary);
    write_summary_csv(f, rows, result.seed);
    if (!f) throw DataError("failed writing " + out_path.string());
    out << "# seed=" << result.seed << '\n' << "groups=" << rows.size() << " out=" << out_path.string() << '\n';
    return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attention-weighted face-space construction and classification experiments", "attnpca"};
    app.require_subcommand(1);

    BuildMapOptions bm;
    auto* build_map = app.add_subcommand("build-map", "Build an attention map from gaze CSV files");
    add_common(build_map, bm.common);
    build_map->add_option("--gaze-dir", bm.gaze_dir, "Directory of trial CSVs (subdirectories = participants)");
    build_map->add_option("--stimulus-width", bm.stimulus_width, "Stimulus width in screen pixels (512)");
    build_map->add_option("--stimulus-height", bm.stimulus_height, "Stimulus height in screen pixels (512)");
    build_map->add_option("--width", bm.width, "Map width in image pixels (128)");
    build_map->add_option("--height", bm.height, "Map height in image pixels (128)");
    build_map->add_option("--radius", bm.radius, "Fixation dispersion radius in pixels (50)");
    build_map->add_option("--min-duration", bm.min_duration, "Minimum fixation duration in ms (60)");
    build_map->add_option("--rate", bm.rate, "Sampling rate in Hz (300)");
    build_map->add_option("--sigma", bm.sigma, "Heat-map kernel sigma in stimulus pixels (25)");
    build_map->add_option("--skip-first", bm.skip_first, "Fixations dropped at the start of each trial (2)");
    build_map->add_option("--aggregate", bm.aggregate, "sum (default) or per_trial");

    FitOptions fo;
    auto* fit = app.add_subcommand("fit", "Fit a pca, wpca or dpca face space");
    add_common(fit, fo.common);
    fit->add_option("--dataset", fo.dataset, "Dataset manifest CSV");
    fit->add_option("--method", fo.method, "pca, wpca or dpca");
    fit->add_option("--map", fo.map, "Attention map file (wpca/dpca)");
    fit->add_option("-m,--components", fo.components, "Number of components");
    fit->add_flag("--verify-uniform", fo.verify_uniform, "Check that a uniform-weight wpca reproduces pca");

    ExperimentOptions eo;
    auto* experiment = app.add_subcommand("experiment", "Run a cross-validated component sweep");
    add_common(experiment, eo.common);
    experiment->add_option("--dataset", eo.dataset, "Dataset manifest CSV");
    experiment->add_option("--test-dataset", eo.test_dataset, "Test manifest for the cross_db protocol");
    experiment->add_option("--map", eo.map, "Empirical attention map file");
    experiment->add_option("--task", eo.task, "gender or expression");
    experiment->add_option("--methods", eo.methods, "Comma list of pca,wpca,dpca");
    experiment->add_option("--conditions", eo.conditions, "Comma list of empirical,random_uniform,random_fixation");
    experiment->add_option("--components", eo.components, "Comma list or start:stop:step");
    experiment->add_option("--folds", eo.folds, "Fold count (10)");
    experiment->add_option("--repeats", eo.repeats, "Repeats with fresh folds and random maps (1)");
    experiment->add_option("--protocol", eo.protocol, "cv10 or cross_db");
    experiment->add_option("--covariance", eo.covariance, "pooled or whitening");
    experiment->add_option("--threads", eo.threads, "Worker threads (0: ATTNPCA_THREADS or all cores)");
    experiment->add_option("--fixation-count", eo.fixation_count, "Fixations per random_fixation map (256)");
    experiment->add_option("--fixation-sigma", eo.fixation_sigma, "Kernel sigma of random_fixation maps (2)");

    SynthOptions so;
    auto* synth = app.add_subcommand("synth", "Generate the two-class informative-patch dataset");
    add_common(synth, so.common);
    synth->add_option("--rows", so.rows);
    synth->add_option("--cols", so.cols);
    synth->add_option("--per-class", so.per_class);
    synth->add_option("--patch-row", so.patch_row);
    synth->add_option("--patch-col", so.patch_col);
    synth->add_option("--patch-size", so.patch_size);
    synth->add_option("--base", so.base);
    synth->add_option("--signal", so.signal);
    synth->add_option("--noise-sd", so.noise_sd);
    synth->add_option("--nuisance-count", so.nuisance_count);
    synth->add_option("--nuisance-sigma", so.nuisance_sigma);
    synth->add_option("--nuisance-sd", so.nuisance_sd);
    synth->add_option("--labels", so.labels, "gender (m/f) or expression (s/n)");

    SummarizeOptions su;
    auto* summarize_cmd = app.add_subcommand("summarize", "Summarize a results CSV for boxplots");
    add_common(summarize_cmd, su.common);
    summarize_cmd->add_option("--results", su.results, "results.csv from `experiment`");
    summarize_cmd->add_flag("--pooled", su.pooled, "Pool all component counts into one group");

    std::vector<std::string> argv_storage{"attnpca"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (*build_map) return cmd_build_map(bm, out, err);
        if (*fit) return cmd_fit(fo, out, err);
        if (*experiment) return cmd_experiment(eo, out, err);
        if (*synth) return cmd_synth(so, out, err);
        if (*summarize_cmd) return cmd_summarize(su, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsageError;
}

} // namespace attnpca::cli

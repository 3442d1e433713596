#include "attnpca/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "attnpca/error.hpp"
#include "attnpca/rng.hpp"

namespace attnpca {

std::string_view to_string(Task t) { return t == Task::gender ? "gender" : "expression"; }
std::string_view to_string(Protocol p) { return p == Protocol::cv10 ? "cv10" : "cross_db"; }

Task parse_task(std::string_view name) {
    if (name == "gender") return Task::gender;
    if (name == "expression") return Task::expression;
    throw UsageError("unknown task '" + std::string(name) + "' (expected gender or expression)");
}

Protocol parse_protocol(std::string_view name) {
    if (name == "cv10") return Protocol::cv10;
    if (name == "cross_db") return Protocol::cross_db;
    throw UsageError("unknown protocol '" + std::string(name) + "' (expected cv10 or cross_db)");
}

std::vector<std::string> task_labels(const DataMatrix& data, Task task) {
    std::vector<std::string> out;
    out.reserve(data.labels().size());
    for (const auto& l : data.labels()) {
        if (task == Task::gender)
            out.push_back(l.gender ? std::string(1, to_code(l.gender)) : std::string());
        else
            out.push_back(l.expression ? std::string(1, to_code(l.expression)) : std::string());
    }
    return out;
}

std::vector<std::size_t> stratified_kfold(std::span<const std::string> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw UsageError("fold count must be at least 2");
    std::map<std::string, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!labels[i].empty()) classes[labels[i]].push_back(i);
    if (classes.empty()) throw DataError("no labeled samples to split");

    std::vector<std::size_t> fold(labels.size(), kUnassignedFold);
    Rng rng(seed);
    std::size_t next = 0;
    for (auto& [label, members] : classes) {
        if (members.size() < k)
            throw DataError("class '" + label + "' has " + std::to_string(members.size()) + " samples, fewer than " +
                            std::to_string(k) + " folds");
        rng.shuffle(members.begin(), members.end());
        for (std::size_t idx : members) fold[idx] = next++ % k;
    }
    return fold;
}

FaceSpace fit_face_space(const DataMatrix& train, Method method, const AttentionMap* map) {
    switch (method) {
    case Method::pca: return fit_pca_all(train);
    case Method::wpca:
        if (!map) throw UsageError("wpca needs an attention map");
        return fit_wpca_all(train, *map);
    case Method::dpca:
        if (!map) throw UsageError("dpca needs an attention map");
        return fit_dpca_full(train, *map);
    }
    throw UsageError("unknown method");
}

double evaluate_components(const FaceSpace& fs, const Eigen::MatrixXd& train_rows,
                           std::span<const std::string> train_labels, const Eigen::MatrixXd& test_rows,
                           std::span<const std::string> test_labels, Eigen::Index m, CovarianceMode covariance) {
    if (m < 1) throw UsageError("component count must be at least 1");
    const Eigen::Index available = fs.component_count();
    if (fs.method == Method::dpca ? m >= available : m > available)
        throw NumericalError("requested " + std::to_string(m) + " components but the training data supports " +
                             (fs.method == Method::dpca ? "fewer than " : "at most ") + std::to_string(available));
    if (static_cast<std::size_t>(train_rows.rows()) != train_labels.size())
        throw UsageError("training labels do not align with rows");

    std::vector<Eigen::Index> labeled;
    std::vector<std::string> kept_labels;
    for (std::size_t i = 0; i < train_labels.size(); ++i) {
        if (train_labels[i].empty()) continue;
        labeled.push_back(static_cast<Eigen::Index>(i));
        kept_labels.push_back(train_labels[i]);
    }
    Eigen::MatrixXd labeled_rows(static_cast<Eigen::Index>(labeled.size()), train_rows.cols());
    for (std::size_t i = 0; i < labeled.size(); ++i)
        labeled_rows.row(static_cast<Eigen::Index>(i)) = train_rows.row(labeled[i]);

    const Eigen::MatrixXd train_proj = project_rows(fs, labeled_rows, m);
    const Eigen::MatrixXd test_proj = project_rows(fs, test_rows, m);
    const ClassifierModel model = train(train_proj, kept_labels, covariance, &fs.eigenvalues);
    return accuracy(model, test_proj, test_labels);
}

double run_cell(const DataMatrix& train, std::span<const std::string> train_labels, const Eigen::MatrixXd& test_rows,
                std::span<const std::string> test_labels, Method method, const AttentionMap* map, Eigen::Index m,
                CovarianceMode covariance) {
    const FaceSpace fs = fit_face_space(train, method, map);
    return evaluate_components(fs, train.rows(), train_labels, test_rows, test_labels, m, covariance);
}

std::vector<Eigen::Index> default_component_grid() {
    std::vector<Eigen::Index> grid;
    for (Eigen::Index m = 20; m <= 240; m += 20) grid.push_back(m);
    return grid;
}

namespace {

constexpr std::uint64_t kFoldStream = 0xF01D;
constexpr std::uint64_t kMapStream = 0x3A9;

std::size_t splits_per_repeat(const ExperimentConfig& config) {
    return config.protocol == Protocol::cv10 ? config.folds : 1;
}

} // namespace

std::vector<Split> plan_splits(const ExperimentConfig& config, const DataMatrix& train, const DataMatrix* test) {
    if (config.folds < 2) throw UsageError("fold count must be at least 2");
    if (config.repeats < 1) throw UsageError("repeat count must be at least 1");
    const auto labels = task_labels(train, config.task);

    std::vector<Split> splits;
    for (std::size_t r = 0; r < config.repeats; ++r) {
        const auto fold = stratified_kfold(labels, config.folds, derive_seed(config.seed, {kFoldStream, r}));
        if (config.protocol == Protocol::cv10) {
            for (std::size_t f = 0; f < config.folds; ++f) {
                Split s;
                for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? s.test : s.train).push_back(i);
                splits.push_back(std::move(s));
            }
        } else {
            if (!test) throw UsageError("cross_db protocol needs a test dataset");
            Split s;
            for (std::size_t i = 0; i < fold.size(); ++i)
                if (fold[i] != 0) s.train.push_back(i); // unlabeled rows carry kUnassignedFold
            const auto test_labels = task_labels(*test, config.task);
            for (std::size_t i = 0; i < test_labels.size(); ++i)
                if (!test_labels[i].empty()) s.test.push_back(i);
            if (s.test.empty()) throw DataError("test dataset has no labeled samples for the task");
            splits.push_back(std::move(s));
        }
    }
    return splits;
}

AttentionMap condition_map(const ExperimentConfig& config, std::size_t condition_index, std::size_t repeat,
                           ImageGeometry geometry) {
    const MapCondition& c = config.maps.at(condition_index);
    const std::uint64_t seed = derive_seed(config.seed, {kMapStream, condition_index, repeat});
    switch (c.kind) {
    case MapProvenance::empirical:
        if (!c.map) throw UsageError("empirical map condition has no map");
        return *c.map;
    case MapProvenance::random_uniform: return random_uniform_map(geometry.size(), seed);
    case MapProvenance::random_fixation:
        return random_fixation_map(geometry.cols, geometry.rows, c.fixation_count, c.kernel_sigma, seed);
    }
    throw UsageError("unknown map condition");
}

std::size_t default_thread_count() {
    if (const char* env = std::getenv("ATTNPCA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Unit {
    std::size_t method_index;
    std::size_t condition_index; // into the expanded condition list of the method
    std::size_t split_index;
};

[[noreturn]] void rethrow_with_context(std::exception_ptr e, const std::string& context) {
    try {
        std::rethrow_exception(e);
    } catch (const UsageError& ex) {
        throw UsageError(context + ": " + ex.what());
    } catch (const DataError& ex) {
        throw DataError(context + ": " + ex.what());
    } catch (const NumericalError& ex) {
        throw NumericalError(context + ": " + ex.what());
    } catch (const std::exception& ex) {
        throw std::runtime_error(context + ": " + ex.what());
    }
}

} // namespace

ExperimentResult run_sweep(const ExperimentConfig& config, const DataMatrix& data, const DataMatrix* test) {
    if (config.methods.empty()) throw UsageError("no methods configured");
    if (config.component_grid.empty()) throw UsageError("component grid is empty");
    for (auto m : config.component_grid)
        if (m < 1) throw UsageError("component counts must be positive");
    const bool needs_maps = std::any_of(config.methods.begin(), config.methods.end(),
                                        [](Method m) { return m != Method::pca; });
    if (needs_maps && config.maps.empty()) throw UsageError("wpca/dpca need at least one map condition");
    for (const auto& c : config.maps) {
        if (c.kind != MapProvenance::empirical) continue;
        if (!c.map) throw UsageError("empirical map condition has no map");
        if (c.map->size() != data.dimension())
            throw DataError("attention map length " + std::to_string(c.map->size()) + " does not match image size " +
                            std::to_string(data.dimension()));
    }
    const DataMatrix& test_data = config.protocol == Protocol::cv10 ? data : (test ? *test : data);
    if (config.protocol == Protocol::cross_db) {
        if (!test) throw UsageError("cross_db protocol needs a test dataset");
        if (test->geometry() != data.geometry()) throw DataError("training and test datasets differ in geometry");
    }

    const auto splits = plan_splits(config, data, test);
    const std::size_t per_repeat = splits_per_repeat(config);
    const auto train_labels_all = task_labels(data, config.task);
    const auto test_labels_all = task_labels(test_data, config.task);

    // Condition maps, one per (condition, repeat).
    std::vector<std::vector<AttentionMap>> maps(config.maps.size());
    for (std::size_t c = 0; c < config.maps.size(); ++c)
        for (std::size_t r = 0; r < config.repeats; ++r) maps[c].push_back(condition_map(config, c, r, data.geometry()));

    // pca runs once, under the "none" condition.
    const auto condition_count = [&](Method m) { return m == Method::pca ? std::size_t{1} : config.maps.size(); };
    const auto condition_name = [&](Method m, std::size_t c) {
        return m == Method::pca ? std::string("none") : std::string(to_string(config.maps[c].kind));
    };

    std::vector<Unit> units;
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi)
        for (std::size_t c = 0; c < condition_count(config.methods[mi]); ++c)
            for (std::size_t s = 0; s < splits.size(); ++s) units.push_back(Unit{mi, c, s});

    const std::size_t grid = config.component_grid.size();
    std::vector<std::vector<double>> acc(units.size());
    std::vector<std::exception_ptr> errors(units.size());
    std::vector<std::string> contexts(units.size());

    const auto work = [&](std::size_t u) {
        const Unit& unit = units[u];
        const Method method = config.methods[unit.method_index];
        const std::size_t repeat = unit.split_index / per_repeat;
        Eigen::Index current_m = 0;
        try {
            const Split& split = splits[unit.split_index];
            const DataMatrix train = data.subset(split.train);
            std::vector<std::string> train_labels;
            for (auto i : split.train) train_labels.push_back(train_labels_all[i]);
            Eigen::MatrixXd test_rows(static_cast<Eigen::Index>(split.test.size()), test_data.dimension());
            std::vector<std::string> test_labels;
            for (std::size_t i = 0; i < split.test.size(); ++i) {
                test_rows.row(static_cast<Eigen::Index>(i)) = test_data.rows().row(static_cast<Eigen::Index>(split.test[i]));
                test_labels.push_back(test_labels_all[split.test[i]]);
            }
            const AttentionMap* map = method == Method::pca ? nullptr : &maps[unit.condition_index][repeat];
            const FaceSpace fs = fit_face_space(train, method, map);
            acc[u].resize(grid);
            for (std::size_t g = 0; g < grid; ++g) {
                current_m = config.component_grid[g];
                acc[u][g] = evaluate_components(fs, train.rows(), train_labels, test_rows, test_labels, current_m,
                                                config.covariance);
            }
        } catch (...) {
            errors[u] = std::current_exception();
            std::ostringstream ctx;
            ctx << "cell method=" << to_string(method) << " map=" << condition_name(method, unit.condition_index)
                << " repeat=" << repeat << " fold=" << unit.split_index;
            if (current_m > 0) ctx << " components=" << current_m;
            contexts[u] = ctx.str();
        }
    };

    const std::size_t threads = std::min(units.size(), config.threads > 0 ? config.threads : default_thread_count());
    if (threads <= 1) {
        for (std::size_t u = 0; u < units.size(); ++u) work(u);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t u = next.fetch_add(1); u < units.size(); u = next.fetch_add(1)) work(u);
            });
    }

    for (std::size_t u = 0; u < units.size(); ++u)
        if (errors[u]) rethrow_with_context(errors[u], contexts[u]);

    ExperimentResult result;
    result.seed = config.seed;
    // Units are already grouped by (method, condition) with splits innermost.
    std::size_t base = 0;
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        const Method method = config.methods[mi];
        for (std::size_t c = 0; c < condition_count(method); ++c, base += splits.size()) {
            for (std::size_t g = 0; g < grid; ++g) {
                for (std::size_t s = 0; s < splits.size(); ++s) {
                    result.rows.push_back(ResultRow{config.task, method, condition_name(method, c),
                                                    config.component_grid[g], s, acc[base + s][g]});
                }
            }
        }
    }
    return result;
}

std::vector<SummaryRow> summarize(const ExperimentResult& result, SummaryGrouping grouping) {
    if (result.rows.empty()) throw UsageError("cannot summarize an empty result");
    using Key = std::tuple<Task, Method, std::string, Eigen::Index>;
    std::vector<Key> order;
    std::map<Key, std::vector<double>> groups;
    for (const auto& r : result.rows) {
        Key key{r.task, r.method, r.map, grouping == SummaryGrouping::pooled ? Eigen::Index{-1} : r.components};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(r.accuracy);
    }
    std::vector<SummaryRow> out;
    for (const auto& key : order) {
        SummaryRow row;
        row.task = std::get<0>(key);
        row.method = std::get<1>(key);
        row.map = std::get<2>(key);
        if (std::get<3>(key) >= 0) row.components = std::get<3>(key);
        row.stats = summarize_values(groups.at(key));
        out.push_back(std::move(row));
    }
    return out;
}

ConditionComparison compare_conditions(const ExperimentResult& result, Method method, std::string_view map_a,
                                       std::string_view map_b) {
    using Key = std::pair<Eigen::Index, std::size_t>;
    std::map<Key, double> a, b;
    std::optional<Task> task;
    for (const auto& r : result.rows) {
        if (r.method != method) continue;
        if (r.map == map_a) a[{r.components, r.fold}] = r.accuracy;
        else if (r.map == map_b) b[{r.components, r.fold}] = r.accuracy;
        else continue;
        task = r.task;
    }
    std::vector<double> va, vb;
    for (const auto& [key, value] : a) {
        const auto it = b.find(key);
        if (it == b.end()) continue;
        va.push_back(value);
        vb.push_back(it->second);
    }
    ConditionComparison out;
    out.task = task.value_or(Task::gender);
    out.method = method;
    out.map_a = map_a;
    out.map_b = map_b;
    out.pairs = va.size();
    if (va.size() < 5)
        throw UsageError("only " + std::to_string(va.size()) + " paired cells for " + std::string(to_string(method)) +
                         " " + std::string(map_a) + " vs " + std::string(map_b));
    out.mean_a = summarize_values(va).mean;
    out.mean_b = summarize_values(vb).mean;
    out.greater = wilcoxon_signed_rank(va, vb, Alternative::greater);
    out.two_sided = wilcoxon_signed_rank(va, vb, Alternative::two_sided);
    return out;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
    out << "# seed=" << result.seed << '\n';
    out << "task,method,map,components,fold,accuracy\n";
    for (const auto& r : result.rows)
        out << to_string(r.task) << ',' << to_string(r.method) << ',' << r.map << ',' << r.components << ',' << r.fold
            << ',' << format_number(r.accuracy) << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows, std::uint64_t seed) {
    out << "# seed=" << seed << '\n';
    out << "task,method,map,components,count,mean,sd,min,q1,median,q3,max\n";
    for (const auto& r : rows) {
        out << to_string(r.task) << ',' << to_string(r.method) << ',' << r.map << ',';
        if (r.components)
            out << *r.components;
        else
            out << "all";
        const auto& s = r.stats;
        out << ',' << s.count << ',' << format_number(s.mean) << ',' << format_number(s.sd) << ','
            << format_number(s.min) << ',' << format_number(s.q1) << ',' << format_number(s.median) << ','
            << format_number(s.q3) << ',' << format_number(s.max) << '\n';
    }
}

void write_comparisons_csv(std::ostream& out, std::span<const ConditionComparison> rows, std::uint64_t seed) {
    out << "# seed=" << seed << '\n';
    out << "task,method,map_a,map_b,pairs,mean_a,mean_b,w_plus,p_greater,p_two_sided\n";
    for (const auto& r : rows)
        out << to_string(r.task) << ',' << to_string(r.method) << ',' << r.map_a << ',' << r.map_b << ',' << r.pairs
            << ',' << format_number(r.mean_a) << ',' << format_number(r.mean_b) << ','
            << format_number(r.greater.statistic) << ',' << format_number(r.greater.p_value) << ','
            << format_number(r.two_sided.p_value) << '\n';
}

ExperimentResult read_results_csv(std::istream& in) {
    ExperimentResult result;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line.rfind("# seed=", 0) == 0) result.seed = std::stoull(line.substr(7));
            continue;
        }
        if (!header_seen) {
            if (line != "task,method,map,components,fold,accuracy")
                throw DataError("results CSV has an unexpected header");
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 6) throw DataError("results CSV line " + std::to_string(line_no) + ": expected 6 fields");
        ResultRow r;
        r.task = parse_task(f[0]);
        r.method = parse_method(f[1]);
        r.map = f[2];
        try {
            r.components = std::stol(f[3]);
            r.fold = std::stoul(f[4]);
            r.accuracy = std::stod(f[5]);
        } catch (const std::exception&) {
            throw DataError("results CSV line " + std::to_string(line_no) + ": malformed number");
        }
        if (r.accuracy < 0.0 || r.accuracy > 1.0)
            throw DataError("results CSV line " + std::to_string(line_no) + ": accuracy outside [0, 1]");
        result.rows.push_back(std::move(r));
    }
    if (!header_seen) throw DataError("results CSV has no header");
    return result;
}

} // namespace attnpca

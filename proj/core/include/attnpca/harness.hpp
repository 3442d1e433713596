#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attnpca/attention.hpp"
#include "attnpca/classify.hpp"
#include "attnpca/datamodel.hpp"
#include "attnpca/facespace.hpp"
#include "attnpca/stats.hpp"

namespace attnpca {

enum class Task { gender, expression };
enum class Protocol { cv10, cross_db };

std::string_view to_string(Task t);
std::string_view to_string(Protocol p);
Task parse_task(std::string_view name);
Protocol parse_protocol(std::string_view name);

/// Per-row class label for the task ("m"/"f" or "s"/"n"); empty when unlabeled.
std::vector<std::string> task_labels(const DataMatrix& data, Task task);

/// Fold index per sample. Each class is shuffled with the seed and dealt round-robin,
/// continuing where the previous class stopped.
/// Empty labels get kUnassignedFold. Throws if a class has fewer than k members.
inline constexpr std::size_t kUnassignedFold = static_cast<std::size_t>(-1);
std::vector<std::size_t> stratified_kfold(std::span<const std::string> labels, std::size_t k, std::uint64_t seed);

/// Fits the full-rank face space for a method on training rows only.
/// `map` is required for wpca/dpca and ignored for pca.
FaceSpace fit_face_space(const DataMatrix& train, Method method, const AttentionMap* map);

/// Accuracy of a classifier trained on the first m components of `fs`.
/// Training rows with an empty label are skipped.
double evaluate_components(const FaceSpace& fs, const Eigen::MatrixXd& train_rows,
                           std::span<const std::string> train_labels, const Eigen::MatrixXd& test_rows,
                           std::span<const std::string> test_labels, Eigen::Index m,
                           CovarianceMode covariance = CovarianceMode::pooled);

/// One experiment cell: fit on `train`, classify `test_rows`, return accuracy.
double run_cell(const DataMatrix& train, std::span<const std::string> train_labels, const Eigen::MatrixXd& test_rows,
                std::span<const std::string> test_labels, Method method, const AttentionMap* map, Eigen::Index m,
                CovarianceMode covariance = CovarianceMode::pooled);

struct MapCondition {
    MapProvenance kind = MapProvenance::empirical;
    std::optional<AttentionMap> map;   // required for empirical
    std::size_t fixation_count = 256;  // random_fixation
    double kernel_sigma = 2.0;         // random_fixation, in image pixels
};

struct ExperimentConfig {
    Task task = Task::gender;
    std::vector<Method> methods{Method::dpca};
    std::vector<MapCondition> maps;
    std::vector<Eigen::Index> component_grid{20, 40, 60, 80, 100, 120, 140, 160, 180, 200, 220, 240};
    Protocol protocol = Protocol::cv10;
    std::size_t folds = 10;
    std::size_t repeats = 1;
    std::uint64_t seed = 0;
    CovarianceMode covariance = CovarianceMode::pooled;
    std::size_t threads = 0; // 0: ATTNPCA_THREADS or hardware concurrency
};

/// The default grid 20, 40, ..., 240.
std::vector<Eigen::Index> default_component_grid();

struct ResultRow {
    Task task = Task::gender;
    Method method = Method::pca;
    std::string map; // provenance name, or "none" for pca
    Eigen::Index components = 0;
    std::size_t fold = 0; // repeat * folds + fold for cv10, repeat for cross_db
    double accuracy = 0.0;
};

struct ExperimentResult {
    std::uint64_t seed = 0;
    std::vector<ResultRow> rows;
};

/// Train/test split of one protocol unit, as row indices.
struct Split {
    std::vector<std::size_t> train; // into the training dataset
    std::vector<std::size_t> test;  // into the test dataset (same dataset for cv10)
};

/// Splits for every (repeat, fold) of the protocol, in row-emission order.
/// For cv10 unlabeled rows join every training set and never a test set.
/// For cross_db each repeat trains on a stratified (folds-1)/folds subsample of
/// `train` and tests on every labeled row of `test`.
std::vector<Split> plan_splits(const ExperimentConfig& config, const DataMatrix& train,
                               const DataMatrix* test = nullptr);

/// Map used by a condition in a given repeat. Random maps are seeded from
/// derive_seed(config.seed, {0x3A9, condition_index, repeat}) and shared by every method.
AttentionMap condition_map(const ExperimentConfig& config, std::size_t condition_index, std::size_t repeat,
                           ImageGeometry geometry);

/// Runs every (method x map condition x component count x split) cell.
/// Rows are ordered by method, condition, component count, then split.
/// `test` is required for cross_db and ignored for cv10.
ExperimentResult run_sweep(const ExperimentConfig& config, const DataMatrix& data, const DataMatrix* test = nullptr);

/// Thread count from ATTNPCA_THREADS, else hardware concurrency.
std::size_t default_thread_count();

struct SummaryRow {
    Task task = Task::gender;
    Method method = Method::pca;
    std::string map;
    std::optional<Eigen::Index> components; // nullopt when pooled across component counts
    SummaryStats stats;
};

enum class SummaryGrouping { per_components, pooled };

/// Groups appear in first-occurrence order of the result rows.
std::vector<SummaryRow> summarize(const ExperimentResult& result,
                                  SummaryGrouping grouping = SummaryGrouping::per_components);

struct ConditionComparison {
    Task task = Task::gender;
    Method method = Method::pca;
    std::string map_a;
    std::string map_b;
    std::size_t pairs = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    PairedTestResult greater; // one-sided: a > b
    PairedTestResult two_sided;
};

/// Pairs rows of two map conditions by (components, fold) and runs the signed-rank test.
ConditionComparison compare_conditions(const ExperimentResult& result, Method method, std::string_view map_a,
                                       std::string_view map_b);

/// CSV formats. Numbers use 9 significant digits; the first line is `# seed=<seed>`.
void write_results_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows, std::uint64_t seed);
void write_comparisons_csv(std::ostream& out, std::span<const ConditionComparison> rows, std::uint64_t seed);
ExperimentResult read_results_csv(std::istream& in);

std::string format_number(double v);

} // namespace attnpca

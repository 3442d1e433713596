#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "attnpca/raster.hpp"

namespace attnpca {

struct GazeSample {
    double timestamp_ms = 0.0;
    double x = 0.0;
    double y = 0.0;
    bool valid = true;
};

struct Fixation {
    double x = 0.0; // centroid, pixels
    double y = 0.0;
    double start_ms = 0.0;
    double duration_ms = 0.0;
    std::size_t sample_count = 0;
};

struct FixationFilterParams {
    double radius_px = 50.0;
    double min_duration_ms = 60.0;
    double rate_hz = 300.0;
};

/// Smallest run length (in samples) that lasts min_duration_ms at rate_hz.
std::size_t min_fixation_samples(const FixationFilterParams& params);

/// Dispersion filter over one trial stream.
///
/// A run grows while each new valid sample lies within radius_px of the run's
/// running centroid; an invalid sample or an outlying sample closes it. Runs of at
/// least min_fixation_samples() samples become fixations whose duration is
/// sample_count * 1000 / rate_hz. Throws DataError on non-increasing timestamps.
std::vector<Fixation> filter_fixations(std::span<const GazeSample> samples,
                                       const FixationFilterParams& params = {});

/// Fraction of samples flagged valid; 0 for an empty stream.
double valid_fraction(std::span<const GazeSample> samples);

/// Streams (or participants, on average) below this fraction of valid samples are excluded.
inline constexpr double kMinValidFraction = 0.25;

/// Non-negative grid, row-major: values[y * width + x].
class HeatMap {
public:
    HeatMap() = default;
    HeatMap(int width, int height, double fill = 0.0);
    HeatMap(int width, int height, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }
    double at(int x, int y) const { return values_[index(x, y)]; }
    double& at(int x, int y) { return values_[index(x, y)]; }
    const std::vector<double>& values() const { return values_; }
    double total() const;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// Deposits each fixation's duration as an isotropic Gaussian truncated to a
/// +/-3 sigma square window. Each cell receives the kernel integral over its
/// area. Off-grid mass is dropped. The
/// first skip_first fixations are ignored.
HeatMap accumulate_heatmap(std::span<const Fixation> fixations, int width, int height, double kernel_sigma,
                           std::size_t skip_first = 2);

HeatMap average_heatmaps(std::span<const HeatMap> maps);

/// Block-mean pooling; source dimensions must be integer multiples of the target.
HeatMap downsample(const HeatMap& map, int target_width, int target_height);

enum class MapProvenance { empirical, random_uniform, random_fixation };

std::string_view to_string(MapProvenance p);
MapProvenance parse_provenance(std::string_view name);

struct AttentionMap {
    Eigen::VectorXd weights;
    MapProvenance provenance = MapProvenance::empirical;
    std::optional<std::uint64_t> seed;

    Eigen::Index size() const { return weights.size(); }
};

/// w_j = |v_j| / sum_k |v_k|. Throws DataError when every entry is zero.
AttentionMap normalize_weights(const Eigen::VectorXd& raw, MapProvenance provenance = MapProvenance::empirical);

/// Row-major flatten then normalize_weights.
AttentionMap normalize(const HeatMap& map);

/// The uniform map 1/n.
AttentionMap uniform_map(std::size_t n);

/// True when every weight is >= 0 and the weights sum to 1 within tol.
bool is_normalized(const AttentionMap& map, double tol = 1e-9);

/// i.i.d. Uniform(0,1) weights, normalized.
AttentionMap random_uniform_map(std::size_t n, std::uint64_t seed);

/// fixation_count equal-duration fixations at uniformly random grid positions,
/// rendered with accumulate_heatmap (no skip) and normalized.
AttentionMap random_fixation_map(int width, int height, std::size_t fixation_count, double kernel_sigma,
                                 std::uint64_t seed);

/// Exact format: 8-byte magic "ATTNMAP1", u64 n, then n little-endian f64 weights.
void write_attention_map(const std::filesystem::path& path, const AttentionMap& map);
AttentionMap read_attention_map(const std::filesystem::path& path);

/// Visualization only: weights scaled so the maximum maps to 255.
Raster attention_to_raster(const AttentionMap& map, ImageGeometry geometry);

/// Reads a `timestamp_ms,x,y,valid` CSV (valid as 0/1 or true/false).
std::vector<GazeSample> read_gaze_csv(const std::filesystem::path& path);

} // namespace attnpca

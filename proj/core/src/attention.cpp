#include "attnpca/attention.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "attnpca/error.hpp"
#include "attnpca/rng.hpp"
#include "binary_io.hpp"

namespace attnpca {

std::size_t min_fixation_samples(const FixationFilterParams& params) {
    if (!(params.rate_hz > 0.0)) throw UsageError("sampling rate must be positive");
    const double samples = params.min_duration_ms * params.rate_hz / 1000.0;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(samples - 1e-9)));
}

std::vector<Fixation> filter_fixations(std::span<const GazeSample> samples, const FixationFilterParams& params) {
    const std::size_t min_samples = min_fixation_samples(params);
    if (!(params.radius_px >= 0.0)) throw UsageError("dispersion radius must be non-negative");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].timestamp_ms > samples[i - 1].timestamp_ms))
            throw DataError("gaze timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
    }

    std::vector<Fixation> out;

    // Positions are offsets from the run's first sample.
    double anchor_x = 0.0, anchor_y = 0.0;
    double sum_dx = 0.0, sum_dy = 0.0;
    double start = 0.0;
    std::size_t count = 0;

    const auto close_run = [&] {
        if (count >= min_samples) {
            const auto c = static_cast<double>(count);
            out.push_back(Fixation{anchor_x + sum_dx / c, anchor_y + sum_dy / c, start,
                                   c * 1000.0 / params.rate_hz, count});
        }
        count = 0;
        sum_dx = sum_dy = 0.0;
    };
    const auto open_run = [&](const GazeSample& s) {
        anchor_x = s.x;
        anchor_y = s.y;
        start = s.timestamp_ms;
        count = 1;
    };

    for (const auto& s : samples) {
        if (!s.valid) {
            close_run();
            continue;
        }
        if (count == 0) {
            open_run(s);
            continue;
        }
        const auto c = static_cast<double>(count);
        const double dx = (s.x - anchor_x) - sum_dx / c;
        const double dy = (s.y - anchor_y) - sum_dy / c;
        if (std::hypot(dx, dy) <= params.radius_px) {
            sum_dx += s.x - anchor_x;
            sum_dy += s.y - anchor_y;
            ++count;
        } else {
            close_run();
            open_run(s);
        }
    }
    close_run();
    return out;
}

double valid_fraction(std::span<const GazeSample> samples) {
    if (samples.empty()) return 0.0;
    const auto valid = std::count_if(samples.begin(), samples.end(), [](const GazeSample& s) { return s.valid; });
    return static_cast<double>(valid) / static_cast<double>(samples.size());
}

HeatMap::HeatMap(int width, int height, double fill) {
    if (width < 1 || height < 1) throw UsageError("heat map dimensions must be positive");
    width_ = width;
    height_ = height;
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

HeatMap::HeatMap(int width, int height, std::vector<double> values) : HeatMap(width, height) {
    if (values.size() != values_.size()) throw UsageError("heat map value count does not match dimensions");
    values_ = std::move(values);
}

double HeatMap::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Kernel mass over [lo, hi) clipped to the +/-3 sigma window, one axis.
double axis_mass(double lo, double hi, double center, double sigma) {
    lo = std::max(lo, center - 3.0 * sigma);
    hi = std::min(hi, center + 3.0 * sigma);
    if (hi <= lo) return 0.0;
    return normal_cdf((hi - center) / sigma) - normal_cdf((lo - center) / sigma);
}

} // namespace

HeatMap accumulate_heatmap(std::span<const Fixation> fixations, int width, int height, double kernel_sigma,
                           std::size_t skip_first) {
    if (!(kernel_sigma > 0.0)) throw UsageError("kernel sigma must be positive");
    HeatMap map(width, height);
    std::vector<double> wx, wy;
    for (std::size_t f = skip_first; f < fixations.size(); ++f) {
        const Fixation& fx = fixations[f];
        const double reach = 3.0 * kernel_sigma;
        const int x0 = std::max(0, static_cast<int>(std::floor(fx.x - reach)));
        const int x1 = std::min(width - 1, static_cast<int>(std::floor(fx.x + reach)));
        const int y0 = std::max(0, static_cast<int>(std::floor(fx.y - reach)));
        const int y1 = std::min(height - 1, static_cast<int>(std::floor(fx.y + reach)));
        if (x0 > x1 || y0 > y1) continue;

        wx.assign(static_cast<std::size_t>(x1 - x0 + 1), 0.0);
        wy.assign(static_cast<std::size_t>(y1 - y0 + 1), 0.0);
        for (int x = x0; x <= x1; ++x) wx[static_cast<std::size_t>(x - x0)] = axis_mass(x, x + 1.0, fx.x, kernel_sigma);
        for (int y = y0; y <= y1; ++y) wy[static_cast<std::size_t>(y - y0)] = axis_mass(y, y + 1.0, fx.y, kernel_sigma);

        for (int y = y0; y <= y1; ++y) {
            const double row = fx.duration_ms * wy[static_cast<std::size_t>(y - y0)];
            if (row == 0.0) continue;
            for (int x = x0; x <= x1; ++x) map.at(x, y) += row * wx[static_cast<std::size_t>(x - x0)];
        }
    }
    return map;
}

HeatMap average_heatmaps(std::span<const HeatMap> maps) {
    if (maps.empty()) throw DataError("cannot average an empty list of heat maps");
    const int w = maps.front().width();
    const int h = maps.front().height();
    std::vector<double> sum(maps.front().size(), 0.0);
    for (const auto& m : maps) {
        if (m.width() != w || m.height() != h) throw DataError("heat map geometry mismatch");
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += m.values()[i];
    }
    const auto k = static_cast<double>(maps.size());
    for (auto& v : sum) v /= k;
    return HeatMap(w, h, std::move(sum));
}

HeatMap downsample(const HeatMap& map, int target_width, int target_height) {
    if (target_width < 1 || target_height < 1) throw UsageError("target dimensions must be positive");
    if (map.width() % target_width != 0 || map.height() % target_height != 0)
        throw UsageError("source dimensions " + std::to_string(map.width()) + "x" + std::to_string(map.height()) +
                         " are not integer multiples of " + std::to_string(target_width) + "x" +
                         std::to_string(target_height));
    const int bw = map.width() / target_width;
    const int bh = map.height() / target_height;
    const double cells = static_cast<double>(bw) * bh;
    HeatMap out(target_width, target_height);
    for (int ty = 0; ty < target_height; ++ty) {
        for (int tx = 0; tx < target_width; ++tx) {
            double s = 0.0;
            for (int y = ty * bh; y < (ty + 1) * bh; ++y)
                for (int x = tx * bw; x < (tx + 1) * bw; ++x) s += map.at(x, y);
            out.at(tx, ty) = s / cells;
        }
    }
    return out;
}

std::string_view to_string(MapProvenance p) {
    switch (p) {
    case MapProvenance::empirical: return "empirical";
    case MapProvenance::random_uniform: return "random_uniform";
    case MapProvenance::random_fixation: return "random_fixation";
    }
    return "unknown";
}

MapProvenance parse_provenance(std::string_view name) {
    if (name == "empirical") return MapProvenance::empirical;
    if (name == "random_uniform") return MapProvenance::random_uniform;
    if (name == "random_fixation") return MapProvenance::random_fixation;
    throw UsageError("unknown map kind '" + std::string(name) + "'");
}

AttentionMap normalize_weights(const Eigen::VectorXd& raw, MapProvenance provenance) {
    if (raw.size() == 0) throw DataError("attention map is empty");
    if (!raw.allFinite()) throw DataError("attention map contains non-finite values");
    const double total = raw.cwiseAbs().sum();
    if (!(total > 0.0)) throw DataError("attention map is all zero; weights are undefined");
    return AttentionMap{raw.cwiseAbs() / total, provenance, std::nullopt};
}

AttentionMap normalize(const HeatMap& map) {
    const auto& v = map.values();
    return normalize_weights(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

AttentionMap uniform_map(std::size_t n) {
    if (n == 0) throw UsageError("map length must be positive");
    const auto len = static_cast<Eigen::Index>(n);
    return AttentionMap{Eigen::VectorXd::Constant(len, 1.0 / static_cast<double>(n)), MapProvenance::empirical,
                        std::nullopt};
}

bool is_normalized(const AttentionMap& map, double tol) {
    if (map.weights.size() == 0 || !map.weights.allFinite()) return false;
    if (map.weights.minCoeff() < 0.0) return false;
    return std::abs(map.weights.sum() - 1.0) <= tol;
}

AttentionMap random_uniform_map(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw UsageError("map length must be positive");
    Rng rng(seed);
    Eigen::VectorXd raw(static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < raw.size(); ++j) raw[j] = rng.uniform01();
    auto map = normalize_weights(raw, MapProvenance::random_uniform);
    map.seed = seed;
    return map;
}

AttentionMap random_fixation_map(int width, int height, std::size_t fixation_count, double kernel_sigma,
                                 std::uint64_t seed) {
    if (fixation_count == 0) throw UsageError("fixation_count must be at least 1");
    if (width < 1 || height < 1) throw UsageError("map dimensions must be positive");
    Rng rng(seed);
    std::vector<Fixation> fixations(fixation_count);
    for (auto& f : fixations) {
        f.x = rng.uniform(0.0, width);
        f.y = rng.uniform(0.0, height);
        f.duration_ms = 1.0;
        f.sample_count = 1;
    }
    auto map = normalize_weights(
        [&] {
            const HeatMap heat = accumulate_heatmap(fixations, width, height, kernel_sigma, 0);
            return Eigen::Map<const Eigen::VectorXd>(heat.values().data(), static_cast<Eigen::Index>(heat.size()))
                .eval();
        }(),
        MapProvenance::random_fixation);
    map.seed = seed;
    return map;
}

namespace {
constexpr char kMapMagic[8] = {'A', 'T', 'T', 'N', 'M', 'A', 'P', '1'};
}

void write_attention_map(const std::filesystem::path& path, const AttentionMap& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write attention map " + path.string());
    out.write(kMapMagic, sizeof kMapMagic);
    detail::write_u64(out, static_cast<std::uint64_t>(map.weights.size()));
    detail::write_f64s(out, std::span<const double>(map.weights.data(), static_cast<std::size_t>(map.weights.size())));
    if (!out) throw DataError("failed writing attention map " + path.string());
}

AttentionMap read_attention_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open attention map " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || !std::equal(std::begin(magic), std::end(magic), std::begin(kMapMagic)))
        throw DataError(path.string() + " is not an attention map file");
    const std::uint64_t n = detail::read_u64(in);
    if (n == 0 || n > (std::uint64_t{1} << 32)) throw DataError("implausible attention map length in " + path.string());
    const auto values = detail::read_f64s(in, static_cast<std::size_t>(n));
    AttentionMap map;
    map.weights = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    if (!is_normalized(map)) throw DataError("attention map in " + path.string() + " is not normalized");
    return map;
}

Raster attention_to_raster(const AttentionMap& map, ImageGeometry geometry) {
    if (static_cast<std::size_t>(map.weights.size()) != geometry.size())
        throw UsageError("attention map length does not match geometry");
    const double peak = map.weights.maxCoeff();
    std::vector<std::uint8_t> px(geometry.size(), 0);
    if (peak > 0.0) {
        for (std::size_t i = 0; i < px.size(); ++i)
            px[i] = static_cast<std::uint8_t>(std::lround(255.0 * map.weights[static_cast<Eigen::Index>(i)] / peak));
    }
    return Raster(geometry, std::move(px));
}

std::vector<GazeSample> read_gaze_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open gaze file " + path.string());
    std::vector<GazeSample> samples;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("timestamp_ms", 0) == 0) continue;
        }
        std::istringstream ss(line);
        std::string ts, xs, ys, vs;
        if (!std::getline(ss, ts, ',') || !std::getline(ss, xs, ',') || !std::getline(ss, ys, ',') ||
            !std::getline(ss, vs))
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
        GazeSample s;
        try {
            s.timestamp_ms = std::stod(ts);
            s.x = std::stod(xs);
            s.y = std::stod(ys);
        } catch (const std::exception&) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
        vs.erase(std::remove_if(vs.begin(), vs.end(), [](unsigned char c) { return std::isspace(c); }), vs.end());
        if (vs == "1" || vs == "true")
            s.valid = true;
        else if (vs == "0" || vs == "false")
            s.valid = false;
        else
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid validity flag '" + vs + "'");
        if (s.valid && !(std::isfinite(s.x) && std::isfinite(s.y))) s.valid = false;
        samples.push_back(s);
    }
    return samples;
}

} // namespace attnpca

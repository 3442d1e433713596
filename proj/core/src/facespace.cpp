#include "attnpca/facespace.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "attnpca/error.hpp"
#include "binary_io.hpp"

namespace attnpca {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::pca: return "pca";
    case Method::wpca: return "wpca";
    case Method::dpca: return "dpca";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "pca") return Method::pca;
    if (name == "wpca") return Method::wpca;
    if (name == "dpca") return Method::dpca;
    throw UsageError("unknown method '" + std::string(name) + "' (expected pca, wpca or dpca)");
}

FaceSpace FaceSpace::truncated(Eigen::Index m) const {
    if (m < 0 || m > component_count()) throw UsageError("cannot truncate face space to more components than stored");
    FaceSpace out;
    out.method = method;
    out.mean = mean;
    out.components = components.leftCols(m);
    out.eigenvalues = eigenvalues.head(m);
    if (alignment) out.alignment = alignment->head(m);
    return out;
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    if (v.size() == 0) return;
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    if (v[at] < 0.0) v = -v;
}

Spectrum snapshot_spectrum(const Eigen::MatrixXd& centered, double absolute_floor) {
    const Eigen::Index n_samples = centered.rows();
    if (n_samples < 2) throw DataError("at least 2 samples are required");

    const Eigen::MatrixXd gram = (centered * centered.transpose()) / static_cast<double>(n_samples - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition of the Gram matrix failed");

    // Eigen returns ascending eigenvalues.
    const Eigen::VectorXd& values = solver.eigenvalues();
    const double lambda_max = values[n_samples - 1];
    const double threshold = std::max(kRelativeEigenTolerance * lambda_max, absolute_floor);

    Eigen::Index kept = 0;
    if (lambda_max > 0.0) {
        for (Eigen::Index i = n_samples - 1; i >= 0 && values[i] > threshold; --i) ++kept;
    }

    Spectrum out;
    out.values.resize(kept);
    out.vectors.resize(centered.cols(), kept);
    for (Eigen::Index c = 0; c < kept; ++c) {
        const Eigen::Index src = n_samples - 1 - c;
        out.values[c] = values[src];
        Eigen::VectorXd p = centered.transpose() * solver.eigenvectors().col(src);
        const double norm = p.norm();
        if (!(norm > 0.0)) throw NumericalError("degenerate eigenvector in snapshot back-mapping");
        p /= norm;
        normalize_sign(p);
        out.vectors.col(c) = p;
    }
    return out;
}

namespace {

void check_map(const DataMatrix& data, const AttentionMap& map) {
    if (map.weights.size() != data.dimension())
        throw UsageError("attention map length " + std::to_string(map.weights.size()) +
                         " does not match image dimension " + std::to_string(data.dimension()));
    if (!is_normalized(map)) throw UsageError("attention map must be non-negative and sum to 1");
}

// Rounding noise left by centering is ~eps * |x|; eigenvalues at that scale are not variance.
double rounding_floor(const DataMatrix& data, const Eigen::VectorXd* weights) {
    const Eigen::MatrixXd& x = data.rows();
    double mean_sq = 0.0;
    if (weights)
        mean_sq = (x.array().square().rowwise() * weights->transpose().array()).sum();
    else
        mean_sq = x.squaredNorm();
    mean_sq /= static_cast<double>(x.rows());
    return 1e-20 * mean_sq;
}

Spectrum standard_spectrum(const DataMatrix& data) { return snapshot_spectrum(center(data), rounding_floor(data, nullptr)); }

void require_count(Eigen::Index m, Eigen::Index available, std::string_view what) {
    if (m < 1) throw UsageError(std::string(what) + ": component count must be at least 1");
    if (available == 0) throw NumericalError(std::string(what) + ": data has no nonzero variance");
    if (m > available)
        throw NumericalError(std::string(what) + ": requested " + std::to_string(m) + " components but only " +
                             std::to_string(available) + " have nonzero eigenvalues");
}

FaceSpace from_spectrum(Method method, const DataMatrix& data, Spectrum spectrum) {
    FaceSpace fs;
    fs.method = method;
    fs.mean = data.grand_mean();
    fs.components = std::move(spectrum.vectors);
    fs.eigenvalues = std::move(spectrum.values);
    return fs;
}

} // namespace

Eigen::MatrixXd weighted_centered(const DataMatrix& data, const AttentionMap& map) {
    check_map(data, map);
    return center(data) * map.weights.cwiseSqrt().asDiagonal();
}

Eigen::Index nonzero_rank(const DataMatrix& data) { return standard_spectrum(data).values.size(); }

FaceSpace fit_pca_all(const DataMatrix& data) {
    auto fs = from_spectrum(Method::pca, data, standard_spectrum(data));
    if (fs.component_count() == 0) throw NumericalError("fit_pca: data has no nonzero variance");
    return fs;
}

FaceSpace fit_pca(const DataMatrix& data, Eigen::Index m) {
    auto fs = from_spectrum(Method::pca, data, standard_spectrum(data));
    require_count(m, fs.component_count(), "fit_pca");
    return fs.truncated(m);
}

FaceSpace fit_wpca_all(const DataMatrix& data, const AttentionMap& map) {
    const Eigen::MatrixXd weighted = weighted_centered(data, map);
    auto fs = from_spectrum(Method::wpca, data, snapshot_spectrum(weighted, rounding_floor(data, &map.weights)));
    if (fs.component_count() == 0) throw NumericalError("fit_wpca: weighted data has no nonzero variance");
    return fs;
}

FaceSpace fit_wpca(const DataMatrix& data, const AttentionMap& map, Eigen::Index m) {
    const Eigen::MatrixXd weighted = weighted_centered(data, map);
    auto fs = from_spectrum(Method::wpca, data, snapshot_spectrum(weighted, rounding_floor(data, &map.weights)));
    require_count(m, fs.component_count(), "fit_wpca");
    return fs.truncated(m);
}

Eigen::VectorXd alignment_coefficients(const Eigen::MatrixXd& components, const Eigen::VectorXd& weights) {
    if (components.rows() != weights.size()) throw UsageError("weight length does not match component length");
    return components.transpose() * weights;
}

std::vector<Eigen::Index> rank_by_alignment(const Eigen::VectorXd& alignment) {
    // Stable insertion sort by |k|.
    std::vector<Eigen::Index> order;
    order.reserve(static_cast<std::size_t>(alignment.size()));
    for (Eigen::Index i = 0; i < alignment.size(); ++i) {
        const double key = std::abs(alignment[i]);
        auto pos = order.end();
        while (pos != order.begin() && key > std::abs(alignment[*(pos - 1)]) + kAlignmentTieTolerance) --pos;
        order.insert(pos, i);
    }
    return order;
}

FaceSpace fit_dpca_full(const DataMatrix& data, const AttentionMap& map) {
    check_map(data, map);
    Spectrum spectrum = standard_spectrum(data);
    const Eigen::Index m = spectrum.values.size();
    if (m == 0) throw NumericalError("fit_dpca: data has no nonzero variance");

    const Eigen::VectorXd k = alignment_coefficients(spectrum.vectors, map.weights);
    const auto order = rank_by_alignment(k);

    FaceSpace fs;
    fs.method = Method::dpca;
    fs.mean = data.grand_mean();
    fs.components.resize(spectrum.vectors.rows(), m);
    fs.eigenvalues.resize(m);
    Eigen::VectorXd ranked_k(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        fs.components.col(i) = spectrum.vectors.col(src);
        fs.eigenvalues[i] = spectrum.values[src];
        ranked_k[i] = k[src];
    }
    fs.alignment = std::move(ranked_k);
    return fs;
}

FaceSpace fit_dpca(const DataMatrix& data, const AttentionMap& map, Eigen::Index m_plus) {
    FaceSpace full = fit_dpca_full(data, map);
    if (m_plus < 1) throw UsageError("fit_dpca: component count must be at least 1");
    if (m_plus >= full.component_count())
        throw NumericalError("fit_dpca: m+ = " + std::to_string(m_plus) + " must be below the " +
                             std::to_string(full.component_count()) + " nonzero standard components");
    return full.truncated(m_plus);
}

namespace {
void check_m_use(const FaceSpace& fs, Eigen::Index m_use) {
    if (m_use < 0 || m_use > fs.component_count())
        throw UsageError("m_use = " + std::to_string(m_use) + " exceeds the " + std::to_string(fs.component_count()) +
                         " stored components");
}
} // namespace

Eigen::VectorXd project(const FaceSpace& fs, const Eigen::VectorXd& x, Eigen::Index m_use) {
    check_m_use(fs, m_use);
    if (x.size() != fs.mean.size()) throw UsageError("sample dimension does not match face space");
    return fs.components.leftCols(m_use).transpose() * (x - fs.mean);
}

Eigen::MatrixXd project_rows(const FaceSpace& fs, const Eigen::MatrixXd& samples, Eigen::Index m_use) {
    check_m_use(fs, m_use);
    if (samples.cols() != fs.mean.size()) throw UsageError("sample dimension does not match face space");
    return (samples.rowwise() - fs.mean.transpose()) * fs.components.leftCols(m_use);
}

Eigen::VectorXd reconstruct(const FaceSpace& fs, const Eigen::VectorXd& coords) {
    check_m_use(fs, coords.size());
    return fs.mean + fs.components.leftCols(coords.size()) * coords;
}

double reconstruction_mse(const FaceSpace& fs, const Eigen::MatrixXd& samples, Eigen::Index m_use,
                          const Eigen::VectorXd* weights) {
    check_m_use(fs, m_use);
    if (samples.cols() != fs.mean.size()) throw UsageError("sample dimension does not match face space");
    Eigen::MatrixXd dev = samples.rowwise() - fs.mean.transpose();
    if (weights) {
        if (weights->size() != dev.cols()) throw UsageError("weight length does not match face space");
        dev = dev * weights->cwiseSqrt().asDiagonal();
    }
    const auto basis = fs.components.leftCols(m_use);
    const Eigen::MatrixXd residual = dev - (dev * basis) * basis.transpose();
    return residual.squaredNorm() / static_cast<double>(samples.rows());
}

namespace {
constexpr char kFaceSpaceMagic[8] = {'A', 'T', 'T', 'N', 'F', 'S', 'P', 'C'};

std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}
} // namespace

void write_face_space(const std::filesystem::path& path, const FaceSpace& fs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write face space " + path.string());
    out.write(kFaceSpaceMagic, sizeof kFaceSpaceMagic);
    detail::write_u32(out, kFaceSpaceFormatVersion);
    detail::write_u32(out, static_cast<std::uint32_t>(fs.method));
    detail::write_u64(out, static_cast<std::uint64_t>(fs.dimension()));
    detail::write_u64(out, static_cast<std::uint64_t>(fs.component_count()));
    detail::write_f64s(out, as_span(fs.mean));
    detail::write_f64s(out, as_span(fs.eigenvalues));
    if (fs.method == Method::dpca) {
        if (!fs.alignment) throw UsageError("dpca face space is missing its alignment vector");
        detail::write_f64s(out, as_span(*fs.alignment));
    }
    // Eigen is column-major, so the component matrix is already component-contiguous.
    detail::write_f64s(out, {fs.components.data(), static_cast<std::size_t>(fs.components.size())});
    if (!out) throw DataError("failed writing face space " + path.string());
}

FaceSpace read_face_space(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open face space " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || !std::equal(std::begin(magic), std::end(magic), std::begin(kFaceSpaceMagic)))
        throw DataError(path.string() + " is not a face space file");
    const auto version = detail::read_u32(in);
    if (version != kFaceSpaceFormatVersion)
        throw DataError("unsupported face space format version " + std::to_string(version));
    const auto method = detail::read_u32(in);
    if (method > static_cast<std::uint32_t>(Method::dpca)) throw DataError("unknown method tag in " + path.string());
    const auto n = detail::read_u64(in);
    const auto m = detail::read_u64(in);
    if (n == 0 || n > (std::uint64_t{1} << 32) || m > n) throw DataError("implausible face space header");

    FaceSpace fs;
    fs.method = static_cast<Method>(method);
    const auto en = static_cast<Eigen::Index>(n);
    const auto em = static_cast<Eigen::Index>(m);
    auto mean = detail::read_f64s(in, n);
    fs.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), en);
    auto eig = detail::read_f64s(in, m);
    fs.eigenvalues = Eigen::Map<Eigen::VectorXd>(eig.data(), em);
    if (fs.method == Method::dpca) {
        auto k = detail::read_f64s(in, m);
        fs.alignment = Eigen::Map<Eigen::VectorXd>(k.data(), em);
    }
    auto comps = detail::read_f64s(in, n * m);
    fs.components = Eigen::Map<Eigen::MatrixXd>(comps.data(), en, em);
    return fs;
}

std::string face_space_metadata(const FaceSpace& fs, const std::map<std::string, std::string>& extra) {
    nlohmann::ordered_json j;
    j["format"] = "attnpca-facespace";
    j["version"] = kFaceSpaceFormatVersion;
    j["method"] = std::string(to_string(fs.method));
    j["n"] = fs.dimension();
    j["m"] = fs.component_count();
    j["eigenvalues"] = std::vector<double>(fs.eigenvalues.data(), fs.eigenvalues.data() + fs.eigenvalues.size());
    if (fs.alignment) {
        const auto& k = *fs.alignment;
        j["alignment"] = std::vector<double>(k.data(), k.data() + k.size());
        std::vector<double> abs_k(static_cast<std::size_t>(k.size()));
        for (Eigen::Index i = 0; i < k.size(); ++i) abs_k[static_cast<std::size_t>(i)] = std::abs(k[i]);
        j["abs_alignment"] = abs_k;
    }
    for (const auto& [key, value] : extra) j[key] = value;
    return j.dump(2) + "\n";
}

} // namespace attnpca

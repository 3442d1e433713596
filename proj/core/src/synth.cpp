#include "attnpca/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "attnpca/error.hpp"
#include "attnpca/rng.hpp"

namespace attnpca {

void validate(const SynthSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) throw UsageError("synthetic image dimensions must be positive");
    if (spec.per_class < 2) throw UsageError("synthetic dataset needs at least 2 images per class");
    if (spec.patch_size < 1) throw UsageError("patch size must be positive");
    if (spec.patch_row < 0 || spec.patch_col < 0 || spec.patch_row + spec.patch_size > spec.rows ||
        spec.patch_col + spec.patch_size > spec.cols)
        throw UsageError("patch lies outside the image bounds");
    if (spec.noise_sd < 0.0 || spec.nuisance_sd < 0.0 || !(spec.nuisance_sigma > 0.0))
        throw UsageError("noise parameters must be non-negative and the blob radius positive");
}

SynthDataset generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
    validate(spec);
    const ImageGeometry geometry{spec.rows, spec.cols};
    const auto n = static_cast<Eigen::Index>(geometry.size());

    Eigen::VectorXd patch = Eigen::VectorXd::Zero(n);
    for (int r = spec.patch_row; r < spec.patch_row + spec.patch_size; ++r)
        for (int c = spec.patch_col; c < spec.patch_col + spec.patch_size; ++c) patch[r * spec.cols + c] = 1.0;

    Rng layout(derive_seed(seed, {1}));
    const auto k = static_cast<Eigen::Index>(spec.nuisance_count);
    Eigen::MatrixXd blobs(n, k);
    Eigen::VectorXd amplitude_sd(k);
    for (Eigen::Index b = 0; b < k; ++b) {
        const double cy = layout.uniform(0.0, spec.rows);
        const double cx = layout.uniform(0.0, spec.cols);
        for (int r = 0; r < spec.rows; ++r)
            for (int c = 0; c < spec.cols; ++c) {
                const double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
                blobs(r * spec.cols + c, b) = std::exp(-d2 / (2.0 * spec.nuisance_sigma * spec.nuisance_sigma));
            }
        const double t = k > 1 ? static_cast<double>(b) / static_cast<double>(k - 1) : 0.0;
        amplitude_sd[b] = spec.nuisance_sd * (1.5 - t);
    }

    Rng rng(derive_seed(seed, {2}));
    SynthDataset out;
    out.images.reserve(2 * spec.per_class);
    Eigen::VectorXd amplitudes(k);
    for (int cls = 0; cls < 2; ++cls) {
        const double sign = cls == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < spec.per_class; ++i) {
            for (Eigen::Index b = 0; b < k; ++b) amplitudes[b] = rng.normal() * amplitude_sd[b];
            Eigen::VectorXd img = Eigen::VectorXd::Constant(n, spec.base) + sign * spec.signal * patch;
            if (k > 0) img += blobs * amplitudes;
            for (Eigen::Index j = 0; j < n; ++j) img[j] += rng.normal() * spec.noise_sd;

            char id[64];
            const std::size_t index = static_cast<std::size_t>(cls) * spec.per_class + i;
            std::snprintf(id, sizeof id, "images/img_%05zu.pgm", index);
            char subject[32];
            std::snprintf(subject, sizeof subject, "s%05zu", index);

            LabelRecord label{id, subject, std::nullopt, std::nullopt};
            if (spec.expression_labels)
                label.expression = cls == 0 ? Expression::smiling : Expression::neutral;
            else
                label.gender = cls == 0 ? Gender::male : Gender::female;
            out.images.push_back(FaceImage{std::move(label), unflatten(img, geometry)});
        }
    }
    out.true_map = normalize_weights(patch);
    return out;
}

void write_synthetic(const SynthDataset& dataset, const SynthSpec& spec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "images");
    DatasetManifest manifest;
    manifest.base_dir = dir;
    manifest.geometry = ImageGeometry{spec.rows, spec.cols};
    for (const auto& img : dataset.images) {
        write_pgm(dir / img.label.id, img.raster);
        manifest.entries.push_back(
            ManifestEntry{img.label.id, img.label.subject_id, img.label.gender, img.label.expression});
    }
    write_manifest(dir / "manifest.csv", manifest);
    write_attention_map(dir / "true_map.bin", dataset.true_map);
    write_pgm(dir / "true_map.pgm", attention_to_raster(dataset.true_map, ImageGeometry{spec.rows, spec.cols}));
}

} // namespace attnpca

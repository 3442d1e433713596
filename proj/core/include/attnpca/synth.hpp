#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "attnpca/attention.hpp"
#include "attnpca/datamodel.hpp"

namespace attnpca {

/// Two-class "informative patch" dataset.
///
/// Every image is base intensity plus a texture (nuisance_count fixed Gaussian
/// blobs with independent per-image amplitudes, plus i.i.d. pixel noise). Class A
/// adds +signal inside the patch and class B adds -signal; outside the patch the
/// two classes share one distribution.
struct SynthSpec {
    int rows = 32;
    int cols = 32;
    std::size_t per_class = 200;
    int patch_row = 4;
    int patch_col = 12;
    int patch_size = 8;
    double base = 128.0;
    double signal = 6.0;
    double noise_sd = 12.0;
    std::size_t nuisance_count = 16;
    double nuisance_sigma = 5.0; // blob radius in pixels
    double nuisance_sd = 25.0;   // amplitudes fall linearly from 1.5x to 0.5x this
    bool expression_labels = false; // label classes s/n instead of m/f
};

struct SynthDataset {
    std::vector<FaceImage> images; // class A first, then class B
    AttentionMap true_map;         // uniform on the patch, zero elsewhere
};

/// Throws UsageError when the patch leaves the image or a count is zero.
void validate(const SynthSpec& spec);

SynthDataset generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

/// Writes images/<id>.pgm, manifest.csv, true_map.bin and true_map.pgm under dir.
void write_synthetic(const SynthDataset& dataset, const SynthSpec& spec, const std::filesystem::path& dir);

} // namespace attnpca

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace attnpca {

struct ImageGeometry {
    int rows = 0;
    int cols = 0;

    std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
    friend bool operator==(const ImageGeometry&, const ImageGeometry&) = default;
};

/// 8-bit grayscale raster, row-major.
struct Raster {
    ImageGeometry geometry;
    std::vector<std::uint8_t> pixels;

    Raster() = default;
    Raster(ImageGeometry g, std::vector<std::uint8_t> px);
    Raster(int rows, int cols, std::uint8_t fill = 0);

    int rows() const { return geometry.rows; }
    int cols() const { return geometry.cols; }
    std::uint8_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * geometry.cols + c]; }
    std::uint8_t& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * geometry.cols + c]; }

    friend bool operator==(const Raster&, const Raster&) = default;
};

/// Reads a binary (P5) or plain (P2) graymap with maxval <= 255.
Raster read_pgm(const std::filesystem::path& path);

/// Writes a binary (P5) graymap with maxval 255.
void write_pgm(const std::filesystem::path& path, const Raster& raster);

} // namespace attnpca

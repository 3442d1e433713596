#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include <Eigen/Dense>

#include "attnpca/datamodel.hpp"
#include "attnpca/rng.hpp"

namespace attnpca::test {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("attnpca_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Gaussian N x n data, unlabeled, on a rows x cols geometry.
inline DataMatrix random_data(Eigen::Index samples, int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(samples, rows * cols);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = 100.0 + 20.0 * rng.normal();
    return DataMatrix(std::move(x), {}, ImageGeometry{rows, cols});
}

/// The four-point 2-D toy set {(1,0), (-1,0), (0,2), (0,-2)}.
inline DataMatrix toy_data() {
    Eigen::MatrixXd x(4, 2);
    x << 1, 0, -1, 0, 0, 2, 0, -2;
    return DataMatrix(std::move(x), {}, ImageGeometry{1, 2});
}

/// 8x8 images built from four disjoint 2x4 blocks with amplitude SDs 10, 7, 5
/// and 3 plus faint pixel noise. The leading components are the (non-negative)
/// block indicators, in that order.
inline DataMatrix blob_data(Eigen::Index samples, std::uint64_t seed) {
    Rng rng(seed);
    const double sds[4] = {10.0, 7.0, 5.0, 3.0};
    Eigen::MatrixXd x(samples, 64);
    for (Eigen::Index i = 0; i < samples; ++i) {
        for (Eigen::Index j = 0; j < 64; ++j) x(i, j) = 50.0 + 0.05 * rng.normal();
        for (int b = 0; b < 4; ++b) {
            const double a = sds[b] * rng.normal();
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 4; ++c) x(i, (2 * b + r) * 8 + c + (b % 2) * 4) += a;
        }
    }
    return DataMatrix(std::move(x), {}, ImageGeometry{8, 8});
}

} // namespace attnpca::test

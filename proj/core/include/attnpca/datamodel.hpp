#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attnpca/raster.hpp"

namespace attnpca {

enum class Gender { male, female };
enum class Expression { smiling, neutral };

/// Manifest codes: m/f/- and s/n/-.
char to_code(std::optional<Gender> g);
char to_code(std::optional<Expression> e);
std::optional<Gender> parse_gender(std::string_view code);
std::optional<Expression> parse_expression(std::string_view code);

struct LabelRecord {
    std::string id;
    std::string subject_id;
    std::optional<Gender> gender;
    std::optional<Expression> expression;
};

struct FaceImage {
    LabelRecord label;
    Raster raster;
};

using ImageVector = Eigen::VectorXd;

/// Row-major flattening: values[i*c + j] = pixels[i][j].
ImageVector flatten(const Raster& raster);

/// Inverse of flatten. Values are rounded and clamped to [0, 255].
Raster unflatten(const ImageVector& values, ImageGeometry geometry);

/// N x n matrix of flattened images plus the per-pixel grand mean.
/// Immutable once constructed.
class DataMatrix {
public:
    DataMatrix(Eigen::MatrixXd rows, std::vector<LabelRecord> labels, ImageGeometry geometry);

    const Eigen::MatrixXd& rows() const { return rows_; }
    const Eigen::VectorXd& grand_mean() const { return grand_mean_; }
    const std::vector<LabelRecord>& labels() const { return labels_; }
    ImageGeometry geometry() const { return geometry_; }

    Eigen::Index sample_count() const { return rows_.rows(); }
    Eigen::Index dimension() const { return rows_.cols(); }

    /// New DataMatrix over the given row indices (in the given order); mean recomputed.
    DataMatrix subset(std::span<const std::size_t> indices) const;

private:
    Eigen::MatrixXd rows_;
    Eigen::VectorXd grand_mean_;
    std::vector<LabelRecord> labels_;
    ImageGeometry geometry_;
};

/// z_ij = x_ij - mean_j.
Eigen::MatrixXd center(const DataMatrix& data);

struct ManifestEntry {
    std::string path; // as written in the manifest; doubles as the image id
    std::string subject_id;
    std::optional<Gender> gender;
    std::optional<Expression> expression;
};

struct DatasetManifest {
    std::filesystem::path base_dir;
    std::vector<ManifestEntry> entries;
    std::optional<ImageGeometry> geometry; // taken from the first image when absent
};

/// Parses `path,subject_id,gender,expression` CSV. Lines starting with '#' are
/// comments, except an optional `#geometry,<rows>,<cols>` directive.
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

std::vector<FaceImage> load_images(const DatasetManifest& manifest);
DataMatrix load_dataset(const DatasetManifest& manifest);
DataMatrix to_data_matrix(std::span<const FaceImage> images);

} // namespace attnpca

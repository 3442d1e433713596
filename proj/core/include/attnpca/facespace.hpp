#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "attnpca/attention.hpp"
#include "attnpca/datamodel.hpp"

namespace attnpca {

enum class Method { pca, wpca, dpca };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// A fitted face-space basis.
///
/// `components` holds one orthonormal n-vector per column. For pca/wpca the
/// columns follow non-increasing eigenvalue; for dpca they follow non-increasing
/// |alignment| and each eigenvalue stays with its eigenvector.
struct FaceSpace {
    Method method = Method::pca;
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;
    Eigen::VectorXd eigenvalues;
    std::optional<Eigen::VectorXd> alignment; // dpca only: k_i = <w, p_i>

    Eigen::Index dimension() const { return components.rows(); }
    Eigen::Index component_count() const { return components.cols(); }

    /// Copy keeping only the first m stored components.
    FaceSpace truncated(Eigen::Index m) const;
};

/// Nonzero spectrum of Z^T Z / (N-1) computed through the N x N Gram matrix.
struct Spectrum {
    Eigen::MatrixXd vectors; // n x r, unit columns
    Eigen::VectorXd values;  // r, non-increasing, all retained as nonzero
};

/// Eigenvalue lambda_i is kept iff lambda_i > kRelativeEigenTolerance * lambda_max
/// and lambda_i exceeds `absolute_floor` (rounding noise from the centering step).
inline constexpr double kRelativeEigenTolerance = 1e-10;

/// Snapshot eigendecomposition of the row-sample matrix Z (N x n, already centered).
/// Eigenvectors are mapped back as Z^T u / ||Z^T u|| and sign-normalized.
Spectrum snapshot_spectrum(const Eigen::MatrixXd& centered, double absolute_floor = 0.0);

/// Flips v so that its largest-magnitude entry (first one on ties) is positive.
void normalize_sign(Eigen::Ref<Eigen::VectorXd> v);

/// z*_ij = (x_ij - mean_j) * sqrt(w_j).
Eigen::MatrixXd weighted_centered(const DataMatrix& data, const AttentionMap& map);

/// Number of nonzero standard components of the data.
Eigen::Index nonzero_rank(const DataMatrix& data);

FaceSpace fit_pca(const DataMatrix& data, Eigen::Index m);
FaceSpace fit_pca_all(const DataMatrix& data);

FaceSpace fit_wpca(const DataMatrix& data, const AttentionMap& map, Eigen::Index m);
FaceSpace fit_wpca_all(const DataMatrix& data, const AttentionMap& map);

/// Pattern-based basis: all nonzero standard components re-ranked by |<w, p_i>|.
/// Requires m_plus < number of nonzero components.
FaceSpace fit_dpca(const DataMatrix& data, const AttentionMap& map, Eigen::Index m_plus);

/// The complete re-ranked basis (m_plus equal to the nonzero rank).
FaceSpace fit_dpca_full(const DataMatrix& data, const AttentionMap& map);

/// k_i = <w, p_i> for every column.
Eigen::VectorXd alignment_coefficients(const Eigen::MatrixXd& components, const Eigen::VectorXd& weights);

/// Ordering of indices by |k| descending. |k| values within kAlignmentTieTolerance
/// keep their original (eigenvalue) order.
inline constexpr double kAlignmentTieTolerance = 1e-12;
std::vector<Eigen::Index> rank_by_alignment(const Eigen::VectorXd& alignment);

/// y_i = <p_i, x - mean> for the first m_use components.
Eigen::VectorXd project(const FaceSpace& fs, const Eigen::VectorXd& x, Eigen::Index m_use);

/// Row-wise projection of an N x n sample matrix; returns N x m_use.
Eigen::MatrixXd project_rows(const FaceSpace& fs, const Eigen::MatrixXd& samples, Eigen::Index m_use);

/// mean + sum_i y_i p_i.
Eigen::VectorXd reconstruct(const FaceSpace& fs, const Eigen::VectorXd& coords);

/// Mean over samples of ||r||^2 where r is the residual of (x - mean) after projecting
/// onto the first m_use components. With `weights`, residuals are measured on
/// (x - mean) * sqrt(w), the space a wpca basis lives in.
double reconstruction_mse(const FaceSpace& fs, const Eigen::MatrixXd& samples, Eigen::Index m_use,
                          const Eigen::VectorXd* weights = nullptr);

/// Versioned binary format: magic "ATTNFSPC", u32 version, u32 method, u64 n,
/// u64 m, then mean, eigenvalues, alignment (dpca), components; little-endian f64.
inline constexpr std::uint32_t kFaceSpaceFormatVersion = 1;
void write_face_space(const std::filesystem::path& path, const FaceSpace& fs);
FaceSpace read_face_space(const std::filesystem::path& path);

/// JSON metadata for the sidecar file. `extra` entries become top-level string fields.
std::string face_space_metadata(const FaceSpace& fs, const std::map<std::string, std::string>& extra = {});

} // namespace attnpca

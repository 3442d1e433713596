#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attnpca {

enum class CovarianceMode {
    pooled,               // pooled within-class covariance + ridge
    eigenvalue_whitening, // diagonal of the face-space eigenvalues
};

std::string_view to_string(CovarianceMode mode);
CovarianceMode parse_covariance_mode(std::string_view name);

/// Ridge added to the pooled covariance diagonal: kRidgeFactor * trace / m,
/// or kRidgeFactor itself when the within-class scatter is zero.
inline constexpr double kRidgeFactor = 1e-6;

/// Minimum-Mahalanobis-distance classifier with equal priors.
class ClassifierModel {
public:
    /// Builds a model from explicit parts; labels are sorted and must be distinct.
    static ClassifierModel from_parts(std::vector<std::string> labels, std::vector<Eigen::VectorXd> means,
                                      Eigen::MatrixXd covariance, double ridge = 0.0);

    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<Eigen::VectorXd>& means() const { return means_; }
    const Eigen::MatrixXd& covariance() const { return covariance_; }
    const Eigen::MatrixXd& precision() const { return precision_; }
    double ridge() const { return ridge_; }
    Eigen::Index dimension() const { return covariance_.rows(); }

    double mahalanobis_squared(const Eigen::VectorXd& y, std::size_t class_index) const;
    double mahalanobis(const Eigen::VectorXd& y, std::string_view label) const;

    /// Index into labels() of the nearest class mean; ties go to the
    /// lexicographically smaller label.
    std::size_t predict_index(const Eigen::VectorXd& y) const;
    const std::string& predict(const Eigen::VectorXd& y) const;

private:
    std::vector<std::string> labels_;
    std::vector<Eigen::VectorXd> means_;
    Eigen::MatrixXd covariance_;
    Eigen::MatrixXd precision_;
    double ridge_ = 0.0;
};

/// Trains on row-wise projections. Needs >= 2 classes with >= 2 samples each.
/// eigenvalue_whitening mode requires `eigenvalues` (length >= projection width).
ClassifierModel train(const Eigen::MatrixXd& projections, std::span<const std::string> labels,
                      CovarianceMode mode = CovarianceMode::pooled, const Eigen::VectorXd* eigenvalues = nullptr);

/// Fraction of rows whose predicted label equals the given one.
double accuracy(const ClassifierModel& model, const Eigen::MatrixXd& projections, std::span<const std::string> labels);

} // namespace attnpca

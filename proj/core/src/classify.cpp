#include "attnpca/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "attnpca/error.hpp"

namespace attnpca {

std::string_view to_string(CovarianceMode mode) {
    return mode == CovarianceMode::pooled ? "pooled" : "whitening";
}

CovarianceMode parse_covariance_mode(std::string_view name) {
    if (name == "pooled") return CovarianceMode::pooled;
    if (name == "whitening") return CovarianceMode::eigenvalue_whitening;
    throw UsageError("unknown covariance mode '" + std::string(name) + "' (expected pooled or whitening)");
}

ClassifierModel ClassifierModel::from_parts(std::vector<std::string> labels, std::vector<Eigen::VectorXd> means,
                                            Eigen::MatrixXd covariance, double ridge) {
    if (labels.size() < 2) throw UsageError("a classifier needs at least 2 classes");
    if (labels.size() != means.size()) throw UsageError("one mean per class label is required");
    if (covariance.rows() != covariance.cols()) throw UsageError("covariance must be square");
    for (const auto& m : means)
        if (m.size() != covariance.rows()) throw UsageError("class mean length does not match covariance");

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });

    ClassifierModel model;
    for (std::size_t i : order) {
        if (!model.labels_.empty() && model.labels_.back() == labels[i]) throw UsageError("duplicate class label");
        model.labels_.push_back(std::move(labels[i]));
        model.means_.push_back(std::move(means[i]));
    }

    if (!covariance.isApprox(covariance.transpose(), 1e-12) && covariance.size() > 0)
        throw NumericalError("covariance is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive definite");
    Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(covariance.rows(), covariance.cols()));
    model.precision_ = 0.5 * (precision + precision.transpose());
    model.covariance_ = std::move(covariance);
    model.ridge_ = ridge;
    return model;
}

double ClassifierModel::mahalanobis_squared(const Eigen::VectorXd& y, std::size_t class_index) const {
    if (y.size() != dimension()) throw UsageError("coordinate length does not match classifier");
    if (class_index >= means_.size()) throw UsageError("class index out of range");
    const Eigen::VectorXd d = y - means_[class_index];
    return std::max(0.0, d.dot(precision_ * d));
}

double ClassifierModel::mahalanobis(const Eigen::VectorXd& y, std::string_view label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw UsageError("unknown class label '" + std::string(label) + "'");
    return std::sqrt(mahalanobis_squared(y, static_cast<std::size_t>(it - labels_.begin())));
}

std::size_t ClassifierModel::predict_index(const Eigen::VectorXd& y) const {
    std::size_t best = 0;
    double best_d = mahalanobis_squared(y, 0);
    for (std::size_t c = 1; c < labels_.size(); ++c) {
        const double d = mahalanobis_squared(y, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

const std::string& ClassifierModel::predict(const Eigen::VectorXd& y) const { return labels_[predict_index(y)]; }

ClassifierModel train(const Eigen::MatrixXd& projections, std::span<const std::string> labels, CovarianceMode mode,
                      const Eigen::VectorXd* eigenvalues) {
    const Eigen::Index n = projections.rows();
    const Eigen::Index dim = projections.cols();
    if (static_cast<std::size_t>(n) != labels.size()) throw UsageError("labels do not align with projections");
    if (dim < 1) throw UsageError("projections must have at least one coordinate");

    std::map<std::string, std::vector<Eigen::Index>> members;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)].empty()) throw DataError("unlabeled sample passed to classifier");
        members[labels[static_cast<std::size_t>(i)]].push_back(i);
    }
    if (members.size() < 2) throw DataError("training data must contain at least 2 classes");

    std::vector<std::string> class_labels;
    std::vector<Eigen::VectorXd> means;
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& [label, rows] : members) {
        if (rows.size() < 2) throw DataError("class '" + label + "' has fewer than 2 training samples");
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
        for (auto i : rows) mu += projections.row(i).transpose();
        mu /= static_cast<double>(rows.size());
        for (auto i : rows) {
            const Eigen::VectorXd d = projections.row(i).transpose() - mu;
            scatter.selfadjointView<Eigen::Lower>().rankUpdate(d);
        }
        class_labels.push_back(label);
        means.push_back(std::move(mu));
    }

    if (mode == CovarianceMode::eigenvalue_whitening) {
        if (!eigenvalues || eigenvalues->size() < dim)
            throw UsageError("whitening mode needs one eigenvalue per coordinate");
        const Eigen::VectorXd diag = eigenvalues->head(dim);
        if (diag.minCoeff() <= 0.0) throw NumericalError("whitening eigenvalues must be positive");
        return ClassifierModel::from_parts(std::move(class_labels), std::move(means), diag.asDiagonal().toDenseMatrix(),
                                           0.0);
    }

    const auto dof = static_cast<double>(n - static_cast<Eigen::Index>(members.size()));
    Eigen::MatrixXd cov = scatter.selfadjointView<Eigen::Lower>();
    cov /= dof;
    const double trace = cov.trace();
    const double ridge = trace > 0.0 ? kRidgeFactor * trace / static_cast<double>(dim) : kRidgeFactor;
    cov.diagonal().array() += ridge;
    return ClassifierModel::from_parts(std::move(class_labels), std::move(means), std::move(cov), ridge);
}

double accuracy(const ClassifierModel& model, const Eigen::MatrixXd& projections, std::span<const std::string> labels) {
    if (static_cast<std::size_t>(projections.rows()) != labels.size())
        throw UsageError("labels do not align with projections");
    if (labels.empty()) throw UsageError("cannot score an empty test set");
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < projections.rows(); ++i)
        if (model.predict(projections.row(i).transpose()) == labels[static_cast<std::size_t>(i)]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

} // namespace attnpca

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "attnpca/attention.hpp"
#include "attnpca/error.hpp"
#include "attnpca/facespace.hpp"
#include "test_support.hpp"

using namespace attnpca;

namespace {

Eigen::MatrixXd direct_covariance(const DataMatrix& d) {
    const Eigen::MatrixXd z = center(d);
    return z.transpose() * z / static_cast<double>(d.sample_count() - 1);
}

void expect_orthonormal(const FaceSpace& fs) {
    const Eigen::MatrixXd g = fs.components.transpose() * fs.components;
    EXPECT_LT((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-8);
}

AttentionMap weights(std::initializer_list<double> w) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
    Eigen::Index i = 0;
    for (double x : w) v[i++] = x;
    return normalize_weights(v);
}

bool near(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

} // namespace

TEST(Pca, ToyBasis) {
    const FaceSpace fs = fit_pca(test::toy_data(), 2);
    EXPECT_EQ(fs.method, Method::pca);
    EXPECT_TRUE(near(fs.components.col(0), Eigen::Vector2d(0, 1), 1e-10));
    EXPECT_TRUE(near(fs.components.col(1), Eigen::Vector2d(1, 0), 1e-10));
    EXPECT_NEAR(fs.eigenvalues[0], 8.0 / 3.0, 1e-10);
    EXPECT_NEAR(fs.eigenvalues[1], 2.0 / 3.0, 1e-10);
    EXPECT_THROW(fit_pca(test::toy_data(), 3), NumericalError);
}

TEST(Pca, ConstantDataHasNoComponents) {
    const DataMatrix d(Eigen::MatrixXd::Constant(5, 6, 3.0), {}, ImageGeometry{2, 3});
    EXPECT_THROW(fit_pca(d, 1), NumericalError);
    EXPECT_EQ(nonzero_rank(d), 0);
}

TEST(Pca, SnapshotMatchesDirect) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const DataMatrix d = test::random_data(20, 8, 8, seed);
        const FaceSpace fs = fit_pca_all(d);
        ASSERT_EQ(fs.component_count(), 19);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(direct_covariance(d));
        for (Eigen::Index i = 0; i < 19; ++i) {
            const Eigen::Index j = 63 - i;
            EXPECT_NEAR(fs.eigenvalues[i] / es.eigenvalues()[j], 1.0, 1e-8);
            EXPECT_NEAR(std::abs(fs.components.col(i).dot(es.eigenvectors().col(j))), 1.0, 1e-8);
        }
        expect_orthonormal(fs);
    }
}

TEST(Pca, SignConventionAndDeterminism) {
    const DataMatrix d = test::random_data(15, 4, 4, 9);
    const FaceSpace a = fit_pca(d, 5), b = fit_pca(d, 5);
    EXPECT_EQ(a.components, b.components);
    for (Eigen::Index i = 0; i < 5; ++i) {
        Eigen::Index at = 0;
        a.components.col(i).cwiseAbs().maxCoeff(&at);
        EXPECT_GT(a.components(at, i), 0.0);
    }
}

TEST(Pca, ProjectionDecorrelates) {
    const DataMatrix d = test::random_data(30, 6, 6, 4);
    const FaceSpace fs = fit_pca_all(d);
    const Eigen::MatrixXd y = project_rows(fs, d.rows(), fs.component_count());
    const Eigen::MatrixXd c = y.transpose() * y / 29.0;
    const Eigen::MatrixXd off = c - Eigen::MatrixXd(c.diagonal().asDiagonal());
    EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-8 * c.trace());
    EXPECT_TRUE(near(c.diagonal(), fs.eigenvalues, 1e-8 * c.trace()));
}

TEST(Wpca, UniformWeightsScaleEigenvalues) {
    const FaceSpace p = fit_pca(test::toy_data(), 2);
    const FaceSpace w = fit_wpca(test::toy_data(), weights({0.5, 0.5}), 2);
    EXPECT_EQ(w.method, Method::wpca);
    EXPECT_TRUE(near(w.components.col(0), p.components.col(0), 1e-12));
    EXPECT_NEAR(w.eigenvalues[0], p.eigenvalues[0] / 2, 1e-12);
    EXPECT_NEAR(w.eigenvalues[1], p.eigenvalues[1] / 2, 1e-12);

    const DataMatrix d = test::random_data(50, 16, 16, 5);
    const FaceSpace pa = fit_pca(d, 20);
    const FaceSpace wa = fit_wpca(d, uniform_map(256), 20);
    for (Eigen::Index i = 0; i < 20; ++i) {
        EXPECT_GE(std::abs(pa.components.col(i).dot(wa.components.col(i))), 1 - 1e-8);
        EXPECT_NEAR(wa.eigenvalues[i] * 256 / pa.eigenvalues[i], 1.0, 1e-8);
    }
}

TEST(Wpca, ToyWeightedBasis) {
    const FaceSpace w = fit_wpca(test::toy_data(), weights({0.9, 0.1}), 2);
    EXPECT_TRUE(near(w.components.col(0), Eigen::Vector2d(1, 0), 1e-10));
    EXPECT_TRUE(near(w.components.col(1), Eigen::Vector2d(0, 1), 1e-10));
    EXPECT_NEAR(w.eigenvalues[0], 0.6, 1e-10);
    EXPECT_NEAR(w.eigenvalues[1], 4.0 / 15.0, 1e-10);
}

TEST(Wpca, ZeroWeightPixelIsIgnored) {
    const DataMatrix d = test::random_data(12, 3, 3, 6);
    Eigen::VectorXd raw = Eigen::VectorXd::Ones(9);
    raw[4] = 0.0;
    const AttentionMap w = normalize_weights(raw);
    EXPECT_TRUE(weighted_centered(d, w).col(4).isZero());
    const FaceSpace fs = fit_wpca_all(d, w);
    EXPECT_LT(fs.components.row(4).cwiseAbs().maxCoeff(), 1e-12);
    expect_orthonormal(fs);
}

TEST(Wpca, RejectsBadMaps) {
    const DataMatrix d = test::toy_data();
    EXPECT_THROW(fit_wpca(d, uniform_map(3), 1), UsageError);
    AttentionMap skew = uniform_map(2);
    skew.weights[0] = 0.9;
    EXPECT_THROW(fit_wpca(d, skew, 1), UsageError);
}

TEST(Dpca, ToyReRanking) {
    const FaceSpace fs = fit_dpca_full(test::toy_data(), weights({0.8, 0.2}));
    EXPECT_EQ(fs.method, Method::dpca);
    ASSERT_TRUE(fs.alignment.has_value());
    EXPECT_TRUE(near(*fs.alignment, Eigen::Vector2d(0.8, 0.2), 1e-12));
    EXPECT_TRUE(near(fs.components.col(0), Eigen::Vector2d(1, 0), 1e-10));
    EXPECT_TRUE(near(fs.components.col(1), Eigen::Vector2d(0, 1), 1e-10));
    EXPECT_NEAR(fs.eigenvalues[0], 2.0 / 3.0, 1e-12);

    const FaceSpace one = fit_dpca(test::toy_data(), weights({0.8, 0.2}), 1);
    EXPECT_EQ(one.component_count(), 1);
    EXPECT_THROW(fit_dpca(test::toy_data(), weights({0.8, 0.2}), 2), NumericalError);
}

TEST(Dpca, SelfAlignmentPicksComponent) {
    const DataMatrix d = test::blob_data(80, 12);
    const FaceSpace pca = fit_pca_all(d);
    for (Eigen::Index j = 0; j < 3; ++j) {
        const AttentionMap w = normalize_weights(pca.components.col(j));
        const FaceSpace fs = fit_dpca_full(d, w);
        EXPECT_GE(std::abs(fs.components.col(0).dot(pca.components.col(j))), 0.999) << "component " << j;
    }
}

TEST(Dpca, FullSetEqualsPca) {
    const DataMatrix d = test::random_data(25, 5, 5, 13);
    const FaceSpace pca = fit_pca_all(d);
    const FaceSpace dp = fit_dpca_full(d, random_uniform_map(25, 8));
    ASSERT_EQ(dp.component_count(), pca.component_count());
    const Eigen::MatrixXd cross = (dp.components.transpose() * pca.components).cwiseAbs();
    for (Eigen::Index i = 0; i < cross.rows(); ++i) {
        EXPECT_NEAR(cross.row(i).maxCoeff(), 1.0, 1e-8);
        EXPECT_NEAR(cross.col(i).maxCoeff(), 1.0, 1e-8);
    }
    const Eigen::VectorXd k = dp.alignment->cwiseAbs();
    for (Eigen::Index i = 1; i < k.size(); ++i) EXPECT_LE(k[i], k[i - 1]);
}

TEST(Dpca, TiesKeepEigenvalueOrder) {
    DataMatrix raw = test::random_data(20, 4, 4, 21);
    Eigen::MatrixXd x = raw.rows();
    x.colwise() -= x.rowwise().mean();
    const DataMatrix d(x, {}, raw.geometry());
    const FaceSpace pca = fit_pca_all(d);
    const FaceSpace dp = fit_dpca_full(d, uniform_map(16));
    EXPECT_LT(dp.alignment->cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(dp.components, pca.components);
    EXPECT_EQ(dp.eigenvalues, pca.eigenvalues);
}

TEST(Dpca, RankByAlignment) {
    const auto order = rank_by_alignment(Eigen::Vector4d(0.1, -0.5, 0.5 + 1e-14, 0.3));
    EXPECT_EQ(order, (std::vector<Eigen::Index>{1, 2, 3, 0}));
}

TEST(Projection, Examples) {
    const DataMatrix d = test::random_data(10, 3, 3, 30);
    const FaceSpace fs = fit_pca_all(d);
    const Eigen::Index m = fs.component_count();
    EXPECT_LT(project(fs, fs.mean, m).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::VectorXd y = project(fs, fs.mean + 3.0 * fs.components.col(0), m);
    EXPECT_NEAR(y[0], 3.0, 1e-12);
    EXPECT_LT(y.tail(m - 1).cwiseAbs().maxCoeff(), 1e-12);

    const FaceSpace toy = fit_pca(test::toy_data(), 2);
    EXPECT_TRUE(near(project(toy, Eigen::Vector2d(0, 2), 2), Eigen::Vector2d(2, 0), 1e-12));
    EXPECT_THROW(project(toy, Eigen::Vector3d(0, 0, 0), 1), UsageError);
    EXPECT_THROW(project(toy, Eigen::Vector2d(0, 0), 3), UsageError);
}

TEST(Projection, ReconstructInSpan) {
    const DataMatrix d = test::random_data(10, 3, 3, 31);
    const FaceSpace fs = fit_pca_all(d);
    EXPECT_EQ(reconstruct(fs, Eigen::VectorXd::Zero(3)), fs.mean);
    for (Eigen::Index i = 0; i < d.sample_count(); ++i) {
        const Eigen::VectorXd x = d.rows().row(i).transpose();
        EXPECT_TRUE(near(reconstruct(fs, project(fs, x, fs.component_count())), x, 1e-8));
    }
}

TEST(Projection, MseNonIncreasing) {
    const DataMatrix d = test::random_data(40, 6, 6, 32);
    const FaceSpace pca = fit_pca_all(d);
    double prev = reconstruction_mse(pca, d.rows(), 0);
    for (Eigen::Index m = 1; m <= pca.component_count(); ++m) {
        const double e = reconstruction_mse(pca, d.rows(), m);
        EXPECT_LE(e, prev + 1e-9);
        prev = e;
    }
    EXPECT_LT(prev, 1e-8);

    const AttentionMap w = random_uniform_map(36, 3);
    const FaceSpace wp = fit_wpca_all(d, w);
    prev = reconstruction_mse(wp, d.rows(), 0, &w.weights);
    for (Eigen::Index m = 1; m <= wp.component_count(); ++m) {
        const double e = reconstruction_mse(wp, d.rows(), m, &w.weights);
        EXPECT_LE(e, prev + 1e-9);
        prev = e;
    }
}

TEST(Serialization, RoundTripAndMetadata) {
    test::TempDir dir;
    const DataMatrix d = test::random_data(12, 4, 4, 40);
    const FaceSpace fs = fit_dpca(d, random_uniform_map(16, 1), 6);
    write_face_space(dir / "fs.bin", fs);
    const FaceSpace back = read_face_space(dir / "fs.bin");
    EXPECT_EQ(back.method, Method::dpca);
    EXPECT_EQ(back.components, fs.components);
    EXPECT_EQ(back.mean, fs.mean);
    EXPECT_EQ(back.eigenvalues, fs.eigenvalues);
    EXPECT_EQ(*back.alignment, *fs.alignment);

    const auto j = nlohmann::json::parse(face_space_metadata(fs, {{"seed", "5"}}));
    EXPECT_EQ(j["method"], "dpca");
    EXPECT_EQ(j["m"], 6);
    EXPECT_EQ(j["seed"], "5");
    const auto abs_k = j["abs_alignment"].get<std::vector<double>>();
    EXPECT_TRUE(std::is_sorted(abs_k.rbegin(), abs_k.rend()));

    const FaceSpace p = fit_pca(d, 3);
    write_face_space(dir / "p.bin", p);
    EXPECT_FALSE(read_face_space(dir / "p.bin").alignment.has_value());

    test::write_text(dir / "junk.bin", "ATTNFSPC");
    EXPECT_THROW(read_face_space(dir / "junk.bin"), DataError);
}

TEST(MethodNames, Parse) {
    EXPECT_EQ(parse_method("wpca"), Method::wpca);
    EXPECT_EQ(to_string(Method::dpca), "dpca");
    EXPECT_THROW(parse_method("lda"), UsageError);
}

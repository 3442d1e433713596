// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "attnpca/attention.hpp"
#include "attnpca/classify.hpp"
#include "attnpca/facespace.hpp"
#include "attnpca/harness.hpp"
#include "attnpca/stats.hpp"
#include "attnpca/synth.hpp"
#include "cli.hpp"
#include "test_support.hpp"

using namespace attnpca;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Verdict criterion1() {
    Verdict v;
    const auto t0 = Clock::now();
    const DataMatrix d = test::random_data(50, 16, 16, 101);
    const FaceSpace pca = fit_pca(d, 20);
    const FaceSpace wpca = fit_wpca(d, uniform_map(256), 20);
    double min_cos = 1.0, max_dev = 0.0;
    for (Eigen::Index i = 0; i < 20; ++i) {
        min_cos = std::min(min_cos, std::abs(pca.components.col(i).dot(wpca.components.col(i))));
        max_dev = std::max(max_dev, std::abs(wpca.eigenvalues[i] * 256.0 / pca.eigenvalues[i] - 1.0));
    }
    const double secs = seconds_since(t0);
    v.require(min_cos >= 1.0 - 1e-8, "min |cos| " + fmt(min_cos));
    v.require(max_dev <= 1e-8, "max |ratio-1| " + fmt(max_dev));
    v.require(secs < 1.0, "runtime " + fmt(secs) + " s");
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("min|cos|=") + fmt(min_cos) + " max|ratio-1|=" +
                fmt(max_dev) + " t=" + fmt(secs) + "s";
    return v;
}

Verdict criterion2() {
    Verdict v;
    const auto t0 = Clock::now();
    const DataMatrix d = test::random_data(20, 8, 8, 202);
    const FaceSpace fs = fit_pca_all(d);
    const Eigen::MatrixXd z = center(d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z.transpose() * z / 19.0);
    const Eigen::Index n = es.eigenvalues().size();
    double max_rel = 0.0, max_vec = 0.0;
    const Eigen::Index direct_nonzero =
        (es.eigenvalues().array() > kRelativeEigenTolerance * es.eigenvalues().maxCoeff()).count();
    v.require(fs.component_count() == direct_nonzero,
              "rank " + std::to_string(fs.component_count()) + " vs " + std::to_string(direct_nonzero));
    for (Eigen::Index i = 0; i < std::min(fs.component_count(), direct_nonzero); ++i) {
        const Eigen::Index j = n - 1 - i;
        max_rel = std::max(max_rel, std::abs(fs.eigenvalues[i] - es.eigenvalues()[j]) / es.eigenvalues()[j]);
        const Eigen::VectorXd p = es.eigenvectors().col(j);
        const double s = fs.components.col(i).dot(p) >= 0 ? 1.0 : -1.0;
        max_vec = std::max(max_vec, (fs.components.col(i) - s * p).cwiseAbs().maxCoeff());
    }
    const double secs = seconds_since(t0);
    v.require(max_rel <= 1e-8, "eigenvalue rel err " + fmt(max_rel));
    v.require(max_vec <= 1e-8, "eigenvector err " + fmt(max_vec));
    v.require(secs < 1.0, "runtime " + fmt(secs) + " s");
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("rank=") + std::to_string(fs.component_count()) +
                " max rel err=" + fmt(max_rel) + " max vec err=" + fmt(max_vec) + " t=" + fmt(secs) + "s";
    return v;
}

Verdict criterion3() {
    Verdict v;
    const DataMatrix d = test::blob_data(80, 303);
    const FaceSpace pca = fit_pca_all(d);
    std::string cosines;
    for (Eigen::Index j = 0; j < 3; ++j) {
        const FaceSpace dp = fit_dpca_full(d, normalize_weights(pca.components.col(j)));
        const double c = std::abs(dp.components.col(0).dot(pca.components.col(j)));
        v.require(c >= 0.999, "w=p" + std::to_string(j + 1) + " gives |cos| " + fmt(c));
        cosines += (j ? "," : "") + fmt(c);
    }
    const FaceSpace dp = fit_dpca_full(d, random_uniform_map(64, 3));
    bool same_set = dp.component_count() == pca.component_count();
    if (same_set) {
        const Eigen::MatrixXd cross = (dp.components.transpose() * pca.components).cwiseAbs();
        for (Eigen::Index i = 0; i < cross.rows(); ++i)
            same_set = same_set && std::abs(cross.row(i).maxCoeff() - 1.0) <= 1e-8 &&
                       std::abs(cross.col(i).maxCoeff() - 1.0) <= 1e-8;
    }
    v.require(same_set, "dPCA with m+ = m is not a permutation of the PCA basis");
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("|cos| for j=1..3: ") + cosines +
                "; full-set equality " + (same_set ? "holds" : "fails");
    return v;
}

Verdict criterion4() {
    Verdict v;
    const DataMatrix d = test::toy_data();
    double worst = 0.0;
    const auto check = [&](const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
        worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
    };
    const auto scalar = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };

    const FaceSpace pca = fit_pca(d, 2);
    check(pca.components.col(0), Eigen::Vector2d(0, 1));
    check(pca.components.col(1), Eigen::Vector2d(1, 0));
    scalar(pca.eigenvalues[0], 8.0 / 3.0);
    scalar(pca.eigenvalues[1], 2.0 / 3.0);

    const FaceSpace half = fit_wpca(d, normalize_weights(Eigen::Vector2d(0.5, 0.5)), 2);
    check(half.components.col(0), Eigen::Vector2d(0, 1));
    scalar(half.eigenvalues[0], 4.0 / 3.0);
    scalar(half.eigenvalues[1], 1.0 / 3.0);

    const FaceSpace w = fit_wpca(d, normalize_weights(Eigen::Vector2d(0.9, 0.1)), 2);
    check(w.components.col(0), Eigen::Vector2d(1, 0));
    check(w.components.col(1), Eigen::Vector2d(0, 1));
    scalar(w.eigenvalues[0], 0.6);
    scalar(w.eigenvalues[1], 4.0 / 15.0);

    const FaceSpace dp = fit_dpca_full(d, normalize_weights(Eigen::Vector2d(0.8, 0.2)));
    check(dp.components.col(0), Eigen::Vector2d(1, 0));
    check(dp.components.col(1), Eigen::Vector2d(0, 1));
    check(*dp.alignment, Eigen::Vector2d(0.8, 0.2));

    check(project(pca, Eigen::Vector2d(0, 2), 2), Eigen::Vector2d(2, 0));
    v.require(worst <= 1e-10, "max deviation " + fmt(worst));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("max deviation from hand-derived bases=") + fmt(worst);
    return v;
}

double cv_accuracy(const Eigen::MatrixXd& y, const std::vector<std::string>& labels, std::uint64_t seed) {
    const auto fold = stratified_kfold(labels, 10, seed);
    double total = 0.0;
    for (std::size_t f = 0; f < 10; ++f) {
        std::vector<Eigen::Index> tr, te;
        std::vector<std::string> ltr, lte;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            (fold[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
            (fold[i] == f ? lte : ltr).push_back(labels[i]);
        }
        const auto model = train(y(tr, Eigen::all), ltr);
        total += accuracy(model, y(te, Eigen::all), lte);
    }
    return total / 10.0;
}

Verdict criterion5() {
    Verdict v;
    Rng rng(505);
    const int per = 100;
    Eigen::MatrixXd y(2 * per, 2);
    std::vector<std::string> labels;
    for (int i = 0; i < 2 * per; ++i) {
        const bool b = i >= per;
        y.row(i) << (b ? 10.0 : 0.0) + rng.normal(), rng.normal();
        labels.push_back(b ? "b" : "a");
    }
    const double separated = cv_accuracy(y, labels, 1);
    auto permuted = labels;
    rng.shuffle(permuted.begin(), permuted.end());
    const double null = cv_accuracy(y, permuted, 2);
    v.require(separated == 1.0, "separated accuracy " + fmt(separated));
    v.require(null >= 0.4 && null <= 0.6, "permuted accuracy " + fmt(null));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("10-fold accuracy ") + fmt(separated) +
                ", permuted labels " + fmt(null);
    return v;
}

Verdict criterion6() {
    Verdict v;
    const auto t0 = Clock::now();
    const SynthSpec spec; // 32x32, 200 per class, 8x8 patch
    const auto ds = generate_synthetic(spec, 606);
    const DataMatrix data = to_data_matrix(ds.images);

    ExperimentConfig config;
    config.methods = {Method::dpca};
    config.maps = {MapCondition{MapProvenance::empirical, ds.true_map}, MapCondition{MapProvenance::random_uniform, {}}};
    config.component_grid = {10};
    config.folds = 10;
    config.repeats = 5;
    config.seed = 6;
    const ExperimentResult result = run_sweep(config, data);
    const auto cmp = compare_conditions(result, Method::dpca, "empirical", "random_uniform");
    const double secs = seconds_since(t0);
    const double gap = 100.0 * (cmp.mean_a - cmp.mean_b);
    v.require(cmp.pairs == 50, "paired cells " + std::to_string(cmp.pairs));
    v.require(gap >= 5.0, "gap " + fmt(gap) + " points");
    v.require(cmp.greater.p_value < 0.05, "one-sided p " + fmt(cmp.greater.p_value));
    v.require(secs < 30.0, "runtime " + fmt(secs) + " s");
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("true map ") + fmt(cmp.mean_a) + " vs random " +
                fmt(cmp.mean_b) + " (gap " + fmt(gap) + " pts), p=" + fmt(cmp.greater.p_value) + ", " +
                std::to_string(cmp.pairs) + " pairs, t=" + fmt(secs) + "s";
    return v;
}

std::vector<GazeSample> samples_at(const std::vector<std::pair<double, double>>& pts) {
    std::vector<GazeSample> s;
    for (std::size_t i = 0; i < pts.size(); ++i) s.push_back({i * 1000.0 / 300.0, pts[i].first, pts[i].second, true});
    return s;
}

Verdict criterion7() {
    Verdict v;
    const auto one = filter_fixations(samples_at(std::vector<std::pair<double, double>>(30, {100, 100})));
    v.require(one.size() == 1 && one[0].x == 100 && one[0].y == 100 && std::abs(one[0].duration_ms - 100) < 1e-12,
              "30 samples at (100,100)");
    auto pts = std::vector<std::pair<double, double>>(20, {100, 100});
    pts.insert(pts.end(), 20, {200, 200});
    const auto two = filter_fixations(samples_at(pts));
    v.require(two.size() == 2 && two[0].x == 100 && two[1].x == 200 && two[1].y == 200, "20+20 samples");
    v.require(filter_fixations(samples_at(std::vector<std::pair<double, double>>(10, {50, 50}))).empty(),
              "10 samples at (50,50)");

    Rng rng(707);
    std::vector<GazeSample> base;
    double cx = 256, cy = 256;
    for (int i = 0; i < 3000; ++i) {
        if (rng.uniform01() < 0.02) {
            cx = rng.uniform(0, 512);
            cy = rng.uniform(0, 512);
        }
        base.push_back({i * 1000.0 / 300.0, cx + 20 * rng.normal(), cy + 20 * rng.normal(), rng.uniform01() > 0.03});
    }
    const auto ref = filter_fixations(base);
    double worst = 0.0;
    bool grouping = true;
    for (int k = 0; k < 100; ++k) {
        const double dx = rng.uniform(-2000, 2000), dy = rng.uniform(-2000, 2000);
        auto moved = base;
        for (auto& s : moved) {
            s.x += dx;
            s.y += dy;
        }
        const auto f = filter_fixations(moved);
        if (f.size() != ref.size()) {
            grouping = false;
            continue;
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            grouping = grouping && f[i].sample_count == ref[i].sample_count && f[i].start_ms == ref[i].start_ms;
            worst = std::max({worst, std::abs(f[i].x - ref[i].x - dx), std::abs(f[i].y - ref[i].y - dy)});
        }
    }
    v.require(grouping, "shift changed fixation grouping");
    v.require(worst <= 1e-9, "centroid shift error " + fmt(worst));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("examples exact; ") + std::to_string(ref.size()) +
                " fixations under 100 shifts, max centroid error " + fmt(worst) + " px";
    return v;
}

Verdict criterion8() {
    Verdict v;
    test::TempDir dir;
    std::ostringstream sink;
    const auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
    int code = run({"synth", "--rows", "16", "--cols", "16", "--per-class", "40", "--patch-row", "4", "--patch-col", "4",
                    "--seed", "8", "--out", (dir / "data").string()});
    v.require(code == 0, "synth exit " + std::to_string(code));
    const std::vector<std::string> common{"experiment", "--dataset", (dir / "data" / "manifest.csv").string(), "--map",
                                          (dir / "data" / "true_map.bin").string(), "--methods", "pca,wpca,dpca",
                                          "--conditions", "empirical,random_uniform,random_fixation", "--components",
                                          "5:20:5", "--seed", "7"};
    for (const char* out : {"a", "b"}) {
        auto args = common;
        args.insert(args.end(), {"--out", (dir / out).string()});
        code = run(args);
        v.require(code == 0, std::string("experiment exit ") + std::to_string(code));
    }
    std::size_t bytes = 0;
    for (const char* f : {"results.csv", "summary.csv", "paired_tests.csv"}) {
        const std::string a = test::read_text(dir / "a" / f), b = test::read_text(dir / "b" / f);
        v.require(!a.empty() && a == b, std::string(f) + " differs");
        bytes += a.size();
    }
    if (!v.pass) v.detail += "; output: " + sink.str();
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("3 CSV files, ") + std::to_string(bytes) +
                " bytes, identical across runs";
    return v;
}

Verdict criterion9() {
    Verdict v;
    std::vector<double> b(10), a(10);
    for (int i = 0; i < 10; ++i) {
        b[static_cast<std::size_t>(i)] = 0.5 + 0.03 * i;
        a[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] + 0.1;
    }
    const auto g = wilcoxon_signed_rank(a, b, Alternative::greater);
    const auto same = wilcoxon_signed_rank(a, a);
    v.require(g.p_value == 1.0 / 1024.0, "one-sided p " + fmt(g.p_value));
    v.require(same.p_value == 1.0 && same.statistic == 0.0, "identical pairs p " + fmt(same.p_value));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("p=") + fmt(g.p_value) + " (1/1024=" +
                fmt(1.0 / 1024.0) + "), identical pairs p=" + fmt(same.p_value);
    return v;
}

Verdict criterion10() {
    Verdict v;
    SynthSpec spec;
    spec.rows = 16;
    spec.cols = 16;
    spec.per_class = 140;
    spec.patch_row = 4;
    spec.patch_col = 4;
    const auto ds = generate_synthetic(spec, 1010);
    const DataMatrix data = to_data_matrix(ds.images);
    ExperimentConfig config;
    config.methods = {Method::dpca};
    config.maps = {MapCondition{MapProvenance::empirical, ds.true_map}, MapCondition{MapProvenance::random_uniform, {}}};
    config.component_grid = default_component_grid();
    config.seed = 10;
    const auto result = run_sweep(config, data);
    v.require(result.rows.size() == 240, "rows " + std::to_string(result.rows.size()));

    const FaceSpace pca = fit_pca_all(data);
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    std::string mses;
    for (Eigen::Index m : config.component_grid) {
        const double e = reconstruction_mse(pca, data.rows(), m);
        monotone = monotone && e <= prev;
        prev = e;
    }
    v.require(monotone, "pca reconstruction MSE increased across the grid");
    v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(result.rows.size()) +
                " rows; pca MSE 20->240: " + fmt(reconstruction_mse(pca, data.rows(), 20)) + " -> " + fmt(prev);
    return v;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"uniform-weight wPCA equals PCA", criterion1},
        {"snapshot matches direct eigendecomposition", criterion2},
        {"dPCA re-ranking and full-set equality", criterion3},
        {"toy PCA/wPCA/dPCA bases", criterion4},
        {"classifier sanity", criterion5},
        {"end-to-end direction of effect", criterion6},
        {"fixation filter examples and translation", criterion7},
        {"experiment determinism", criterion8},
        {"paired-test calibration", criterion9},
        {"sweep bookkeeping", criterion10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s criterion %zu: %s -- %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mathds/errors.hpp"
#include "mathds/mlkit.hpp"
#include "mathds/random.hpp"

using namespace mathds;

namespace {

PointCloud cloud(std::initializer_list<std::initializer_list<double>> rows, std::vector<int> y = {}) {
    PointCloud pc;
    pc.x = Matrix<double>(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) pc.x(i, j++) = v;
        ++i;
    }
    pc.y = std::move(y);
    return pc;
}

PointCloud random_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
    PointCloud pc;
    pc.x = Matrix<double>(n, d);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) pc.x(i, j) = rng.normal() * (1.0 + static_cast<double>(j)) + 0.3 * j;
    return pc;
}

PointCloud blobs(std::size_t per_class, std::size_t d, std::size_t classes, double sep, std::uint64_t seed) {
    PointCloud pc;
    pc.x = Matrix<double>(per_class * classes, d);
    Rng rng(seed);
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            const std::size_t r = c * per_class + i;
            for (std::size_t j = 0; j < d; ++j) pc.x(r, j) = rng.normal() + (j == c % d ? sep : 0.0);
            pc.y.push_back(static_cast<int>(c));
        }
    return pc;
}

double max_orthonormality_error(const Matrix<double>& v) {
    double err = 0;
    for (std::size_t a = 0; a < v.cols(); ++a)
        for (std::size_t b = 0; b < v.cols(); ++b) {
            double s = 0;
            for (std::size_t k = 0; k < v.rows(); ++k) s += v(k, a) * v(k, b);
            err = std::max(err, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    return err;
}

double max_residual(const PcaModel& m) {
    double worst = 0;
    const std::size_t d = m.second_moment.rows();
    for (std::size_t c = 0; c < m.n_components(); ++c) {
        double r = 0;
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0;
            for (std::size_t k = 0; k < d; ++k) s += m.second_moment(i, k) * m.components(k, c);
            r += (s - m.eigenvalues[c] * m.components(i, c)) * (s - m.eigenvalues[c] * m.components(i, c));
        }
        worst = std::max(worst, std::sqrt(r));
    }
    return worst;
}

}  // namespace

TEST_CASE("PCA: identity cloud is degenerate") {
    const auto m = pca_fit(cloud({{1, 0}, {0, 1}}), 1);
    CHECK(m.second_moment(0, 0) == doctest::Approx(0.5));
    CHECK(m.second_moment(0, 1) == doctest::Approx(0.0));
    CHECK(m.eigenvalues[0] == doctest::Approx(0.5));
    CHECK(m.all_eigenvalues[1] == doctest::Approx(0.5));
    CHECK(m.degenerate);
}

TEST_CASE("PCA: rank-one cloud") {
    const auto m = pca_fit(cloud({{1, 1}, {-1, -1}}), 2);
    CHECK(m.eigenvalues[0] == doctest::Approx(2.0));
    CHECK(m.eigenvalues[1] == doctest::Approx(0.0));
    CHECK(m.components(0, 0) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(m.components(1, 0) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("PCA: trace identity, orthonormality and residuals on a random 500x10 cloud") {
    const auto pc = random_cloud(500, 10, 11);
    for (bool centered : {false, true}) {
        const auto m = pca_fit(pc, 10, centered, 3);
        double trace = 0;
        for (std::size_t i = 0; i < 10; ++i) trace += m.second_moment(i, i);
        const double sum = std::accumulate(m.all_eigenvalues.begin(), m.all_eigenvalues.end(), 0.0);
        CHECK(std::abs(sum - trace) < 1e-9);
        CHECK(max_orthonormality_error(m.components) < 1e-10);
        CHECK(max_residual(m) < 1e-9);
        CHECK(std::is_sorted(m.eigenvalues.rbegin(), m.eigenvalues.rend()));
    }
}

TEST_CASE("PCA: sign convention and projections") {
    const auto pc = random_cloud(200, 5, 12);
    const auto m = pca_fit(pc, 3);
    for (std::size_t c = 0; c < 3; ++c) {
        std::size_t big = 0;
        for (std::size_t k = 1; k < 5; ++k)
            if (std::abs(m.components(k, c)) > std::abs(m.components(big, c))) big = k;
        CHECK(m.components(big, c) > 0);
    }
    // Projecting an eigenvector scaled by its eigenvalue.
    PointCloud probe;
    probe.x = Matrix<double>(1, 5);
    for (std::size_t k = 0; k < 5; ++k) probe.x(0, k) = m.eigenvalues[1] * m.components(k, 1);
    CHECK(pca_project(m, probe, 1)[0] == doctest::Approx(m.eigenvalues[1]));
    CHECK(std::abs(pca_project(m, probe, 0)[0]) < 1e-9);
    CHECK(std::abs(pca_project(m, probe, 2)[0]) < 1e-9);
    CHECK_THROWS_AS(pca_project(m, probe, 3), DomainError);
}

TEST_CASE("PCA: invariant under row permutation and thread count") {
    const auto pc = random_cloud(3000, 6, 13);
    std::vector<std::size_t> perm(pc.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    const auto shuffled = pc.subset(perm);
    const auto a = pca_fit(pc, 2, false, 1), b = pca_fit(shuffled, 2, false, 4);
    const auto pa = pca_project(a, pc, 0), pb = pca_project(b, pc, 0);
    for (std::size_t i = 0; i < pc.size(); ++i) CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-10));
    CHECK(pca_fit(pc, 2, false, 1).second_moment == pca_fit(pc, 2, false, 4).second_moment);
}

TEST_CASE("PCA: bad requests") {
    CHECK_THROWS_AS(pca_fit(random_cloud(10, 3, 1), 4), DomainError);
    PointCloud nan = random_cloud(10, 3, 1);
    nan.x(2, 1) = std::nan("");
    CHECK_THROWS_AS(pca_fit(nan, 1), DataError);
}

TEST_CASE("softmax rows sum to one") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> z(1 + rng.below(6));
        for (double& v : z) v = 50 * rng.normal();
        const auto p = softmax(z);
        CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) <= 1e-12);
    }
    const auto big = softmax(std::vector<double>{1000, 1000});
    CHECK(big[0] == doctest::Approx(0.5));
}

TEST_CASE("logistic gradient matches central differences") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 20 + rng.below(20), d = 2 + rng.below(4), classes = 2 + rng.below(3);
        Matrix<double> x(n, d), w(classes, d + 1);
        std::vector<int> y(n);
        for (double& v : x.data()) v = rng.normal();
        for (double& v : w.data()) v = 0.5 * rng.normal();
        for (int& v : y) v = static_cast<int>(rng.below(classes));
        Matrix<double> grad;
        logreg_loss(w, x, y, 0.01, &grad);
        double num2 = 0, diff2 = 0;
        const double h = 1e-5;
        for (std::size_t c = 0; c < classes; ++c)
            for (std::size_t j = 0; j <= d; ++j) {
                Matrix<double> wp = w, wm = w;
                wp(c, j) += h;
                wm(c, j) -= h;
                const double fd = (logreg_loss(wp, x, y, 0.01, nullptr) - logreg_loss(wm, x, y, 0.01, nullptr)) / (2 * h);
                num2 += fd * fd;
                diff2 += (fd - grad(c, j)) * (fd - grad(c, j));
            }
        CHECK(std::sqrt(diff2 / num2) < 1e-5);
    }
}

TEST_CASE("logistic regression separates two blobs") {
    const auto data = blobs(100, 3, 2, 8.0, 21);
    LogRegConfig cfg;
    cfg.seed = 1;
    const auto model = logreg_train(data, 2, cfg);
    const auto ev = evaluate(logreg_predict(model, data.x), data.y);
    CHECK(ev.accuracy == 1.0);
    const auto again = logreg_train(data, 2, cfg);
    CHECK(again.weights == model.weights);
    const auto p = logreg_predict_proba(model, data.x);
    for (std::size_t i = 0; i < p.rows(); ++i) CHECK(std::abs(p(i, 0) + p(i, 1) - 1.0) <= 1e-12);
}

TEST_CASE("logistic regression: three classes and JSON round-trip") {
    const auto data = blobs(80, 4, 3, 6.0, 22);
    auto [train, test] = train_test_split(data, 0.8, 3);
    const auto model = logreg_train(train, 3, {});
    CHECK(evaluate(logreg_predict(model, test.x), test.y).accuracy > 0.95);
    const auto back = logreg_from_json(logreg_to_json(model));
    CHECK(back.weights == model.weights);
    CHECK(back.mean == model.mean);
    CHECK(logreg_predict(back, test.x) == logreg_predict(model, test.x));
    CHECK_THROWS_AS(logreg_from_json("{\"classes\": 2}"), DataError);
}

TEST_CASE("logistic regression: a diverging rate returns the best weights with a warning") {
    const auto data = blobs(50, 2, 2, 1.0, 23);
    LogRegConfig cfg;
    cfg.lr = 1e4;
    cfg.patience = 5;
    cfg.epochs = 200;
    const auto model = logreg_train(data, 2, cfg);
    CHECK_FALSE(model.warning.empty());
    CHECK(std::isfinite(model.loss));
}

TEST_CASE("knn basics") {
    const auto train = cloud({{0, 0}, {1, 0}, {5, 5}, {6, 5}}, {0, 0, 1, 1});
    const auto test = cloud({{1, 0}, {5.5, 5}});
    CHECK(knn_classify(train, test.x, 1, 1) == std::vector<int>{0, 1});
    CHECK(knn_classify(train, test.x, 3, 2) == std::vector<int>{0, 1});
    // Tied vote at k=4: the class with the smaller summed distance wins.
    const auto probe = cloud({{2.4, 2.4}});
    CHECK(knn_classify(train, probe.x, 4, 1) == std::vector<int>{0});
    // Complete tie on counts and distance: lowest label.
    const auto sym = cloud({{-1, 0}, {1, 0}}, {1, 0});
    CHECK(knn_classify(sym, cloud({{0, 0}}).x, 2, 1) == std::vector<int>{0});
    // Equidistant neighbours, k=1: the earlier train row.
    CHECK(knn_classify(sym, cloud({{0, 0}}).x, 1, 1) == std::vector<int>{1});
}

TEST_CASE("knn train-on-train is perfect for distinct points; integer path equals float path") {
    auto data = blobs(150, 4, 3, 3.0, 24);
    CHECK(evaluate(knn_classify(data, data.x, 1, 2), data.y).accuracy == 1.0);
    PointCloud ints;
    ints.x = Matrix<double>(400, 6);
    Rng rng(25);
    for (double& v : ints.x.data()) v = static_cast<double>(rng.below(13));
    for (int i = 0; i < 400; ++i) ints.y.push_back(static_cast<int>(rng.below(2)));
    Matrix<double> test(100, 6);
    for (double& v : test.data()) v = static_cast<double>(rng.below(13));
    const auto exact = knn_classify(ints, test, 3, 2);
    Matrix<double> nudged = test;
    PointCloud shifted = ints;
    for (double& v : shifted.x.data()) v += 0.5;  // same distances, forces the float path
    for (double& v : nudged.data()) v += 0.5;
    CHECK(knn_classify(shifted, nudged, 3, 1) == exact);
}

TEST_CASE("evaluate") {
    const std::vector<int> a{0, 1, 1, 0};
    CHECK(evaluate(a, a).accuracy == 1.0);
    const std::vector<int> b{1, 0, 0, 1};
    CHECK(evaluate(a, b).accuracy == 0.0);
    const std::vector<int> truth{0, 0, 0, 0, 1, 1, 1, 1};
    const std::vector<int> pred{0, 0, 0, 1, 0, 1, 1, 1};
    const auto ev = evaluate(pred, truth);
    CHECK(ev.accuracy == 0.75);
    CHECK(ev.confusion == std::vector<std::vector<std::uint64_t>>{{3, 1}, {1, 3}});
    CHECK(ev.per_class_precision[0] == doctest::Approx(0.75));
    CHECK_THROWS_AS(evaluate(std::vector<int>{0, 1}, std::vector<int>{0}), DomainError);
}

TEST_CASE("split is seeded and disjoint") {
    const auto data = blobs(50, 2, 2, 1.0, 26);
    auto [tr1, te1] = train_test_split(data, 0.8, 9);
    auto [tr2, te2] = train_test_split(data, 0.8, 9);
    CHECK(tr1.size() == 80);
    CHECK(te1.size() == 20);
    CHECK(tr1.x == tr2.x);
    CHECK(te1.y == te2.y);
    CHECK_THROWS_AS(train_test_split(data, 1.0, 1), DomainError);
}

TEST_CASE("point clouds from files") {
    std::istringstream csv("# note\nx1,label,x2\n1,0,2\n3,1,4\n");
    const auto pc = read_point_cloud_csv(csv);
    CHECK(pc.dim() == 2);
    CHECK(pc.y == std::vector<int>{0, 1});
    CHECK(pc.x(1, 1) == 4.0);
    std::istringstream bad("x1,label\n1,oops\n");
    CHECK_THROWS_AS(read_point_cloud_csv(bad), DataError);

    const std::vector<TripleRecord> recs{{0, 1, 2, 0}, {2, 2, 2, 1}};
    const auto tc = point_cloud_from_triples(recs, 3);
    CHECK(tc.dim() == 9);
    CHECK(tc.y == std::vector<int>{0, 1});
    CHECK(tc.x(0, 0) == 3.0);
    CHECK(tc.x(0, 3) == 2.0);
    CHECK(tc.x(1, 8) == 1.0);

    ApMatrix m;
    m.primes = {2, 3};
    m.rows = {{1, 2}, {0, -1}, {2, 2}};
    m.labels = {"a", "b", "c"};
    m.conductors = {11, 14, 15};
    m.ranks = {2, 0, 2};
    const auto ac = point_cloud_from_ap_matrix(m);
    CHECK(ac.y == std::vector<int>{1, 0, 1});
    CHECK(ac.class_names == std::vector<std::string>{"r0", "r2"});
}

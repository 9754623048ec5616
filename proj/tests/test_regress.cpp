#include <doctest.h>

#include <random>

#include "gazekit/regress.hpp"

using namespace gazekit;

namespace {

std::vector<std::vector<double>> random_points(int n, int d, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> X(n, std::vector<double>(d));
    for (auto& row : X)
        for (double& v : row) v = u(rng);
    return X;
}

// exhaustive-scan reference for kNN
double brute_knn(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                 const std::vector<double>& q, int k) {
    std::vector<std::pair<double, size_t>> d(X.size());
    for (size_t i = 0; i < X.size(); ++i) {
        double s = 0.0;
        for (size_t j = 0; j < q.size(); ++j) s += (X[i][j] - q[j]) * (X[i][j] - q[j]);
        d[i] = {s, i};
    }
    std::sort(d.begin(), d.end());
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += y[d[i].second];
    return sum / k;
}

}  // namespace

TEST_CASE("knn exact interpolation with k=1") {
    auto X = random_points(30, 4, 1);
    std::vector<double> y(30);
    for (int i = 0; i < 30; ++i) y[i] = i * 0.5;
    KnnModel m = fit_knn(X, y, 1);
    for (int i = 0; i < 30; ++i) CHECK(predict_knn(m, X[i]) == y[i]);
}

TEST_CASE("knn averages the k nearest targets") {
    std::vector<std::vector<double>> X = {{0.0}, {1.0}, {2.0}, {50.0}};
    std::vector<double> y = {0.0, 3.0, 6.0, 100.0};
    KnnModel m = fit_knn(X, y, 3);
    CHECK(predict_knn(m, {1.0}) == doctest::Approx(3.0));
}

TEST_CASE("knn matches the exhaustive-scan oracle") {
    auto X = random_points(200, 6, 2);
    std::vector<double> y(200);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (double& v : y) v = u(rng);
    KnnModel m = fit_knn(X, y, 3);
    auto queries = random_points(50, 6, 4);
    for (const auto& q : queries) CHECK(predict_knn(m, q) == brute_knn(X, y, q, 3));
}

TEST_CASE("knn contracts") {
    CHECK_THROWS_AS(fit_knn({}, {}, 3), std::invalid_argument);
    CHECK_THROWS_AS(fit_knn({{1.0}}, {1.0}, 2), std::invalid_argument);
}

TEST_CASE("rf: constant target predicts the constant") {
    auto X = random_points(40, 3, 5);
    std::vector<double> y(40, 7.25);
    RfModel m = fit_rf(X, y, {.n_trees = 20, .seed = 1});
    for (const auto& x : random_points(10, 3, 6)) CHECK(predict_rf(m, x) == doctest::Approx(7.25));
}

TEST_CASE("rf learns y = x1 and beats the mean baseline") {
    auto X = random_points(500, 5, 7);
    std::vector<double> y(500);
    for (int i = 0; i < 500; ++i) y[i] = X[i][0];
    std::vector<std::vector<double>> train(X.begin(), X.begin() + 400);
    std::vector<double> ytrain(y.begin(), y.begin() + 400);
    RfModel m = fit_rf(train, ytrain, {.n_trees = 100, .seed = 11});

    double ymean = std::accumulate(ytrain.begin(), ytrain.end(), 0.0) / ytrain.size();
    double var = 0.0;
    for (double v : y) var += (v - ymean) * (v - ymean);
    double sd = std::sqrt(var / y.size());

    double mae = 0.0, mae_base = 0.0;
    for (int i = 400; i < 500; ++i) {
        mae += std::abs(predict_rf(m, X[i]) - y[i]);
        mae_base += std::abs(ymean - y[i]);
    }
    mae /= 100;
    mae_base /= 100;
    CHECK(mae < 0.15 * sd);
    CHECK(mae <= 0.5 * mae_base);
}

TEST_CASE("rf determinism and tree-mean structure") {
    auto X = random_points(100, 4, 8);
    std::vector<double> y(100);
    for (int i = 0; i < 100; ++i) y[i] = X[i][1] - 2.0 * X[i][3];
    ForestParams p{.n_trees = 25, .seed = 42};
    RfModel a = fit_rf(X, y, p);
    RfModel b = fit_rf(X, y, p);
    auto probes = random_points(20, 4, 9);
    for (const auto& q : probes) {
        CHECK(predict_rf(a, q) == predict_rf(b, q));
        // prediction is the arithmetic mean of per-tree outputs
        double sum = 0.0;
        for (const auto& t : a.trees) sum += t.predict(q);
        CHECK(predict_rf(a, q) == doctest::Approx(sum / a.trees.size()).epsilon(1e-12));
        // and stays inside the training target envelope
        auto [mn, mx] = std::minmax_element(y.begin(), y.end());
        CHECK(predict_rf(a, q) >= *mn - 1e-12);
        CHECK(predict_rf(a, q) <= *mx + 1e-12);
    }
}

TEST_CASE("rf single-tree forest equals its tree") {
    auto X = random_points(60, 3, 10);
    std::vector<double> y(60);
    for (int i = 0; i < 60; ++i) y[i] = X[i][2];
    RfModel m = fit_rf(X, y, {.n_trees = 1, .seed = 3});
    for (const auto& q : random_points(10, 3, 11))
        CHECK(predict_rf(m, q) == m.trees[0].predict(q));
}

TEST_CASE("rf prediction is invariant under tree reordering") {
    auto X = random_points(80, 3, 12);
    std::vector<double> y(80);
    for (int i = 0; i < 80; ++i) y[i] = X[i][0] * X[i][1];
    RfModel m = fit_rf(X, y, {.n_trees = 15, .seed = 5});
    RfModel shuffled = m;
    std::reverse(shuffled.trees.begin(), shuffled.trees.end());
    for (const auto& q : random_points(10, 3, 13))
        CHECK(predict_rf(m, q) == doctest::Approx(predict_rf(shuffled, q)).epsilon(1e-12));
}

TEST_CASE("predict dimension mismatch throws") {
    auto X = random_points(30, 4, 14);
    std::vector<double> y(30, 1.0);
    RfModel m = fit_rf(X, y, {.n_trees = 5, .seed = 1});
    CHECK_THROWS_AS(predict_rf(m, {1.0, 2.0}), std::invalid_argument);
    KnnModel k = fit_knn(X, y, 3);
    CHECK_THROWS_AS(predict_knn(k, {1.0, 2.0}), std::invalid_argument);
}

#ifndef GAZEKIT_REGRESS_HPP
#define GAZEKIT_REGRESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "gazekit/dataset.hpp"
#include "gazekit/eyes.hpp"
#include "gazekit/features.hpp"
#include "gazekit/reduction.hpp"
#include "gazekit/rng.hpp"

namespace gazekit {

enum class RegressorKind { knn, rf };

inline const char* to_string(RegressorKind k) { return k == RegressorKind::knn ? "knn" : "rf"; }
inline RegressorKind regressor_from_string(const std::string& s) {
    if (s == "knn") return RegressorKind::knn;
    if (s == "rf") return RegressorKind::rf;
    throw std::invalid_argument("unknown regressor: " + s);
}

// ---------------------------------------------------------------- kNN

struct KnnModel {
    std::vector<std::vector<double>> points;
    std::vector<double> targets;
    int k = 3;
};

inline KnnModel fit_knn(std::vector<std::vector<double>> X, std::vector<double> y, int k = 3) {
    if (X.empty()) throw std::invalid_argument("fit_knn: empty training set");
    if (X.size() != y.size()) throw std::invalid_argument("fit_knn: X/y size mismatch");
    if (k < 1 || static_cast<size_t>(k) > X.size()) throw std::invalid_argument("fit_knn: bad k");
    return {std::move(X), std::move(y), k};
}

/// Mean target of the k nearest points; distance ties break by training index.
inline double predict_knn(const KnnModel& m, const std::vector<double>& x) {
    const size_t n = m.points.size();
    std::vector<std::pair<double, size_t>> dist(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& p = m.points[i];
        if (p.size() != x.size()) throw std::invalid_argument("predict_knn: dimension mismatch");
        double d2 = 0.0;
        for (size_t j = 0; j < x.size(); ++j) d2 += (p[j] - x[j]) * (p[j] - x[j]);
        dist[i] = {d2, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + m.k, dist.end());
    double sum = 0.0;
    for (int i = 0; i < m.k; ++i) sum += m.targets[dist[i].second];
    return sum / m.k;
}

// ------------------------------------------------------ Random Forest

struct ForestParams {
    int n_trees = 100;
    int mtry = 0;  // 0 -> ceil(d/3)
    int min_leaf = 5;
    double bootstrap_fraction = 1.0;  // with replacement
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;  // leaf mean
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const std::vector<double>& x) const {
        int i = 0;
        while (nodes[i].feature >= 0)
            i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }
};

struct RfModel {
    std::vector<RegressionTree> trees;
    int dim = 0;
    ForestParams params;
};

namespace detail {

struct TreeBuilder {
    const std::vector<std::vector<double>>& X;
    const std::vector<double>& y;
    int dim;
    int mtry;
    int min_leaf;
    std::mt19937_64& rng;
    std::vector<TreeNode> nodes;

    int build(std::vector<int>& idx, int lo, int hi) {
        const int count = hi - lo;
        double sum = 0.0, sum2 = 0.0;
        for (int i = lo; i < hi; ++i) {
            sum += y[idx[i]];
            sum2 += y[idx[i]] * y[idx[i]];
        }
        const double mean = sum / count;
        const double sse = sum2 - sum * sum / count;

        int node = static_cast<int>(nodes.size());
        nodes.push_back({-1, 0.0, -1, -1, mean});
        if (count < 2 * min_leaf || sse <= 1e-12) return node;

        // sample mtry distinct feature indices
        std::vector<int> feats(dim);
        std::iota(feats.begin(), feats.end(), 0);
        for (int i = 0; i < mtry; ++i) {
            std::uniform_int_distribution<int> pick(i, dim - 1);
            std::swap(feats[i], feats[pick(rng)]);
        }

        int best_feat = -1;
        double best_thresh = 0.0, best_gain = 0.0;
        std::vector<std::pair<double, double>> vals(count);  // (feature value, target)
        for (int fi = 0; fi < mtry; ++fi) {
            const int f = feats[fi];
            for (int i = 0; i < count; ++i) vals[i] = {X[idx[lo + i]][f], y[idx[lo + i]]};
            std::sort(vals.begin(), vals.end());
            double lsum = 0.0, lsum2 = 0.0;
            for (int i = 0; i + 1 < count; ++i) {
                lsum += vals[i].second;
                lsum2 += vals[i].second * vals[i].second;
                const int nl = i + 1, nr = count - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                if (vals[i].first == vals[i + 1].first) continue;
                double rsum = sum - lsum, rsum2 = sum2 - lsum2;
                double child_sse = (lsum2 - lsum * lsum / nl) + (rsum2 - rsum * rsum / nr);
                double gain = sse - child_sse;
                if (gain > best_gain + 1e-15) {
                    best_gain = gain;
                    best_feat = f;
                    best_thresh = (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }
        if (best_feat < 0) return node;

        auto mid = std::partition(idx.begin() + lo, idx.begin() + hi,
                                  [&](int i) { return X[i][best_feat] <= best_thresh; });
        int split = static_cast<int>(mid - idx.begin());
        if (split == lo || split == hi) return node;  // numeric edge case
        nodes[node].feature = best_feat;
        nodes[node].threshold = best_thresh;
        nodes[node].left = build(idx, lo, split);
        nodes[node].right = build(idx, split, hi);
        return node;
    }
};

}  // namespace detail

/// CART regression forest: bootstrap per tree, variance-reduction splits
/// over mtry random features, leaf means. Deterministic for a fixed seed.
inline RfModel fit_rf(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                      ForestParams params = {}) {
    const int n = static_cast<int>(X.size());
    if (n == 0 || X.size() != y.size()) throw std::invalid_argument("fit_rf: bad training set");
    if (n < 2 * params.min_leaf && n > 1)
        params.min_leaf = std::max(1, n / 2);
    RfModel model;
    model.dim = static_cast<int>(X[0].size());
    if (params.mtry <= 0) params.mtry = (model.dim + 2) / 3;
    params.mtry = std::clamp(params.mtry, 1, model.dim);
    model.params = params;
    model.trees.reserve(params.n_trees);

    const int boot = std::max(1, static_cast<int>(std::lround(params.bootstrap_fraction * n)));
    for (int t = 0; t < params.n_trees; ++t) {
        std::mt19937_64 rng(derive_seed(params.seed, "tree/" + std::to_string(t)));
        std::vector<int> idx(boot);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int& i : idx) i = pick(rng);
        detail::TreeBuilder builder{X, y, model.dim, params.mtry, params.min_leaf, rng, {}};
        builder.build(idx, 0, boot);
        model.trees.push_back({std::move(builder.nodes)});
    }
    return model;
}

inline double predict_rf(const RfModel& m, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != m.dim) throw std::invalid_argument("predict_rf: dimension mismatch");
    double sum = 0.0;
    for (const auto& t : m.trees) sum += t.predict(x);
    return sum / m.trees.size();
}

// ------------------------------------------------------- gaze model

using AxisRegressor = std::variant<KnnModel, RfModel>;

inline double predict_axis(const AxisRegressor& r, const std::vector<double>& x) {
    if (std::holds_alternative<KnnModel>(r)) return predict_knn(std::get<KnnModel>(r), x);
    return predict_rf(std::get<RfModel>(r), x);
}

/// One usable training/evaluation observation after preprocessing.
struct PreparedSample {
    SampleRecord record;
    EyePair pair;
    EyeGeometryFeature geom{};
    GazePoint label;
};

/// The serializable artifact of training: shared reduction plus one
/// regressor per screen axis.
struct GazeModel {
    ReductionModel reduction;
    AxisRegressor regressor_x;
    AxisRegressor regressor_y;
    Descriptor descriptor = Descriptor::mhog;
    RegressorKind kind = RegressorKind::rf;
    bool augmented = false;
    std::uint64_t fingerprint = 0;
    std::uint64_t seed = 0;
};

struct TrainOptions {
    Descriptor descriptor = Descriptor::mhog;
    RegressorKind kind = RegressorKind::rf;
    ForestParams forest;
    int knn_k = 3;
    bool augmented = false;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<double> to_std(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline std::vector<double> regressor_input(const GazeModel& m, const FeatureVector& f,
                                           const EyeGeometryFeature* geom) {
    Vector x = Eigen::Map<const Vector>(f.values.data(), f.values.size());
    std::vector<double> in = to_std(project(m.reduction, x));
    if (m.augmented) {
        if (!geom) throw std::invalid_argument("predict_gaze: augmented model needs eye geometry");
        in.insert(in.end(), geom->begin(), geom->end());
    }
    return in;
}

}  // namespace detail

/// Fits reduction (35-class grid labels) and the two axis regressors on
/// prepared samples. With augmented=true the 10 eye-geometry values are
/// appended to the reduced vector before regression.
inline GazeModel train_gaze(const std::vector<PreparedSample>& samples, const ScreenGeometry& geom,
                            const TrainOptions& opts) {
    if (samples.empty()) throw std::invalid_argument("train_gaze: no samples");
    const size_t dim = feature_length(opts.descriptor);
    Matrix X(samples.size(), dim);
    std::vector<int> labels(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        FeatureVector f = extract(samples[i].pair, opts.descriptor);
        X.row(i) = Eigen::Map<const Vector>(f.values.data(), f.values.size());
        labels[i] = samples[i].record.grid.label(geom);
    }

    GazeModel model;
    model.descriptor = opts.descriptor;
    model.kind = opts.kind;
    model.augmented = opts.augmented;
    model.seed = opts.seed;
    model.reduction = fit_reduction(X, labels);

    Matrix Z = (X.rowwise() - model.reduction.pca_mean.transpose()) * model.reduction.pca_basis *
               model.reduction.lda_basis;
    std::vector<std::vector<double>> inputs(samples.size());
    std::vector<double> yx(samples.size()), yy(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        inputs[i] = detail::to_std(Z.row(i).transpose());
        if (opts.augmented)
            inputs[i].insert(inputs[i].end(), samples[i].geom.begin(), samples[i].geom.end());
        yx[i] = samples[i].label.x_cm;
        yy[i] = samples[i].label.y_cm;
    }

    if (opts.kind == RegressorKind::knn) {
        model.regressor_x = fit_knn(inputs, yx, opts.knn_k);
        model.regressor_y = fit_knn(std::move(inputs), std::move(yy), opts.knn_k);
    } else {
        ForestParams px = opts.forest;
        px.seed = derive_seed(opts.seed, "rf/x");
        ForestParams py = opts.forest;
        py.seed = derive_seed(opts.seed, "rf/y");
        model.regressor_x = fit_rf(inputs, yx, px);
        model.regressor_y = fit_rf(inputs, yy, py);
    }
    model.fingerprint = derive_seed(opts.seed, std::string("model/") + to_string(opts.descriptor) +
                                                   "/" + to_string(opts.kind) +
                                                   (opts.augmented ? "/aug" : "") + "/n" +
                                                   std::to_string(samples.size()));
    return model;
}

/// Raw (unclamped) prediction for one eye pair.
inline GazePoint predict_gaze(const GazeModel& model, const EyePair& pair,
                              const EyeGeometryFeature* geom = nullptr) {
    FeatureVector f = extract(pair, model.descriptor);
    std::vector<double> in = detail::regressor_input(model, f, geom);
    return {predict_axis(model.regressor_x, in), predict_axis(model.regressor_y, in)};
}

}  // namespace gazekit

#endif

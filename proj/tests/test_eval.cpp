#include <doctest.h>

#include <set>

#include "gazekit/eval.hpp"
#include "gazekit/pipeline.hpp"
#include "gazekit/synth.hpp"

using namespace gazekit;

namespace {

// shared small corpora so the protocol tests stay fast
const std::vector<PreparedSample>& eval_samples() {
    static const std::vector<PreparedSample> samples = [] {
        SynthParams p;
        p.n_subjects = 4;
        p.frames_per_point = 2;
        p.seed = 21;
        return prepare_samples(synth_generate(p));
    }();
    return samples;
}

PipelineConfig fast_config(Descriptor d = Descriptor::mhog, RegressorKind k = RegressorKind::rf) {
    PipelineConfig cfg;
    cfg.train.descriptor = d;
    cfg.train.kind = k;
    cfg.train.forest.n_trees = 25;
    cfg.seed = 9;
    return cfg;
}

}  // namespace

TEST_CASE("euclid_error basics") {
    CHECK(euclid_error({3.0, 4.0}, {3.0, 4.0}) == 0.0);
    CHECK(euclid_error({3.0, 4.0}, {0.0, 0.0}) == doctest::Approx(5.0));
    GazePoint a{1.2, 8.1}, b{-0.5, 2.0};
    CHECK(euclid_error(a, b) == doctest::Approx(euclid_error(b, a)));
}

TEST_CASE("angular_error") {
    CHECK(angular_error(0.0, 40.0) == doctest::Approx(0.0));
    CHECK(angular_error(3.17, 30.0) == doctest::Approx(6.03).epsilon(0.002));
    CHECK(angular_error(3.17, 50.0) == doctest::Approx(3.63).epsilon(0.002));
    CHECK_THROWS_AS(angular_error(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("loso_cv fold structure") {
    auto rep = loso_cv(eval_samples(), ScreenGeometry{}, fast_config());
    CHECK(rep.sample_count == static_cast<int>(eval_samples().size()));
    CHECK(rep.per_subject.size() == 4);
    // per-image aggregation consistency: sample-weighted subject means
    std::map<std::string, int> counts;
    for (const auto& e : rep.samples) counts[e.subject_id] += 1;
    double weighted = 0.0;
    for (const auto& [subj, me] : rep.per_subject) weighted += me * counts[subj];
    CHECK(rep.mean_error_cm == doctest::Approx(weighted / rep.sample_count).epsilon(1e-9));
    // component inequalities
    CHECK(rep.mae_x_cm <= rep.mean_error_cm + 1e-12);
    CHECK(rep.mae_y_cm <= rep.mean_error_cm + 1e-12);
    CHECK(rep.mean_error_cm <= rep.mae_x_cm + rep.mae_y_cm + 1e-12);
    CHECK_THROWS_AS(loso_cv({}, ScreenGeometry{}, fast_config()), std::invalid_argument);
}

TEST_CASE("loso_cv is reproducible under a fixed seed") {
    auto a = loso_cv(eval_samples(), ScreenGeometry{}, fast_config());
    auto b = loso_cv(eval_samples(), ScreenGeometry{}, fast_config());
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i)
        CHECK(a.samples[i].error_cm == b.samples[i].error_cm);
}

TEST_CASE("loso_session_cv structure and person-dependent advantage") {
    SynthParams p;
    p.n_subjects = 3;
    p.sessions_per_subject = 2;
    p.frames_per_point = 2;
    p.seed = 33;
    auto samples = prepare_samples(synth_generate(p));
    PipelineConfig cfg = fast_config();

    std::vector<std::string> skipped;
    auto pd = loso_session_cv(samples, ScreenGeometry{}, cfg, &skipped);
    CHECK(skipped.empty());
    CHECK(pd.sample_count == static_cast<int>(samples.size()));

    auto pi = loso_cv(samples, ScreenGeometry{}, cfg);
    CHECK(pd.mean_error_cm <= pi.mean_error_cm);

    // single-session subjects are skipped with a warning
    SynthParams q = p;
    q.sessions_per_subject = 1;
    auto single = prepare_samples(synth_generate(q));
    std::vector<std::string> skipped2;
    auto rep2 = loso_session_cv(single, ScreenGeometry{}, cfg, &skipped2);
    CHECK(skipped2.size() == 3);
    CHECK(rep2.sample_count == 0);
}

TEST_CASE("sweep covers all cells deterministically") {
    // restricted sweep to keep runtime sensible; full 5x2 runs in acceptance
    auto table = sweep(eval_samples(), ScreenGeometry{}, fast_config(),
                       {Descriptor::intensity, Descriptor::mhog},
                       {RegressorKind::knn, RegressorKind::rf});
    CHECK(table.size() == 4);
    auto again = sweep(eval_samples(), ScreenGeometry{}, fast_config(),
                       {Descriptor::mhog, Descriptor::intensity},
                       {RegressorKind::rf, RegressorKind::knn});
    for (const auto& [key, rep] : table)
        CHECK(rep.mean_error_cm == again.at(key).mean_error_cm);
}

TEST_CASE("size_study: K = subject count reduces to plain LOSO") {
    PipelineConfig cfg = fast_config();
    auto curve = size_study(eval_samples(), ScreenGeometry{}, cfg, {4}, 5);
    REQUIRE(curve.size() == 1);
    auto loso = loso_cv(eval_samples(), ScreenGeometry{}, cfg);
    CHECK(curve[0].mean_error_cm == doctest::Approx(loso.mean_error_cm).epsilon(1e-12));

    auto c2 = size_study(eval_samples(), ScreenGeometry{}, cfg, {2, 4}, 2);
    auto c3 = size_study(eval_samples(), ScreenGeometry{}, cfg, {2, 4}, 2);
    for (size_t i = 0; i < c2.size(); ++i) CHECK(c2[i].mean_error_cm == c3[i].mean_error_cm);
    CHECK_THROWS_AS(size_study(eval_samples(), ScreenGeometry{}, cfg, {1}, 2),
                    std::invalid_argument);
}

TEST_CASE("partition_experiments: E2 regroups the plain LOSO errors exactly") {
    PipelineConfig cfg = fast_config();
    auto res = partition_experiments(eval_samples(), ScreenGeometry{}, cfg, GroupFactor::glasses, 2);
    auto loso = loso_cv(eval_samples(), ScreenGeometry{}, cfg);
    // same folds: the grouped errors are a partition of the LOSO per-image errors
    double total = 0.0;
    int count = 0;
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& e : loso.samples) {
        std::string g = e.glasses ? "glasses" : "no_glasses";
        acc[g].first += e.error_cm;
        acc[g].second += 1;
        total += e.error_cm;
        ++count;
    }
    for (const auto& [name, a] : acc)
        CHECK(res.e2.at(name) == doctest::Approx(a.first / a.second).epsilon(1e-12));
    CHECK(res.e2_full.mean_error_cm == doctest::Approx(total / count).epsilon(1e-12));
}

TEST_CASE("partition_experiments: planted glare raises the noisy group's E1 error") {
    SynthParams p;
    p.n_subjects = 4;
    p.frames_per_point = 2;
    p.seed = 55;
    p.glare_strength = 1.0;  // glasses-wearing subjects get glare blobs
    auto samples = prepare_samples(synth_generate(p));
    PipelineConfig cfg = fast_config();
    auto res = partition_experiments(samples, ScreenGeometry{}, cfg, GroupFactor::glasses, 2);
    REQUIRE(res.e1.count("glasses"));
    REQUIRE(res.e1.count("no_glasses"));
    CHECK(res.e1.at("glasses") > res.e1.at("no_glasses"));
}

TEST_CASE("partition_experiments skips groups with fewer than 2 subjects") {
    // race factor: with 4 subjects the 'other' group has one subject
    PipelineConfig cfg = fast_config();
    auto res = partition_experiments(eval_samples(), ScreenGeometry{}, cfg, GroupFactor::race, 1);
    for (const auto& g : res.skipped_groups) CHECK(res.e1.count(g) == 0);
}

TEST_CASE("center baseline expected error") {
    ScreenGeometry geom;
    double me = center_baseline_error(geom);
    // hand check: mean over the 35 grid offsets from (11.31, 7.07)
    double sum = 0.0;
    for (int r = -2; r <= 2; ++r)
        for (int c = -3; c <= 3; ++c) sum += std::hypot(c * geom.dx_cm, r * geom.dy_cm);
    CHECK(me == doctest::Approx(sum / 35.0).epsilon(1e-12));
}

#ifndef GAZEKIT_EVAL_HPP
#define GAZEKIT_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gazekit/regress.hpp"
#include "gazekit/rng.hpp"

namespace gazekit {

inline double euclid_error(const GazePoint& pred, const GazePoint& truth) {
    return std::hypot(pred.x_cm - truth.x_cm, pred.y_cm - truth.y_cm);
}

/// On-screen distance error to visual angle, for a given viewing distance.
inline double angular_error(double e_cm, double d_cm) {
    if (d_cm <= 0) throw std::invalid_argument("angular_error: distance must be positive");
    return std::atan(e_cm / d_cm) * 180.0 / M_PI;
}

struct SampleError {
    std::string subject_id;
    std::string session_id;
    Posture posture = Posture::sitting;
    bool glasses = false;
    Race race = Race::other;
    double error_cm = 0.0;
    double abs_dx_cm = 0.0;
    double abs_dy_cm = 0.0;
};

struct ErrorReport {
    double mean_error_cm = 0.0;
    double std_error_cm = 0.0;
    double mae_x_cm = 0.0;
    double mae_y_cm = 0.0;
    std::map<std::string, double> per_subject;  // subject -> mean error
    int sample_count = 0;
    std::uint64_t fingerprint = 0;
    std::vector<SampleError> samples;  // per-image errors, aggregation source
};

inline ErrorReport aggregate_errors(std::vector<SampleError> samples, std::uint64_t fingerprint) {
    ErrorReport rep;
    rep.samples = std::move(samples);
    rep.fingerprint = fingerprint;
    rep.sample_count = static_cast<int>(rep.samples.size());
    if (rep.samples.empty()) return rep;
    std::map<std::string, std::pair<double, int>> per_subj;
    double sum = 0.0, sum2 = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& s : rep.samples) {
        sum += s.error_cm;
        sum2 += s.error_cm * s.error_cm;
        sx += s.abs_dx_cm;
        sy += s.abs_dy_cm;
        auto& acc = per_subj[s.subject_id];
        acc.first += s.error_cm;
        acc.second += 1;
    }
    const int n = rep.sample_count;
    rep.mean_error_cm = sum / n;
    rep.mae_x_cm = sx / n;
    rep.mae_y_cm = sy / n;
    double var = sum2 / n - rep.mean_error_cm * rep.mean_error_cm;
    rep.std_error_cm = std::sqrt(std::max(0.0, var));
    for (const auto& [subj, acc] : per_subj) rep.per_subject[subj] = acc.first / acc.second;
    return rep;
}

struct PipelineConfig {
    TrainOptions train;
    std::uint64_t seed = 0;

    std::uint64_t fingerprint(size_t n_samples) const {
        std::string key = std::string("pipeline/") + to_string(train.descriptor) + "/" +
                          to_string(train.kind) + "/" + (train.augmented ? "aug" : "plain") + "/t" +
                          std::to_string(train.forest.n_trees) + "/n" + std::to_string(n_samples);
        return derive_seed(seed, key);
    }
};

namespace detail {

inline std::vector<SampleError> eval_fold(const std::vector<PreparedSample>& train_set,
                                          const std::vector<PreparedSample>& test_set,
                                          const ScreenGeometry& geom, const PipelineConfig& cfg) {
    TrainOptions opts = cfg.train;
    opts.seed = derive_seed(cfg.seed, "fold");
    GazeModel model = train_gaze(train_set, geom, opts);
    std::vector<SampleError> errors;
    errors.reserve(test_set.size());
    for (const auto& s : test_set) {
        GazePoint pred = predict_gaze(model, s.pair, opts.augmented ? &s.geom : nullptr);
        SampleError e;
        e.subject_id = s.record.subject_id;
        e.session_id = s.record.session_id;
        e.posture = s.record.posture;
        e.glasses = s.record.glasses;
        e.race = s.record.race;
        e.error_cm = euclid_error(pred, s.label);
        e.abs_dx_cm = std::abs(pred.x_cm - s.label.x_cm);
        e.abs_dy_cm = std::abs(pred.y_cm - s.label.y_cm);
        errors.push_back(std::move(e));
    }
    return errors;
}

inline std::vector<std::string> subjects_of(const std::vector<PreparedSample>& samples) {
    std::vector<std::string> ids;
    for (const auto& s : samples)
        if (std::find(ids.begin(), ids.end(), s.record.subject_id) == ids.end())
            ids.push_back(s.record.subject_id);
    return ids;
}

}  // namespace detail

/// Person-independent protocol: each subject is held out once; errors
/// are aggregated over all test images.
inline ErrorReport loso_cv(const std::vector<PreparedSample>& samples, const ScreenGeometry& geom,
                           const PipelineConfig& cfg) {
    auto subjects = detail::subjects_of(samples);
    if (subjects.size() < 2) throw std::invalid_argument("loso_cv: need at least 2 subjects");
    std::vector<SampleError> all;
    for (const auto& held : subjects) {
        std::vector<PreparedSample> train_set, test_set;
        for (const auto& s : samples)
            (s.record.subject_id == held ? test_set : train_set).push_back(s);
        auto fold = detail::eval_fold(train_set, test_set, geom, cfg);
        all.insert(all.end(), fold.begin(), fold.end());
    }
    return aggregate_errors(std::move(all), cfg.fingerprint(samples.size()));
}

/// Person-dependent protocol: per subject, leave one session out.
/// Subjects with a single session are skipped (reported via skipped_subjects).
inline ErrorReport loso_session_cv(const std::vector<PreparedSample>& samples,
                                   const ScreenGeometry& geom, const PipelineConfig& cfg,
                                   std::vector<std::string>* skipped_subjects = nullptr) {
    auto subjects = detail::subjects_of(samples);
    std::vector<SampleError> all;
    for (const auto& subj : subjects) {
        std::vector<PreparedSample> own;
        std::set<std::string> sessions;
        for (const auto& s : samples)
            if (s.record.subject_id == subj) {
                own.push_back(s);
                sessions.insert(s.record.session_id);
            }
        if (sessions.size() < 2) {
            if (skipped_subjects) skipped_subjects->push_back(subj);
            continue;
        }
        for (const auto& held : sessions) {
            std::vector<PreparedSample> train_set, test_set;
            for (const auto& s : own)
                (s.record.session_id == held ? test_set : train_set).push_back(s);
            auto fold = detail::eval_fold(train_set, test_set, geom, cfg);
            all.insert(all.end(), fold.begin(), fold.end());
        }
    }
    return aggregate_errors(std::move(all), cfg.fingerprint(samples.size()));
}

/// Descriptor x regressor LOSO sweep (the Table-3 style comparison).
inline std::map<std::pair<Descriptor, RegressorKind>, ErrorReport> sweep(
    const std::vector<PreparedSample>& samples, const ScreenGeometry& geom,
    const PipelineConfig& base,
    const std::vector<Descriptor>& descriptors = {Descriptor::intensity, Descriptor::log,
                                                  Descriptor::lbp, Descriptor::hog,
                                                  Descriptor::mhog},
    const std::vector<RegressorKind>& regressors = {RegressorKind::knn, RegressorKind::rf}) {
    std::map<std::pair<Descriptor, RegressorKind>, ErrorReport> table;
    for (Descriptor d : descriptors) {
        for (RegressorKind k : regressors) {
            PipelineConfig cfg = base;
            cfg.train.descriptor = d;
            cfg.train.kind = k;
            table[{d, k}] = loso_cv(samples, geom, cfg);
        }
    }
    return table;
}

struct SizeStudyPoint {
    int k_subjects = 0;
    double mean_error_cm = 0.0;
};

/// Training-size study: for each K, average LOSO ME over `repeats`
/// random K-subject groups.
inline std::vector<SizeStudyPoint> size_study(const std::vector<PreparedSample>& samples,
                                              const ScreenGeometry& geom, const PipelineConfig& cfg,
                                              const std::vector<int>& sizes, int repeats = 5) {
    auto subjects = detail::subjects_of(samples);
    std::vector<SizeStudyPoint> curve;
    for (int k : sizes) {
        if (k < 2 || k > static_cast<int>(subjects.size()))
            throw std::invalid_argument("size_study: K out of range");
        double sum = 0.0;
        int effective_repeats = k == static_cast<int>(subjects.size()) ? 1 : repeats;
        for (int r = 0; r < effective_repeats; ++r) {
            auto rng = make_rng(cfg.seed, "size/" + std::to_string(k) + "/" + std::to_string(r));
            std::vector<std::string> pool = subjects;
            std::shuffle(pool.begin(), pool.end(), rng);
            std::set<std::string> chosen(pool.begin(), pool.begin() + k);
            std::vector<PreparedSample> subset;
            for (const auto& s : samples)
                if (chosen.count(s.record.subject_id)) subset.push_back(s);
            sum += loso_cv(subset, geom, cfg).mean_error_cm;
        }
        curve.push_back({k, sum / effective_repeats});
    }
    return curve;
}

enum class GroupFactor { glasses, race, posture };

inline const char* to_string(GroupFactor f) {
    switch (f) {
        case GroupFactor::glasses: return "glasses";
        case GroupFactor::race: return "race";
        default: return "posture";
    }
}
inline GroupFactor factor_from_string(const std::string& s) {
    if (s == "glasses") return GroupFactor::glasses;
    if (s == "race") return GroupFactor::race;
    if (s == "posture") return GroupFactor::posture;
    throw std::invalid_argument("unknown factor: " + s);
}

inline std::string group_of(const SampleRecord& r, GroupFactor f) {
    switch (f) {
        case GroupFactor::glasses: return r.glasses ? "glasses" : "no_glasses";
        case GroupFactor::race: return to_string(r.race);
        default: return to_string(r.posture);
    }
}

struct PartitionResult {
    // group name -> ME for each experiment
    std::map<std::string, double> e1;  // separate training per group, sizes equalized
    std::map<std::string, double> e2;  // plain LOSO, errors split per group
    std::map<std::string, double> e3;  // mixed half-and-half training
    ErrorReport e2_full;               // the underlying LOSO report for E2
    std::vector<std::string> skipped_groups;
};

/// The three-experiment group-factor design: per-group training (E1),
/// pooled training with per-group error split (E2), and mixed-group
/// training at matched size (E3). Unequal groups are subsampled to the
/// smallest subject count, averaged over `repeats` draws.
inline PartitionResult partition_experiments(const std::vector<PreparedSample>& samples,
                                             const ScreenGeometry& geom, const PipelineConfig& cfg,
                                             GroupFactor factor, int repeats = 5) {
    if (repeats < 1) throw std::invalid_argument("partition_experiments: repeats must be >= 1");
    PartitionResult res;

    std::map<std::string, std::vector<PreparedSample>> groups;
    for (const auto& s : samples) groups[group_of(s.record, factor)].push_back(s);

    std::map<std::string, std::vector<std::string>> group_subjects;
    size_t min_subjects = samples.size();
    for (auto& [name, list] : groups) {
        auto subj = detail::subjects_of(list);
        if (subj.size() < 2) {
            res.skipped_groups.push_back(name);
            continue;
        }
        group_subjects[name] = subj;
        min_subjects = std::min(min_subjects, subj.size());
    }
    for (const auto& name : res.skipped_groups) groups.erase(name);
    if (groups.empty()) return res;
    const int n_eq = static_cast<int>(min_subjects);

    auto filter_subjects = [](const std::vector<PreparedSample>& list,
                              const std::set<std::string>& keep) {
        std::vector<PreparedSample> out;
        for (const auto& s : list)
            if (keep.count(s.record.subject_id)) out.push_back(s);
        return out;
    };

    // E1: per-group LOSO with subject counts equalized to the smallest group
    for (const auto& [name, list] : groups) {
        const auto& subj = group_subjects[name];
        int eff = static_cast<int>(subj.size()) == n_eq ? 1 : repeats;
        double sum = 0.0;
        for (int r = 0; r < eff; ++r) {
            auto rng = make_rng(cfg.seed, "e1/" + name + "/" + std::to_string(r));
            std::vector<std::string> pool = subj;
            std::shuffle(pool.begin(), pool.end(), rng);
            std::set<std::string> chosen(pool.begin(), pool.begin() + n_eq);
            sum += loso_cv(filter_subjects(list, chosen), geom, cfg).mean_error_cm;
        }
        res.e1[name] = sum / eff;
    }

    // E2: one pooled LOSO, per-image errors regrouped
    res.e2_full = loso_cv(samples, geom, cfg);
    {
        std::map<std::string, std::pair<double, int>> acc;
        for (const auto& e : res.e2_full.samples) {
            SampleRecord probe;
            probe.glasses = e.glasses;
            probe.race = e.race;
            probe.posture = e.posture;
            auto& a = acc[group_of(probe, factor)];
            a.first += e.error_cm;
            a.second += 1;
        }
        for (const auto& [name, a] : acc)
            if (groups.count(name)) res.e2[name] = a.first / a.second;
    }

    // E3: combine half of each group's subjects, LOSO, split per group;
    // degenerate when the halves cannot supply two subjects total
    const int half = std::max(1, n_eq / 2);
    std::map<std::string, std::pair<double, int>> e3_acc;
    const int e3_repeats = half * static_cast<int>(groups.size()) >= 2 ? repeats : 0;
    for (int r = 0; r < e3_repeats; ++r) {
        std::vector<PreparedSample> combined;
        for (const auto& [name, list] : groups) {
            auto rng = make_rng(cfg.seed, "e3/" + name + "/" + std::to_string(r));
            std::vector<std::string> pool = group_subjects[name];
            std::shuffle(pool.begin(), pool.end(), rng);
            std::set<std::string> chosen(pool.begin(), pool.begin() + half);
            auto part = filter_subjects(list, chosen);
            combined.insert(combined.end(), part.begin(), part.end());
        }
        ErrorReport rep = loso_cv(combined, geom, cfg);
        for (const auto& e : rep.samples) {
            SampleRecord probe;
            probe.glasses = e.glasses;
            probe.race = e.race;
            probe.posture = e.posture;
            auto& a = e3_acc[group_of(probe, factor)];
            a.first += e.error_cm;
            a.second += 1;
        }
    }
    for (const auto& [name, a] : e3_acc)
        if (groups.count(name)) res.e3[name] = a.first / a.second;

    return res;
}

/// Expected error of the always-predict-screen-center baseline, computed
/// in closed form from the grid geometry.
inline double center_baseline_error(const ScreenGeometry& geom) {
    GazePoint center{geom.width_cm / 2.0, geom.height_cm / 2.0};
    double sum = 0.0;
    for (int r = 0; r < geom.grid_rows; ++r)
        for (int c = 0; c < geom.grid_cols; ++c)
            sum += euclid_error(grid_to_screen({r, c}, geom), center);
    return sum / (geom.grid_rows * geom.grid_cols);
}

}  // namespace gazekit

#endif

// gazekit: batch front-end for the gaze-estimation pipeline.
// Subcommands: synth, ingest, extract, train, eval, track, report.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gazekit/gazekit.hpp"

namespace fs = std::filesystem;
using gazekit::Json;

namespace {

struct RunConfig {
    std::string command;
    std::string corpus;
    std::string descriptor = "mhog";
    std::string regressor = "rf";
    std::string protocol = "loso";
    std::string factor = "glasses";
    std::uint64_t seed = 0;
    std::string out = "out";
    bool augmented = false;
    bool clamp = false;
    int jobs = 1;
    int trees = 100;
    int repeats = 5;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << text;
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

/// Every command drops a run manifest next to its outputs: the full
/// config, derived fingerprint, inputs and produced files. No
/// timestamps, so identical configs give identical manifests.
void write_run_manifest(const fs::path& dir, const RunConfig& cfg, std::uint64_t fingerprint,
                        const std::vector<std::string>& inputs,
                        const std::vector<std::string>& outputs) {
    Json j;
    j["command"] = cfg.command;
    j["config"] = {{"corpus", cfg.corpus},   {"feature", cfg.descriptor},
                   {"regressor", cfg.regressor}, {"protocol", cfg.protocol},
                   {"factor", cfg.factor},   {"seed", cfg.seed},
                   {"augmented", cfg.augmented}, {"clamp", cfg.clamp},
                   {"trees", cfg.trees},     {"repeats", cfg.repeats}};
    j["fingerprint"] = fingerprint;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    write_text(dir / "run.json", j.dump(2) + "\n");
}

template <typename F>
void parallel_for(int n, int jobs, F&& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::exception_ptr first_error;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// `--corpus` takes a directory with manifest.csv + boxes.csv. The name
/// "ricetabletgaze" resolves through GAZEKIT_RICE_DIR for runs against
/// the real recordings (see README for the expected layout).
fs::path resolve_corpus(const std::string& corpus) {
    if (corpus == "ricetabletgaze") {
        const char* env = std::getenv("GAZEKIT_RICE_DIR");
        if (!env)
            throw std::runtime_error(
                "corpus 'ricetabletgaze' requires GAZEKIT_RICE_DIR to point at the dataset "
                "directory (manifest.csv + boxes.csv + frames/)");
        return fs::path(env);
    }
    return fs::path(corpus);
}

std::vector<gazekit::PreparedSample> load_prepared(const std::string& corpus,
                                                   gazekit::PrepareStats* stats = nullptr) {
    fs::path dir = resolve_corpus(corpus);
    gazekit::Corpus c = gazekit::load_manifest((dir / "manifest.csv").string());
    return gazekit::prepare_samples(c, (dir / "boxes.csv").string(), stats);
}

gazekit::PipelineConfig pipeline_config(const RunConfig& cfg) {
    gazekit::PipelineConfig pc;
    pc.train.descriptor = gazekit::descriptor_from_string(cfg.descriptor);
    pc.train.kind = gazekit::regressor_from_string(cfg.regressor);
    pc.train.forest.n_trees = cfg.trees;
    pc.train.augmented = cfg.augmented;
    pc.seed = cfg.seed;
    return pc;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

// ---------------------------------------------------------------- synth

int cmd_synth(const RunConfig& cfg, int subjects, int sessions, int frames_per_point,
              double glare) {
    gazekit::SynthParams p;
    p.n_subjects = subjects;
    p.sessions_per_subject = sessions;
    p.frames_per_point = frames_per_point;
    p.seed = cfg.seed;
    p.glare_strength = glare;
    gazekit::SynthCorpus synth = gazekit::synth_generate(p);
    fs::path dir = ensure_out_dir(cfg.out);
    gazekit::materialize(synth, dir.string());
    std::uint64_t fp = gazekit::derive_seed(
        cfg.seed, "synth/" + std::to_string(subjects) + "/" + std::to_string(sessions) + "/" +
                      std::to_string(frames_per_point));
    write_run_manifest(dir, cfg, fp, {},
                       {"manifest.csv", "boxes.csv", "frames/"});
    Json j;
    j["subjects"] = subjects;
    j["records"] = synth.corpus.records.size();
    j["out"] = dir.string();
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- ingest

int cmd_ingest(const RunConfig& cfg) {
    fs::path src = resolve_corpus(cfg.corpus);
    gazekit::Corpus corpus = gazekit::load_manifest((src / "manifest.csv").string());
    corpus.validate();
    gazekit::PrepareStats stats;
    auto samples = gazekit::prepare_samples(corpus, (src / "boxes.csv").string(), &stats);
    fs::path dir = ensure_out_dir(cfg.out);
    Json j;
    j["records"] = stats.total;
    j["prepared"] = samples.size();
    j["detection_failures"] = stats.detection_failures;
    j["blink_skipped"] = stats.blink_skipped;
    std::set<std::string> subjects;
    for (const auto& s : samples) subjects.insert(s.record.subject_id);
    j["subjects"] = subjects.size();
    write_text(dir / "ingest.json", j.dump(2) + "\n");
    write_run_manifest(dir, cfg, gazekit::derive_seed(cfg.seed, "ingest/" + cfg.corpus),
                       {(src / "manifest.csv").string(), (src / "boxes.csv").string()},
                       {"ingest.json"});
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- extract

int cmd_extract(const RunConfig& cfg) {
    fs::path src = resolve_corpus(cfg.corpus);
    gazekit::Descriptor d = gazekit::descriptor_from_string(cfg.descriptor);
    fs::path dir = ensure_out_dir(cfg.out);
    fs::path out_file = dir / "features.bin";

    // cache key: manifest bytes + descriptor, cache dir from GAZEKIT_CACHE
    std::uint64_t key = 0;
    const char* cache_env = std::getenv("GAZEKIT_CACHE");
    fs::path cached;
    {
        std::ifstream m(src / "manifest.csv", std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(m)), std::istreambuf_iterator<char>());
        key = gazekit::derive_seed(gazekit::fnv1a(bytes), std::string("features/") + cfg.descriptor);
    }
    if (cache_env) {
        cached = fs::path(cache_env) / (hex64(key) + ".feat");
        if (fs::exists(cached)) {
            fs::copy_file(cached, out_file, fs::copy_options::overwrite_existing);
            write_run_manifest(dir, cfg, key, {(src / "manifest.csv").string()},
                               {"features.bin"});
            Json j;
            j["cached"] = true;
            j["out"] = out_file.string();
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    }

    auto samples = load_prepared(cfg.corpus);
    gazekit::FeatureDump dump;
    dump.descriptor = d;
    dump.length = gazekit::feature_length(d);
    if (samples.empty()) throw std::runtime_error("extract: corpus produced no usable samples");
    dump.per_eye_len = gazekit::extract(samples[0].pair, d).per_eye_len;
    dump.rows.resize(samples.size());
    parallel_for(static_cast<int>(samples.size()), cfg.jobs, [&](int i) {
        gazekit::FeatureVector f = gazekit::extract(samples[i].pair, d);
        dump.rows[i].assign(f.values.begin(), f.values.end());
    });
    gazekit::save_features(dump, out_file.string());
    if (cache_env) {
        fs::create_directories(cached.parent_path());
        fs::copy_file(out_file, cached, fs::copy_options::overwrite_existing);
    }
    write_run_manifest(dir, cfg, key, {(src / "manifest.csv").string()}, {"features.bin"});
    Json j;
    j["cached"] = false;
    j["rows"] = dump.rows.size();
    j["length"] = dump.length;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- train

int cmd_train(const RunConfig& cfg) {
    auto samples = load_prepared(cfg.corpus);
    gazekit::PipelineConfig pc = pipeline_config(cfg);
    gazekit::TrainOptions opts = pc.train;
    opts.seed = cfg.seed;
    gazekit::GazeModel model = gazekit::train_gaze(samples, gazekit::ScreenGeometry{}, opts);
    fs::path dir = ensure_out_dir(cfg.out);
    fs::path model_path = dir / "model.gzm";
    gazekit::save_model(model, model_path.string());
    write_run_manifest(dir, cfg, model.fingerprint, {cfg.corpus}, {"model.gzm"});
    Json j;
    j["model"] = model_path.string();
    j["samples"] = samples.size();
    j["fingerprint"] = model.fingerprint;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- eval

Json summary_json(const gazekit::ErrorReport& rep, const RunConfig& cfg) {
    Json j = gazekit::report_to_json(rep);
    j["protocol"] = cfg.protocol;
    j["feature"] = cfg.descriptor;
    j["regressor"] = cfg.regressor;
    j["seed"] = cfg.seed;
    return j;
}

int cmd_eval(const RunConfig& cfg, const std::vector<int>& sizes) {
    auto samples = load_prepared(cfg.corpus);
    gazekit::PipelineConfig pc = pipeline_config(cfg);
    gazekit::ScreenGeometry geom;
    fs::path dir = ensure_out_dir(cfg.out);
    std::vector<std::string> outputs;
    Json summary;

    if (cfg.protocol == "loso" || cfg.protocol == "session") {
        gazekit::ErrorReport rep;
        std::vector<std::string> skipped;
        if (cfg.protocol == "loso")
            rep = gazekit::loso_cv(samples, geom, pc);
        else
            rep = gazekit::loso_session_cv(samples, geom, pc, &skipped);
        summary = summary_json(rep, cfg);
        if (!skipped.empty()) summary["skipped_subjects"] = skipped;
        gazekit::write_errors_csv(rep, (dir / "errors.csv").string());
        outputs = {"summary.json", "errors.csv"};
        std::vector<std::pair<std::string, double>> bars;
        for (const auto& [subj, me] : rep.per_subject) bars.emplace_back(subj, me);
        gazekit::write_bar_chart_svg(bars, "per-subject mean error (cm)",
                                     (dir / "per_subject.svg").string());
        outputs.push_back("per_subject.svg");
        write_run_manifest(dir, cfg, rep.fingerprint, {cfg.corpus}, outputs);
    } else if (cfg.protocol == "sweep") {
        const std::vector<gazekit::Descriptor> descs = {
            gazekit::Descriptor::intensity, gazekit::Descriptor::log, gazekit::Descriptor::lbp,
            gazekit::Descriptor::hog, gazekit::Descriptor::mhog};
        const std::vector<gazekit::RegressorKind> kinds = {gazekit::RegressorKind::knn,
                                                           gazekit::RegressorKind::rf};
        std::map<std::pair<gazekit::Descriptor, gazekit::RegressorKind>, gazekit::ErrorReport>
            table;
        std::vector<std::pair<gazekit::Descriptor, gazekit::RegressorKind>> cells;
        for (auto d : descs)
            for (auto k : kinds) cells.emplace_back(d, k);
        std::mutex table_mutex;
        parallel_for(static_cast<int>(cells.size()), cfg.jobs, [&](int i) {
            gazekit::PipelineConfig cell = pc;
            cell.train.descriptor = cells[i].first;
            cell.train.kind = cells[i].second;
            gazekit::ErrorReport rep = gazekit::loso_cv(samples, geom, cell);
            std::lock_guard<std::mutex> lock(table_mutex);
            table[cells[i]] = std::move(rep);
        });
        // regressor rows x feature columns
        std::ostringstream csv;
        csv << "regressor";
        for (auto d : descs) csv << ',' << gazekit::to_string(d);
        csv << "\n";
        for (auto k : kinds) {
            csv << gazekit::to_string(k);
            for (auto d : descs)
                csv << ',' << std::fixed << std::setprecision(4)
                    << table.at({d, k}).mean_error_cm;
            csv << "\n";
        }
        write_text(dir / "sweep.csv", csv.str());
        std::vector<std::pair<std::string, double>> bars;
        for (auto k : kinds)
            for (auto d : descs)
                bars.emplace_back(std::string(gazekit::to_string(d)) + "+" + gazekit::to_string(k),
                                  table.at({d, k}).mean_error_cm);
        gazekit::write_bar_chart_svg(bars, "LOSO mean error (cm)", (dir / "sweep.svg").string());
        summary["protocol"] = "sweep";
        summary["seed"] = cfg.seed;
        for (const auto& [key, rep] : table)
            summary["cells"][std::string(gazekit::to_string(key.first)) + "+" +
                             gazekit::to_string(key.second)] = rep.mean_error_cm;
        outputs = {"summary.json", "sweep.csv", "sweep.svg"};
        write_run_manifest(dir, cfg, pc.fingerprint(samples.size()), {cfg.corpus}, outputs);
    } else if (cfg.protocol == "size") {
        std::vector<int> use = sizes;
        if (use.empty()) {
            std::set<std::string> subjects;
            for (const auto& s : samples) subjects.insert(s.record.subject_id);
            for (int k = 2; k <= static_cast<int>(subjects.size()); ++k) use.push_back(k);
        }
        auto curve = gazekit::size_study(samples, geom, pc, use, cfg.repeats);
        std::ostringstream csv;
        csv << "k_subjects,mean_error_cm\n";
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : curve) {
            csv << p.k_subjects << ',' << std::fixed << std::setprecision(4) << p.mean_error_cm
                << "\n";
            pts.emplace_back(p.k_subjects, p.mean_error_cm);
            summary["curve"][std::to_string(p.k_subjects)] = p.mean_error_cm;
        }
        write_text(dir / "size_study.csv", csv.str());
        gazekit::write_line_chart_svg(pts, "mean error vs training subjects",
                                      (dir / "size_study.svg").string());
        summary["protocol"] = "size";
        summary["seed"] = cfg.seed;
        outputs = {"summary.json", "size_study.csv", "size_study.svg"};
        write_run_manifest(dir, cfg, pc.fingerprint(samples.size()), {cfg.corpus}, outputs);
    } else if (cfg.protocol == "partition") {
        gazekit::GroupFactor factor = gazekit::factor_from_string(cfg.factor);
        auto res = gazekit::partition_experiments(samples, geom, pc, factor, cfg.repeats);
        summary["protocol"] = "partition";
        summary["factor"] = cfg.factor;
        summary["seed"] = cfg.seed;
        summary["e1"] = res.e1;
        summary["e2"] = res.e2;
        summary["e3"] = res.e3;
        summary["skipped_groups"] = res.skipped_groups;
        summary["fingerprint"] = res.e2_full.fingerprint;
        std::vector<std::pair<std::string, double>> bars;
        for (const auto& [g, v] : res.e1) bars.emplace_back("E1:" + g, v);
        for (const auto& [g, v] : res.e2) bars.emplace_back("E2:" + g, v);
        for (const auto& [g, v] : res.e3) bars.emplace_back("E3:" + g, v);
        gazekit::write_bar_chart_svg(bars, "group-factor mean error (cm)",
                                     (dir / "partition.svg").string());
        outputs = {"summary.json", "partition.svg"};
        write_run_manifest(dir, cfg, res.e2_full.fingerprint, {cfg.corpus}, outputs);
    } else {
        throw std::runtime_error("unknown protocol: " + cfg.protocol);
    }

    summary["fingerprint"] = summary.value("fingerprint", pc.fingerprint(samples.size()));
    // shared across protocols/cells for the same corpus + seed; `report`
    // refuses to merge summaries where this differs
    summary["corpus_fingerprint"] =
        gazekit::derive_seed(cfg.seed, "corpus/" + std::to_string(samples.size()));
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- track

int cmd_track(const RunConfig& cfg, const std::string& model_path, const std::string& subject,
              const std::string& session, double sigma_t, double sigma_r) {
    fs::path src = resolve_corpus(cfg.corpus);
    gazekit::Corpus corpus = gazekit::load_manifest((src / "manifest.csv").string());
    auto boxes = gazekit::load_boxes((src / "boxes.csv").string());

    struct Item {
        double t;
        std::string path;
        std::string rel;
    };
    std::vector<Item> items;
    for (const auto& r : corpus.records) {
        if (!subject.empty() && r.subject_id != subject) continue;
        if (!session.empty() && r.session_id != session) continue;
        std::string rel = fs::relative(r.frame_ref, src).string();
        items.push_back({r.timestamp_s, r.frame_ref, rel});
    }
    if (items.empty()) throw std::runtime_error("track: no frames match the subject/session filter");
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.t < b.t; });

    std::vector<gazekit::GrayImage> frames;
    std::vector<std::vector<gazekit::BoundingBox>> candidates;
    for (const auto& it : items) {
        frames.push_back(gazekit::read_png(it.path));
        auto found = boxes.find(it.rel);
        if (found == boxes.end()) found = boxes.find(it.path);
        candidates.push_back(found != boxes.end() ? found->second
                                                  : std::vector<gazekit::BoundingBox>{});
    }

    gazekit::GazeModel model = gazekit::load_model(model_path);
    gazekit::GazeTrack raw = gazekit::track(frames, candidates, model);
    gazekit::GazeTrack filtered = gazekit::bilateral_filter(raw, sigma_t, sigma_r);
    gazekit::ScreenGeometry geom;
    if (cfg.clamp) {
        auto clamp_point = [&](std::optional<gazekit::GazePoint>& p) {
            if (!p) return;
            p->x_cm = std::clamp(p->x_cm, 0.0, geom.width_cm);
            p->y_cm = std::clamp(p->y_cm, 0.0, geom.height_cm);
        };
        for (auto& e : filtered.entries) {
            clamp_point(e.raw);
            clamp_point(e.filtered);
        }
    }

    fs::path dir = ensure_out_dir(cfg.out);
    gazekit::write_track_csv(filtered, (dir / "track.csv").string());
    gazekit::write_track_overlay_svg(filtered, geom, (dir / "overlay.svg").string());
    write_run_manifest(dir, cfg, model.fingerprint, {cfg.corpus, model_path},
                       {"track.csv", "overlay.svg"});
    Json j;
    j["frames"] = filtered.entries.size();
    j["estimated"] = filtered.estimated_count();
    int blinks = 0;
    for (const auto& e : filtered.entries) blinks += e.blink;
    j["blink_frames"] = blinks;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- report

int cmd_report(const RunConfig& cfg, const std::vector<std::string>& inputs) {
    if (inputs.empty()) throw std::runtime_error("report: no input summaries given");
    std::vector<Json> summaries;
    for (const auto& in : inputs) {
        fs::path p(in);
        if (fs::is_directory(p)) p /= "summary.json";
        std::ifstream f(p);
        if (!f) throw std::runtime_error("report: cannot open " + p.string());
        summaries.push_back(Json::parse(f));
    }
    // refuse to merge results produced from different corpora/seeds
    std::set<std::uint64_t> corpus_fps, seeds;
    for (const auto& s : summaries) {
        seeds.insert(s.value("seed", std::uint64_t(0)));
        corpus_fps.insert(s.value("corpus_fingerprint", std::uint64_t(0)));
    }
    if (seeds.size() > 1 || corpus_fps.size() > 1)
        throw std::runtime_error("report: refusing to merge summaries with mismatched fingerprints");

    fs::path dir = ensure_out_dir(cfg.out);
    Json merged;
    merged["runs"] = summaries;
    std::vector<std::pair<std::string, double>> bars;
    for (const auto& s : summaries) {
        if (s.contains("mean_error_cm")) {
            std::string label = s.value("feature", "?") + "+" + s.value("regressor", "?");
            bars.emplace_back(label, s["mean_error_cm"].get<double>());
        }
    }
    if (!bars.empty())
        gazekit::write_bar_chart_svg(bars, "mean error (cm)", (dir / "report.svg").string());
    write_text(dir / "report.json", merged.dump(2) + "\n");
    std::vector<std::string> outputs = {"report.json"};
    if (!bars.empty()) outputs.push_back("report.svg");
    write_run_manifest(dir, cfg, *corpus_fps.begin(), inputs, outputs);
    std::cout << merged.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"appearance-based gaze estimation pipeline"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "master seed; all stage seeds derive from it");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--jobs", cfg.jobs, "worker thread cap")->check(CLI::PositiveNumber);
    };

    int subjects = 8, sessions = 1, frames_per_point = 3;
    double glare = 0.0;
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--subjects", subjects)->check(CLI::Range(2, 1000));
    synth->add_option("--sessions", sessions)->check(CLI::PositiveNumber);
    synth->add_option("--frames-per-point", frames_per_point)->check(CLI::PositiveNumber);
    synth->add_option("--glare", glare, "glare noise strength on glasses-wearing subjects");
    add_common(synth);

    auto* ingest = app.add_subcommand("ingest", "validate a corpus and report prepare stats");
    ingest->add_option("--corpus", cfg.corpus)->required();
    add_common(ingest);

    auto* extract = app.add_subcommand("extract", "extract descriptors to a feature dump");
    extract->add_option("--corpus", cfg.corpus)->required();
    extract->add_option("--feature", cfg.descriptor)
        ->check(CLI::IsMember({"intensity", "log", "lbp", "hog", "mhog"}));
    add_common(extract);

    auto* train = app.add_subcommand("train", "train a gaze model");
    train->add_option("--corpus", cfg.corpus)->required();
    train->add_option("--feature", cfg.descriptor)
        ->check(CLI::IsMember({"intensity", "log", "lbp", "hog", "mhog"}));
    train->add_option("--regressor", cfg.regressor)->check(CLI::IsMember({"knn", "rf"}));
    train->add_option("--trees", cfg.trees)->check(CLI::PositiveNumber);
    train->add_flag("--augmented", cfg.augmented, "append eye-geometry values to features");
    add_common(train);

    std::vector<int> sizes;
    auto* eval = app.add_subcommand("eval", "run an evaluation protocol");
    eval->add_option("--corpus", cfg.corpus)->required();
    eval->add_option("--protocol", cfg.protocol)
        ->check(CLI::IsMember({"loso", "session", "sweep", "size", "partition"}));
    eval->add_option("--feature", cfg.descriptor)
        ->check(CLI::IsMember({"intensity", "log", "lbp", "hog", "mhog"}));
    eval->add_option("--regressor", cfg.regressor)->check(CLI::IsMember({"knn", "rf"}));
    eval->add_option("--factor", cfg.factor)->check(CLI::IsMember({"glasses", "race", "posture"}));
    eval->add_option("--trees", cfg.trees)->check(CLI::PositiveNumber);
    eval->add_option("--repeats", cfg.repeats)->check(CLI::PositiveNumber);
    eval->add_option("--sizes", sizes, "subject counts for the size study");
    eval->add_flag("--augmented", cfg.augmented);
    add_common(eval);

    std::string model_path, subject, session;
    double sigma_t = 5.0, sigma_r = 1.7;
    auto* track = app.add_subcommand("track", "continuous tracking over one session");
    track->add_option("--corpus", cfg.corpus)->required();
    track->add_option("--model", model_path)->required();
    track->add_option("--subject", subject);
    track->add_option("--session", session);
    track->add_option("--sigma-t", sigma_t);
    track->add_option("--sigma-r", sigma_r);
    track->add_flag("--clamp", cfg.clamp, "clamp outputs to screen bounds (post-processing)");
    add_common(track);

    std::vector<std::string> report_inputs;
    auto* report = app.add_subcommand("report", "merge evaluation summaries");
    report->add_option("--in", report_inputs, "summary.json files or eval output dirs");
    add_common(report);

    CLI11_PARSE(app, argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (synth->parsed()) return cmd_synth(cfg, subjects, sessions, frames_per_point, glare);
        if (ingest->parsed()) return cmd_ingest(cfg);
        if (extract->parsed()) return cmd_extract(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (eval->parsed()) return cmd_eval(cfg, sizes);
        if (track->parsed())
            return cmd_track(cfg, model_path, subject, session, sigma_t, sigma_r);
        if (report->parsed()) return cmd_report(cfg, report_inputs);
    } catch (const std::exception& e) {
        Json err;
        err["error"] = e.what();
        err["command"] = cfg.command;
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}

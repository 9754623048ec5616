#ifndef GAZEKIT_PIPELINE_HPP
#define GAZEKIT_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "gazekit/dataset.hpp"
#include "gazekit/eyes.hpp"
#include "gazekit/png_io.hpp"
#include "gazekit/regress.hpp"
#include "gazekit/synth.hpp"

namespace gazekit {

struct PrepareStats {
    int total = 0;
    int detection_failures = 0;
    int blink_skipped = 0;
};

inline constexpr const char* kBoxesHeader = "frame_path,side,x,y,w,h";

/// Candidate-box sidecar: one line per detection, same fields the
/// detector-adapter subprocess protocol emits.
inline std::map<std::string, std::vector<BoundingBox>> load_boxes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_boxes: cannot open " + path);
    std::map<std::string, std::vector<BoundingBox>> boxes;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line == kBoxesHeader) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 6)
            throw std::runtime_error("load_boxes: " + path + ":" + std::to_string(lineno) +
                                     ": expected 6 fields");
        BoundingBox b;
        if (f[1] == "left")
            b.side = EyeSide::left;
        else if (f[1] == "right")
            b.side = EyeSide::right;
        else
            throw std::runtime_error("load_boxes: " + path + ":" + std::to_string(lineno) +
                                     ": side must be left or right");
        b.x = std::stoi(f[2]);
        b.y = std::stoi(f[3]);
        b.w = std::stoi(f[4]);
        b.h = std::stoi(f[5]);
        boxes[f[0]].push_back(b);
    }
    return boxes;
}

inline void save_boxes(const std::map<std::string, std::vector<BoundingBox>>& boxes,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_boxes: cannot open " + path);
    out << kBoxesHeader << "\n";
    for (const auto& [frame, list] : boxes)
        for (const auto& b : list)
            out << frame << ',' << (b.side == EyeSide::left ? "left" : "right") << ',' << b.x << ','
                << b.y << ',' << b.w << ',' << b.h << "\n";
}

namespace detail {

/// Localize + crop every frame, then drop blink-flagged frames per
/// session using the crop mean-intensity series.
inline std::vector<PreparedSample> prepare_impl(
    const Corpus& corpus, const std::vector<GrayImage>& frames,
    const std::vector<std::vector<BoundingBox>>& candidates, PrepareStats* stats) {
    PrepareStats local;
    local.total = static_cast<int>(corpus.records.size());

    struct Staged {
        size_t record_index;
        PreparedSample sample;
        double crop_mean;
    };
    // session key -> staged samples in record (timestamp) order
    std::map<std::pair<std::string, std::string>, std::vector<Staged>> sessions;

    for (size_t i = 0; i < corpus.records.size(); ++i) {
        const auto& rec = corpus.records[i];
        const GrayImage& frame = frames[i];
        try {
            auto [lbox, rbox] = localize_eyes(frame.width, frame.height, candidates[i]);
            PreparedSample s;
            s.record = rec;
            s.pair.left = crop_eye(frame, lbox);
            s.pair.right = crop_eye(frame, rbox);
            s.pair.left_box = lbox;
            s.pair.right_box = rbox;
            s.geom = eye_geometry_feature(lbox, rbox);
            s.label = grid_to_screen(rec.grid, corpus.geometry);
            double m = (mean_intensity(s.pair.left) + mean_intensity(s.pair.right)) / 2.0;
            sessions[{rec.subject_id, rec.session_id}].push_back({i, std::move(s), m});
        } catch (const DetectionFailure&) {
            ++local.detection_failures;
        }
    }

    std::vector<PreparedSample> out;
    for (auto& [key, staged] : sessions) {
        std::vector<double> series(staged.size());
        for (size_t j = 0; j < staged.size(); ++j) series[j] = staged[j].crop_mean;
        BlinkResult blinks = detect_blinks(series);
        for (size_t j = 0; j < staged.size(); ++j) {
            if (blinks.skipped(static_cast<int>(j))) {
                ++local.blink_skipped;
                continue;
            }
            out.push_back(std::move(staged[j].sample));
        }
    }
    // restore corpus record order (sessions map reordered samples)
    std::stable_sort(out.begin(), out.end(), [&](const PreparedSample& a, const PreparedSample& b) {
        return std::tie(a.record.subject_id, a.record.session_id, a.record.timestamp_s) <
               std::tie(b.record.subject_id, b.record.session_id, b.record.timestamp_s);
    });
    if (stats) *stats = local;
    return out;
}

}  // namespace detail

inline std::vector<PreparedSample> prepare_samples(const SynthCorpus& synth,
                                                   PrepareStats* stats = nullptr) {
    return detail::prepare_impl(synth.corpus, synth.frames, synth.candidates, stats);
}

/// Disk path: loads frames named by the manifest and candidate boxes
/// from the sidecar next to it.
inline std::vector<PreparedSample> prepare_samples(const Corpus& corpus,
                                                   const std::string& boxes_path,
                                                   PrepareStats* stats = nullptr) {
    auto boxes = load_boxes(boxes_path);
    const auto base = std::filesystem::path(boxes_path).parent_path();
    std::vector<GrayImage> frames;
    std::vector<std::vector<BoundingBox>> candidates;
    frames.reserve(corpus.records.size());
    for (const auto& rec : corpus.records) {
        frames.push_back(read_png(rec.frame_ref));
        std::string rel = std::filesystem::relative(rec.frame_ref, base).string();
        auto it = boxes.find(rel);
        if (it == boxes.end()) it = boxes.find(rec.frame_ref);
        candidates.push_back(it != boxes.end() ? it->second : std::vector<BoundingBox>{});
    }
    return detail::prepare_impl(corpus, frames, candidates, stats);
}

/// Writes a synthetic corpus to disk in the manifest layout: frames/ of
/// PNGs, manifest.csv, boxes.csv.
inline void materialize(const SynthCorpus& synth, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "frames");
    Corpus on_disk = synth.corpus;
    std::map<std::string, std::vector<BoundingBox>> boxes;
    for (size_t i = 0; i < on_disk.records.size(); ++i) {
        std::string rel = on_disk.records[i].frame_ref;
        std::string abs = (fs::path(dir) / rel).string();
        write_png(abs, synth.frames[i]);
        boxes[rel] = synth.candidates[i];
        on_disk.records[i].frame_ref = abs;
    }
    save_manifest(on_disk, (fs::path(dir) / "manifest.csv").string());
    save_boxes(boxes, (fs::path(dir) / "boxes.csv").string());
}

}  // namespace gazekit

#endif

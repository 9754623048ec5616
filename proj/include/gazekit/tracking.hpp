#ifndef GAZEKIT_TRACKING_HPP
#define GAZEKIT_TRACKING_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "gazekit/eval.hpp"
#include "gazekit/regress.hpp"

namespace gazekit {

struct TrackEntry {
    int frame_index = 0;
    std::optional<GazePoint> raw;
    std::optional<GazePoint> filtered;
    bool blink = false;  // blink frames carry no estimate
    std::optional<EyeGeometryFeature> geometry;  // logged eye-center series
};

struct GazeTrack {
    std::vector<TrackEntry> entries;

    int estimated_count() const {
        int n = 0;
        for (const auto& e : entries) n += e.raw.has_value();
        return n;
    }
};

/// Frame-by-frame tracking over one temporally ordered session:
/// localize, crop, blink-check, predict. Blink and detector-failure
/// frames are marked and carry no estimate.
inline GazeTrack track(const std::vector<GrayImage>& frames,
                       const std::vector<std::vector<BoundingBox>>& candidates,
                       const GazeModel& model) {
    if (frames.size() != candidates.size())
        throw std::invalid_argument("track: frames/candidates size mismatch");
    GazeTrack out;
    out.entries.resize(frames.size());

    struct Crop {
        EyePair pair;
        EyeGeometryFeature geom;
    };
    std::vector<std::optional<Crop>> crops(frames.size());
    std::vector<double> series(frames.size(), 0.0);
    double last_mean = 0.0;
    for (size_t i = 0; i < frames.size(); ++i) {
        out.entries[i].frame_index = static_cast<int>(i);
        try {
            auto [lbox, rbox] = localize_eyes(frames[i].width, frames[i].height, candidates[i]);
            Crop c;
            c.pair.left = crop_eye(frames[i], lbox);
            c.pair.right = crop_eye(frames[i], rbox);
            c.pair.left_box = lbox;
            c.pair.right_box = rbox;
            c.geom = eye_geometry_feature(lbox, rbox);
            last_mean = (mean_intensity(c.pair.left) + mean_intensity(c.pair.right)) / 2.0;
            crops[i] = std::move(c);
        } catch (const DetectionFailure&) {
        }
        series[i] = last_mean;  // failed frames repeat the last value
    }

    BlinkResult blinks = detect_blinks(series);
    for (size_t i = 0; i < frames.size(); ++i) {
        if (blinks.skipped(static_cast<int>(i))) {
            out.entries[i].blink = true;
            continue;
        }
        if (!crops[i]) continue;
        out.entries[i].geometry = crops[i]->geom;
        out.entries[i].raw =
            predict_gaze(model, crops[i]->pair, model.augmented ? &crops[i]->geom : nullptr);
    }
    return out;
}

/// Temporal bilateral filter over raw estimates: weights decay with both
/// frame distance (sigma_t) and estimate distance (sigma_r), window
/// |i-j| <= 3 sigma_t. Blink/failed frames contribute nothing.
inline GazeTrack bilateral_filter(const GazeTrack& in, double sigma_t = 5.0, double sigma_r = 1.7) {
    if (sigma_t <= 0 || sigma_r <= 0)
        throw std::invalid_argument("bilateral_filter: sigmas must be positive");
    GazeTrack out = in;
    const int n = static_cast<int>(in.entries.size());
    const int radius = static_cast<int>(std::ceil(3.0 * sigma_t));
    for (int i = 0; i < n; ++i) {
        if (!in.entries[i].raw) continue;
        const GazePoint& ri = *in.entries[i].raw;
        double wsum = 0.0, fx = 0.0, fy = 0.0;
        for (int j = std::max(0, i - radius); j <= std::min(n - 1, i + radius); ++j) {
            if (!in.entries[j].raw) continue;
            const GazePoint& rj = *in.entries[j].raw;
            double dt = i - j;
            double dr2 = (ri.x_cm - rj.x_cm) * (ri.x_cm - rj.x_cm) +
                         (ri.y_cm - rj.y_cm) * (ri.y_cm - rj.y_cm);
            double w = std::exp(-dt * dt / (2.0 * sigma_t * sigma_t)) *
                       std::exp(-dr2 / (2.0 * sigma_r * sigma_r));
            wsum += w;
            fx += w * rj.x_cm;
            fy += w * rj.y_cm;
        }
        out.entries[i].filtered = GazePoint{fx / wsum, fy / wsum};
    }
    return out;
}

}  // namespace gazekit

#endif

#ifndef GAZEKIT_EYES_HPP
#define GAZEKIT_EYES_HPP

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gazekit/image.hpp"

namespace gazekit {

enum class EyeSide { left, right };

/// Candidate eye region in frame pixel coordinates, tagged with the
/// subject-side the detector was trained for.
struct BoundingBox {
    int x = 0, y = 0, w = 0, h = 0;
    EyeSide side = EyeSide::left;

    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }
};

inline constexpr int kEyeCropHeight = 30;
inline constexpr int kEyeCropWidth = 100;

/// Canonical two-eye observation: 30x100 crops plus the boxes they came from.
struct EyePair {
    GrayImage left;   // subject's left eye (image right side)
    GrayImage right;  // subject's right eye (image left side)
    BoundingBox left_box;
    BoundingBox right_box;
};

/// Box centers, box sizes and inter-eye offset; length fixed at 10.
using EyeGeometryFeature = std::array<double, 10>;

inline EyeGeometryFeature eye_geometry_feature(const BoundingBox& left_box,
                                               const BoundingBox& right_box) {
    return {left_box.cx(),  left_box.cy(),
            right_box.cx(), right_box.cy(),
            double(left_box.w),  double(left_box.h),
            double(right_box.w), double(right_box.h),
            left_box.cx() - right_box.cx(),
            left_box.cy() - right_box.cy()};
}

struct DetectionFailure : std::runtime_error {
    explicit DetectionFailure(const std::string& why) : std::runtime_error(why) {}
};

/// Picks the best left/right pair from raw detector candidates.
/// Small boxes (min side < 3% of frame height) are dropped, the pair must
/// be coarsely height-aligned, and the subject's right eye must sit left
/// of the left eye in image coordinates. Ties go to the larger pair.
inline std::pair<BoundingBox, BoundingBox> localize_eyes(int frame_width, int frame_height,
                                                         const std::vector<BoundingBox>& candidates) {
    (void)frame_width;
    const double s_min = 0.03 * frame_height;
    std::vector<BoundingBox> lefts, rights;
    for (const auto& b : candidates) {
        if (std::min(b.w, b.h) < s_min) continue;
        (b.side == EyeSide::left ? lefts : rights).push_back(b);
    }
    bool found = false;
    BoundingBox best_l, best_r;
    double best_dy = 0.0, best_area = 0.0;
    for (const auto& l : lefts) {
        for (const auto& r : rights) {
            double dy = std::abs(l.cy() - r.cy());
            if (dy > 0.5 * std::max(l.h, r.h)) continue;
            if (!(r.cx() < l.cx())) continue;  // subject's right eye on image left
            double area = double(l.w) * l.h + double(r.w) * r.h;
            if (!found || dy < best_dy || (dy == best_dy && area > best_area)) {
                found = true;
                best_l = l;
                best_r = r;
                best_dy = dy;
                best_area = area;
            }
        }
    }
    if (!found) throw DetectionFailure("localize_eyes: no surviving left/right pair");
    return {best_l, best_r};
}

/// Resizes the box region to 100x100 and keeps the 30 rows around the
/// nominal pupil row (2/3 of the box height, row 67): rows 52..81.
inline GrayImage crop_eye(const GrayImage& frame, const BoundingBox& box) {
    if (box.w <= 0 || box.h <= 0 || box.x < 0 || box.y < 0 ||
        box.x + box.w > frame.width || box.y + box.h > frame.height)
        throw std::domain_error("crop_eye: box exceeds frame");
    GrayImage region(box.w, box.h);
    for (int y = 0; y < box.h; ++y)
        for (int x = 0; x < box.w; ++x)
            region.at(x, y) = frame.at(box.x + x, box.y + y);
    GrayImage scaled = resize_bilinear(region, kEyeCropWidth, kEyeCropWidth);
    const int row_c = static_cast<int>(std::lround(2.0 / 3.0 * kEyeCropWidth));  // 67
    const int row0 = row_c - kEyeCropHeight / 2;                                 // 52
    GrayImage crop(kEyeCropWidth, kEyeCropHeight);
    for (int y = 0; y < kEyeCropHeight; ++y)
        for (int x = 0; x < kEyeCropWidth; ++x)
            crop.at(x, y) = scaled.at(x, row0 + y);
    return crop;
}

struct BlinkEvent {
    int peak_index = 0;
    std::vector<int> skip_set;  // 6 frames: peak-3 .. peak+2
};

struct BlinkResult {
    std::vector<BlinkEvent> events;
    bool series_too_short = false;

    bool skipped(int frame) const {
        for (const auto& e : events)
            for (int s : e.skip_set)
                if (s == frame) return true;
        return false;
    }
};

/// Blink detection on the mean-intensity series of an eye-crop sequence.
/// Baseline is the mean over the previous 20 frames; a frame is blink-like
/// when it exceeds baseline + 2 * rolling std. Each contiguous run of
/// blink-like frames yields one peak and a 6-frame skip set around it.
inline BlinkResult detect_blinks(const std::vector<double>& mean_series) {
    constexpr int kWindow = 20;
    constexpr int kSkipBefore = 3, kSkipAfter = 2;
    BlinkResult res;
    const int n = static_cast<int>(mean_series.size());
    if (n < kWindow) {
        res.series_too_short = true;
        return res;
    }
    std::vector<char> flagged(n, 0);
    for (int i = 1; i < n; ++i) {
        int w0 = std::max(0, i - kWindow);
        int cnt = i - w0;
        double mean = 0.0;
        for (int j = w0; j < i; ++j) mean += mean_series[j];
        mean /= cnt;
        double var = 0.0;
        for (int j = w0; j < i; ++j) var += (mean_series[j] - mean) * (mean_series[j] - mean);
        double sd = cnt > 1 ? std::sqrt(var / (cnt - 1)) : 0.0;
        // the absolute floor keeps float rounding on a flat series from
        // masquerading as a brightness excursion
        double tol = 1e-9 * std::max(1.0, std::abs(mean));
        if (mean_series[i] > mean + 2.0 * sd + tol) flagged[i] = 1;
    }
    for (int i = 0; i < n;) {
        if (!flagged[i]) {
            ++i;
            continue;
        }
        int j = i;
        int peak = i;
        while (j < n && flagged[j]) {
            if (mean_series[j] > mean_series[peak]) peak = j;
            ++j;
        }
        BlinkEvent ev;
        ev.peak_index = peak;
        for (int s = peak - kSkipBefore; s <= peak + kSkipAfter; ++s)
            if (s >= 0 && s < n) ev.skip_set.push_back(s);
        res.events.push_back(std::move(ev));
        i = j;
    }
    return res;
}

}  // namespace gazekit

#endif

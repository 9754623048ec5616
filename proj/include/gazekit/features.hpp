#ifndef GAZEKIT_FEATURES_HPP
#define GAZEKIT_FEATURES_HPP

#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "gazekit/eyes.hpp"
#include "gazekit/image.hpp"

namespace gazekit {

enum class Descriptor { intensity, log, lbp, hog, mhog };

inline const char* to_string(Descriptor d) {
    switch (d) {
        case Descriptor::intensity: return "intensity";
        case Descriptor::log: return "log";
        case Descriptor::lbp: return "lbp";
        case Descriptor::hog: return "hog";
        default: return "mhog";
    }
}
inline Descriptor descriptor_from_string(const std::string& s) {
    if (s == "intensity") return Descriptor::intensity;
    if (s == "log") return Descriptor::log;
    if (s == "lbp") return Descriptor::lbp;
    if (s == "hog") return Descriptor::hog;
    if (s == "mhog") return Descriptor::mhog;
    throw std::invalid_argument("unknown descriptor: " + s);
}

struct FeatureVector {
    Descriptor descriptor = Descriptor::mhog;
    std::vector<double> values;
    size_t per_eye_len = 0;  // left block is [0, per_eye_len), right follows
};

inline constexpr int kOrientationBins = 9;

namespace detail {

inline void standardize(std::vector<double>& v) {
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    double sd = std::sqrt(var / v.size());
    if (sd < 1e-8) {
        std::fill(v.begin(), v.end(), 0.0);
        return;
    }
    for (double& x : v) x = (x - mean) / sd;
}

/// Unsigned gradient vote: orientation in [0,180) split linearly across
/// the two adjacent bins (wrapping), weighted by gradient magnitude.
/// votes[b] has the same dimensions as the image.
inline std::array<GrayImage, kOrientationBins> orientation_votes(const GrayImage& img) {
    std::array<GrayImage, kOrientationBins> votes;
    for (auto& v : votes) v = GrayImage(img.width, img.height);
    const double bin_width = 180.0 / kOrientationBins;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double gx = (img.at_clamped(x + 1, y) - img.at_clamped(x - 1, y)) / 2.0;
            double gy = (img.at_clamped(x, y + 1) - img.at_clamped(x, y - 1)) / 2.0;
            double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double angle = std::atan2(gy, gx) * 180.0 / M_PI;  // (-180, 180]
            if (angle < 0) angle += 180.0;
            if (angle >= 180.0) angle -= 180.0;
            double pos = angle / bin_width - 0.5;
            int b0 = static_cast<int>(std::floor(pos));
            double frac = pos - b0;
            int lo = (b0 + kOrientationBins) % kOrientationBins;
            int hi = (lo + 1) % kOrientationBins;
            votes[lo].at(x, y) += mag * (1.0 - frac);
            votes[hi].at(x, y) += mag * frac;
        }
    }
    return votes;
}

/// Per-cell 9-bin histograms on a rows x cols grid tiling the image exactly.
inline std::vector<std::array<double, kOrientationBins>> cell_histograms(
    const std::array<GrayImage, kOrientationBins>& votes, int cell_rows, int cell_cols) {
    const int w = votes[0].width, h = votes[0].height;
    if (h % cell_rows != 0 || w % cell_cols != 0)
        throw std::invalid_argument("cell_histograms: grid does not tile image");
    const int ch = h / cell_rows, cw = w / cell_cols;
    std::vector<std::array<double, kOrientationBins>> cells(
        static_cast<size_t>(cell_rows) * cell_cols, std::array<double, kOrientationBins>{});
    for (int b = 0; b < kOrientationBins; ++b)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                cells[static_cast<size_t>(y / ch) * cell_cols + x / cw][b] += votes[b].at(x, y);
    return cells;
}

inline void l1_normalize(std::array<double, kOrientationBins>& hist) {
    double s = std::accumulate(hist.begin(), hist.end(), 0.0);
    if (s <= 0.0) return;
    for (double& v : hist) v /= s;
}

// 256 -> 59 uniform-pattern lookup: patterns with <= 2 circular bit
// transitions get their own bin, everything else shares bin 58.
inline const std::array<int, 256>& uniform_lbp_table() {
    static const std::array<int, 256> table = [] {
        std::array<int, 256> t{};
        int next = 0;
        for (int code = 0; code < 256; ++code) {
            int transitions = 0;
            for (int b = 0; b < 8; ++b)
                transitions += ((code >> b) & 1) != ((code >> ((b + 1) % 8)) & 1);
            t[code] = transitions <= 2 ? next++ : -1;
        }
        for (int code = 0; code < 256; ++code)
            if (t[code] < 0) t[code] = 58;
        return t;
    }();
    return table;
}

}  // namespace detail

inline constexpr int kLbpBins = 59;
inline constexpr int kLbpCellSize = 10;

/// Contrast-normalized intensities: per-eye standardization, left then
/// right. Length 2 * 3000.
inline FeatureVector feat_intensity(const EyePair& pair) {
    FeatureVector f;
    f.descriptor = Descriptor::intensity;
    std::vector<double> l = pair.left.pixels, r = pair.right.pixels;
    detail::standardize(l);
    detail::standardize(r);
    f.per_eye_len = l.size();
    f.values = std::move(l);
    f.values.insert(f.values.end(), r.begin(), r.end());
    return f;
}

/// LoG response (sigma 1.4, 9x9), flattened per eye. Length 2 * 3000.
inline FeatureVector feat_log(const EyePair& pair) {
    static const Kernel k = log_kernel(1.4, 9);
    FeatureVector f;
    f.descriptor = Descriptor::log;
    GrayImage l = convolve(pair.left, k);
    GrayImage r = convolve(pair.right, k);
    f.per_eye_len = l.pixels.size();
    f.values = std::move(l.pixels);
    f.values.insert(f.values.end(), r.pixels.begin(), r.pixels.end());
    return f;
}

namespace detail {

inline std::vector<double> lbp_eye(const GrayImage& img) {
    static const int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
    static const int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
    const auto& table = uniform_lbp_table();
    const int cell_rows = img.height / kLbpCellSize;
    const int cell_cols = img.width / kLbpCellSize;
    std::vector<double> hist(static_cast<size_t>(cell_rows) * cell_cols * kLbpBins, 0.0);
    for (int y = 1; y < img.height - 1; ++y) {
        for (int x = 1; x < img.width - 1; ++x) {
            double c = img.at(x, y);
            int code = 0;
            for (int b = 0; b < 8; ++b)
                if (img.at(x + dx[b], y + dy[b]) > c) code |= 1 << b;
            size_t cell = static_cast<size_t>(y / kLbpCellSize) * cell_cols + x / kLbpCellSize;
            hist[cell * kLbpBins + table[code]] += 1.0;
        }
    }
    for (size_t cell = 0; cell < hist.size() / kLbpBins; ++cell) {
        double s = 0.0;
        for (int b = 0; b < kLbpBins; ++b) s += hist[cell * kLbpBins + b];
        if (s > 0)
            for (int b = 0; b < kLbpBins; ++b) hist[cell * kLbpBins + b] /= s;
    }
    return hist;
}

}  // namespace detail

/// Uniform LBP(8,1) codes over interior pixels, 59-bin histogram per
/// 10x10 cell (3x10 grid per eye), L1-normalized. Length 2 * 1770.
inline FeatureVector feat_lbp(const EyePair& pair) {
    FeatureVector f;
    f.descriptor = Descriptor::lbp;
    std::vector<double> l = detail::lbp_eye(pair.left);
    std::vector<double> r = detail::lbp_eye(pair.right);
    f.per_eye_len = l.size();
    f.values = std::move(l);
    f.values.insert(f.values.end(), r.begin(), r.end());
    return f;
}

namespace detail {

inline std::vector<double> hog_eye(const GrayImage& img) {
    const int cell_rows = 3, cell_cols = 10;
    auto votes = orientation_votes(img);
    auto cells = cell_histograms(votes, cell_rows, cell_cols);
    // 2x2-cell blocks, stride 1, L2-hys
    std::vector<double> out;
    out.reserve(static_cast<size_t>(cell_rows - 1) * (cell_cols - 1) * 4 * kOrientationBins);
    for (int br = 0; br + 1 < cell_rows; ++br) {
        for (int bc = 0; bc + 1 < cell_cols; ++bc) {
            std::array<double, 4 * kOrientationBins> block{};
            int idx = 0;
            for (int dr = 0; dr < 2; ++dr)
                for (int dc = 0; dc < 2; ++dc)
                    for (int b = 0; b < kOrientationBins; ++b)
                        block[idx++] = cells[static_cast<size_t>(br + dr) * cell_cols + bc + dc][b];
            double n2 = 0.0;
            for (double v : block) n2 += v * v;
            if (n2 > 0) {
                double inv = 1.0 / std::sqrt(n2);
                for (double& v : block) v = std::min(v * inv, 0.2);
                n2 = 0.0;
                for (double v : block) n2 += v * v;
                if (n2 > 0) {
                    inv = 1.0 / std::sqrt(n2);
                    for (double& v : block) v *= inv;
                }
            }
            out.insert(out.end(), block.begin(), block.end());
        }
    }
    return out;
}

}  // namespace detail

/// Dalal-Triggs style HoG: 10x10-px cells on a 3x10 grid, 9 unsigned
/// bins, overlapping 2x2 blocks with L2-hys normalization.
inline FeatureVector feat_hog(const EyePair& pair) {
    FeatureVector f;
    f.descriptor = Descriptor::hog;
    std::vector<double> l = detail::hog_eye(pair.left);
    std::vector<double> r = detail::hog_eye(pair.right);
    f.per_eye_len = l.size();
    f.values = std::move(l);
    f.values.insert(f.values.end(), r.begin(), r.end());
    return f;
}

/// Cell-grid pyramid for mHoG; every level tiles 30x100 exactly.
inline const std::vector<std::pair<int, int>>& mhog_levels() {
    static const std::vector<std::pair<int, int>> levels = {{1, 1}, {2, 2}, {3, 5}, {6, 10}};
    return levels;
}

namespace detail {

/// mHoG for one eye via 9 per-bin integral histograms: each cell at each
/// pyramid level is a box sum, then L1-normalized.
inline std::vector<double> mhog_eye(const GrayImage& img) {
    auto votes = orientation_votes(img);
    std::array<IntegralImage, kOrientationBins> integrals;
    for (int b = 0; b < kOrientationBins; ++b) integrals[b] = integral_image(votes[b]);
    std::vector<double> out;
    for (auto [cell_rows, cell_cols] : mhog_levels()) {
        const int ch = img.height / cell_rows, cw = img.width / cell_cols;
        for (int cr = 0; cr < cell_rows; ++cr) {
            for (int cc = 0; cc < cell_cols; ++cc) {
                std::array<double, kOrientationBins> hist{};
                Rect r{cc * cw, cr * ch, cw, ch};
                for (int b = 0; b < kOrientationBins; ++b) hist[b] = box_sum(integrals[b], r);
                l1_normalize(hist);
                out.insert(out.end(), hist.begin(), hist.end());
            }
        }
    }
    return out;
}

/// Direct-sum reference path for the same pyramid; kept for cross-checks.
inline std::vector<double> mhog_eye_direct(const GrayImage& img) {
    auto votes = orientation_votes(img);
    std::vector<double> out;
    for (auto [cell_rows, cell_cols] : mhog_levels()) {
        auto cells = cell_histograms(votes, cell_rows, cell_cols);
        for (auto& hist : cells) {
            l1_normalize(hist);
            out.insert(out.end(), hist.begin(), hist.end());
        }
    }
    return out;
}

}  // namespace detail

/// Multilevel HoG: per-cell 9-bin histograms at four pyramid levels
/// (1x1, 2x2, 3x5, 6x10 cells), L1-normalized, concatenated across
/// levels and eyes. Length 2 * 720.
inline FeatureVector feat_mhog(const EyePair& pair) {
    FeatureVector f;
    f.descriptor = Descriptor::mhog;
    std::vector<double> l = detail::mhog_eye(pair.left);
    std::vector<double> r = detail::mhog_eye(pair.right);
    f.per_eye_len = l.size();
    f.values = std::move(l);
    f.values.insert(f.values.end(), r.begin(), r.end());
    return f;
}

inline FeatureVector extract(const EyePair& pair, Descriptor d) {
    switch (d) {
        case Descriptor::intensity: return feat_intensity(pair);
        case Descriptor::log: return feat_log(pair);
        case Descriptor::lbp: return feat_lbp(pair);
        case Descriptor::hog: return feat_hog(pair);
        case Descriptor::mhog: return feat_mhog(pair);
    }
    throw std::invalid_argument("extract: unknown descriptor");
}

inline size_t feature_length(Descriptor d) {
    switch (d) {
        case Descriptor::intensity:
        case Descriptor::log: return 2 * 3000;
        case Descriptor::lbp: return 2u * 30 * kLbpBins;
        case Descriptor::hog: return 2u * 18 * 4 * kOrientationBins;
        case Descriptor::mhog: return 2u * 80 * kOrientationBins;
    }
    throw std::invalid_argument("feature_length: unknown descriptor");
}

}  // namespace gazekit

#endif

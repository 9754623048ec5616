#ifndef GAZEKIT_IMAGE_HPP
#define GAZEKIT_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gazekit {

/// Grayscale raster, row-major doubles. Pixel values are nominally in
/// [0,1]; filter responses reuse the same container with unbounded range.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("GrayImage: non-positive dimensions");
    }

    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

    // replicate-edge access
    double at_clamped(int x, int y) const {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return at(x, y);
    }

    bool same_dims(const GrayImage& o) const { return width == o.width && height == o.height; }
};

/// Square odd-sided convolution kernel.
struct Kernel {
    int side = 0;
    std::vector<double> taps;

    Kernel() = default;
    Kernel(int s, std::vector<double> t) : side(s), taps(std::move(t)) {
        if (side <= 0 || side % 2 == 0) throw std::invalid_argument("Kernel: side must be odd positive");
        if (taps.size() != static_cast<size_t>(side) * side)
            throw std::invalid_argument("Kernel: tap count mismatch");
    }

    double at(int x, int y) const { return taps[static_cast<size_t>(y) * side + x]; }
};

/// Luma conversion from interleaved 8-bit RGB, ITU-R BT.601 weights.
inline GrayImage to_gray(const std::uint8_t* rgb, int width, int height) {
    GrayImage out(width, height);
    const std::uint8_t* p = rgb;
    for (size_t i = 0; i < out.pixels.size(); ++i, p += 3)
        out.pixels[i] = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
    return out;
}

inline GrayImage to_gray(const std::vector<std::uint8_t>& rgb, int width, int height) {
    if (rgb.size() != static_cast<size_t>(width) * height * 3)
        throw std::invalid_argument("to_gray: buffer size mismatch");
    return to_gray(rgb.data(), width, height);
}

/// Bilinear resize with pixel-center alignment and edge clamping.
inline GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h) {
    if (new_w <= 0 || new_h <= 0) throw std::invalid_argument("resize_bilinear: target dims must be positive");
    GrayImage out(new_w, new_h);
    const double sx = static_cast<double>(img.width) / new_w;
    const double sy = static_cast<double>(img.height) / new_h;
    for (int y = 0; y < new_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        for (int x = 0; x < new_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            double v00 = img.at_clamped(x0, y0);
            double v10 = img.at_clamped(x0 + 1, y0);
            double v01 = img.at_clamped(x0, y0 + 1);
            double v11 = img.at_clamped(x0 + 1, y0 + 1);
            out.at(x, y) = (1 - wy) * ((1 - wx) * v00 + wx * v10) + wy * ((1 - wx) * v01 + wx * v11);
        }
    }
    return out;
}

/// 2D convolution with replicate padding; output is not clamped.
inline GrayImage convolve(const GrayImage& img, const Kernel& k) {
    GrayImage out(img.width, img.height);
    const int r = k.side / 2;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int ky = 0; ky < k.side; ++ky)
                for (int kx = 0; kx < k.side; ++kx)
                    acc += k.at(kx, ky) * img.at_clamped(x + kx - r, y + ky - r);
            out.at(x, y) = acc;
        }
    }
    return out;
}

/// Discretized Laplacian-of-Gaussian, mean-subtracted so the taps sum
/// to exactly zero. Center tap is the most negative.
inline Kernel log_kernel(double sigma, int side) {
    if (sigma <= 0.0) throw std::invalid_argument("log_kernel: sigma must be positive");
    if (side <= 0 || side % 2 == 0) throw std::invalid_argument("log_kernel: side must be odd positive");
    const int r = side / 2;
    const double s2 = sigma * sigma;
    std::vector<double> taps(static_cast<size_t>(side) * side);
    for (int y = -r; y <= r; ++y) {
        for (int x = -r; x <= r; ++x) {
            double q = (x * x + y * y) / (2.0 * s2);
            taps[static_cast<size_t>(y + r) * side + (x + r)] =
                (x * x + y * y - 2.0 * s2) / (s2 * s2) * std::exp(-q);
        }
    }
    double mean = std::accumulate(taps.begin(), taps.end(), 0.0) / taps.size();
    for (double& t : taps) t -= mean;
    return Kernel(side, std::move(taps));
}

struct Rect {
    int x = 0, y = 0, w = 0, h = 0;
};

/// Summed-area table, (width+1) x (height+1), top-left corner zero.
struct IntegralImage {
    int width = 0;
    int height = 0;
    std::vector<double> sums;  // (width+1) * (height+1)

    double at(int x, int y) const { return sums[static_cast<size_t>(y) * (width + 1) + x]; }
};

inline IntegralImage integral_image(const GrayImage& img) {
    IntegralImage ii;
    ii.width = img.width;
    ii.height = img.height;
    ii.sums.assign(static_cast<size_t>(img.width + 1) * (img.height + 1), 0.0);
    for (int y = 0; y < img.height; ++y) {
        double row = 0.0;
        for (int x = 0; x < img.width; ++x) {
            row += img.at(x, y);
            ii.sums[static_cast<size_t>(y + 1) * (img.width + 1) + (x + 1)] =
                ii.at(x + 1, y) + row;
        }
    }
    return ii;
}

/// Sum of pixels in [r.x, r.x+r.w) x [r.y, r.y+r.h); zero-area rects sum to 0.
inline double box_sum(const IntegralImage& ii, const Rect& r) {
    if (r.w < 0 || r.h < 0 || r.x < 0 || r.y < 0 || r.x + r.w > ii.width || r.y + r.h > ii.height)
        throw std::out_of_range("box_sum: rect out of bounds");
    return ii.at(r.x + r.w, r.y + r.h) - ii.at(r.x, r.y + r.h) - ii.at(r.x + r.w, r.y) + ii.at(r.x, r.y);
}

inline double mean_intensity(const GrayImage& img) {
    if (img.pixels.empty()) return 0.0;
    return std::accumulate(img.pixels.begin(), img.pixels.end(), 0.0) / img.pixels.size();
}

}  // namespace gazekit

#endif

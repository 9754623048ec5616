#include <doctest.h>

#include <random>

#include "gazekit/features.hpp"

using namespace gazekit;

namespace {

GrayImage random_crop(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage img(kEyeCropWidth, kEyeCropHeight);
    for (double& p : img.pixels) p = u(rng);
    return img;
}

EyePair random_pair(unsigned seed) {
    EyePair p;
    p.left = random_crop(seed);
    p.right = random_crop(seed + 1000000);
    return p;
}

EyePair constant_pair(double v) {
    EyePair p;
    p.left = GrayImage(kEyeCropWidth, kEyeCropHeight, v);
    p.right = GrayImage(kEyeCropWidth, kEyeCropHeight, v);
    return p;
}

// --- independent oracles -------------------------------------------------

// naive uniform LBP(8,1): per-pixel code with strict > comparison,
// per-cell 59-bin histogram, L1-normalized
std::vector<double> naive_lbp(const GrayImage& img) {
    auto transitions = [](int code) {
        int t = 0;
        for (int b = 0; b < 8; ++b) t += ((code >> b) & 1) != ((code >> ((b + 1) % 8)) & 1);
        return t;
    };
    std::vector<int> mapping(256, -1);
    int next = 0;
    for (int c = 0; c < 256; ++c)
        if (transitions(c) <= 2) mapping[c] = next++;
    for (int c = 0; c < 256; ++c)
        if (mapping[c] < 0) mapping[c] = 58;

    const int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
    const int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
    const int cell_cols = img.width / 10;
    std::vector<double> hist(static_cast<size_t>(img.height / 10) * cell_cols * 59, 0.0);
    for (int y = 1; y + 1 < img.height; ++y)
        for (int x = 1; x + 1 < img.width; ++x) {
            int code = 0;
            for (int b = 0; b < 8; ++b)
                if (img.at(x + dx[b], y + dy[b]) > img.at(x, y)) code |= 1 << b;
            hist[(static_cast<size_t>(y / 10) * cell_cols + x / 10) * 59 + mapping[code]] += 1.0;
        }
    for (size_t cell = 0; cell < hist.size() / 59; ++cell) {
        double s = 0.0;
        for (int b = 0; b < 59; ++b) s += hist[cell * 59 + b];
        if (s > 0)
            for (int b = 0; b < 59; ++b) hist[cell * 59 + b] /= s;
    }
    return hist;
}

// naive per-pixel HoG vote accumulation on an arbitrary cell grid
std::vector<std::array<double, 9>> naive_cells(const GrayImage& img, int cell_rows, int cell_cols) {
    std::vector<std::array<double, 9>> cells(static_cast<size_t>(cell_rows) * cell_cols,
                                             std::array<double, 9>{});
    const int ch = img.height / cell_rows, cw = img.width / cell_cols;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double gx = (img.at_clamped(x + 1, y) - img.at_clamped(x - 1, y)) / 2.0;
            double gy = (img.at_clamped(x, y + 1) - img.at_clamped(x, y - 1)) / 2.0;
            double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double angle = std::atan2(gy, gx) * 180.0 / M_PI;
            if (angle < 0) angle += 180.0;
            if (angle >= 180.0) angle -= 180.0;
            double pos = angle / 20.0 - 0.5;
            int b0 = static_cast<int>(std::floor(pos));
            double frac = pos - b0;
            int lo = (b0 + 9) % 9, hi = (lo + 1) % 9;
            auto& cell = cells[static_cast<size_t>(y / ch) * cell_cols + x / cw];
            cell[lo] += mag * (1.0 - frac);
            cell[hi] += mag * frac;
        }
    return cells;
}

std::vector<double> naive_hog(const GrayImage& img) {
    auto cells = naive_cells(img, 3, 10);
    std::vector<double> out;
    for (int br = 0; br < 2; ++br)
        for (int bc = 0; bc < 9; ++bc) {
            std::vector<double> block;
            for (int dr = 0; dr < 2; ++dr)
                for (int dc = 0; dc < 2; ++dc)
                    for (int b = 0; b < 9; ++b) block.push_back(cells[(br + dr) * 10 + bc + dc][b]);
            double n2 = 0.0;
            for (double v : block) n2 += v * v;
            if (n2 > 0) {
                for (double& v : block) v = std::min(v / std::sqrt(n2), 0.2);
                n2 = 0.0;
                for (double v : block) n2 += v * v;
                if (n2 > 0)
                    for (double& v : block) v /= std::sqrt(n2);
            }
            out.insert(out.end(), block.begin(), block.end());
        }
    return out;
}

std::vector<double> naive_mhog(const GrayImage& img) {
    std::vector<double> out;
    for (auto [rows, cols] : mhog_levels()) {
        auto cells = naive_cells(img, rows, cols);
        for (auto& c : cells) {
            double s = 0.0;
            for (double v : c) s += v;
            if (s > 0)
                for (double& v : c) v /= s;
            out.insert(out.end(), c.begin(), c.end());
        }
    }
    return out;
}

}  // namespace

TEST_CASE("feat_intensity standardization") {
    EyePair flat = constant_pair(0.3);
    FeatureVector f = feat_intensity(flat);
    CHECK(f.values.size() == 6000);
    for (double v : f.values) CHECK(v == 0.0);

    EyePair p = random_pair(1);
    FeatureVector g = feat_intensity(p);
    for (size_t eye = 0; eye < 2; ++eye) {
        double mean = 0.0, var = 0.0;
        for (size_t i = 0; i < 3000; ++i) mean += g.values[eye * 3000 + i];
        mean /= 3000;
        for (size_t i = 0; i < 3000; ++i) {
            double d = g.values[eye * 3000 + i] - mean;
            var += d * d;
        }
        var /= 3000;
        CHECK(std::abs(mean) <= 1e-9);
        CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
    }

    // brightness shift is removed by mean subtraction
    EyePair shifted = p;
    for (double& v : shifted.left.pixels) v += 0.1;
    for (double& v : shifted.right.pixels) v += 0.1;
    FeatureVector h = feat_intensity(shifted);
    for (size_t i = 0; i < g.values.size(); ++i)
        CHECK(h.values[i] == doctest::Approx(g.values[i]).epsilon(1e-9));
}

TEST_CASE("feat_log basics") {
    FeatureVector zero = feat_log(constant_pair(0.6));
    CHECK(zero.values.size() == 6000);
    for (double v : zero.values) CHECK(std::abs(v) <= 1e-6);

    // vertical step edge: response magnitude peaks at the edge columns
    EyePair step = constant_pair(0.0);
    for (int y = 0; y < kEyeCropHeight; ++y)
        for (int x = 50; x < kEyeCropWidth; ++x) step.left.at(x, y) = 1.0;
    GrayImage resp = convolve(step.left, log_kernel(1.4, 9));
    int mid_row = kEyeCropHeight / 2;
    int peak_col = 0;
    for (int x = 1; x < kEyeCropWidth - 1; ++x)
        if (std::abs(resp.at(x, mid_row)) > std::abs(resp.at(peak_col, mid_row))) peak_col = x;
    CHECK(std::abs(peak_col - 50) <= 3);
    // antisymmetric response: opposite signs on the two sides of the edge
    CHECK(resp.at(47, mid_row) * resp.at(52, mid_row) < 0.0);
    // flat regions far from the edge respond with ~0
    for (int x = 0; x < 40; ++x) CHECK(std::abs(resp.at(x, mid_row)) <= 1e-9);
    for (int x = 60; x < kEyeCropWidth; ++x) CHECK(std::abs(resp.at(x, mid_row)) <= 1e-9);

    // linearity under input scaling
    EyePair p = random_pair(2);
    FeatureVector f1 = feat_log(p);
    EyePair doubled = p;
    for (double& v : doubled.left.pixels) v *= 2.0;
    for (double& v : doubled.right.pixels) v *= 2.0;
    FeatureVector f2 = feat_log(doubled);
    for (size_t i = 0; i < f1.values.size(); ++i)
        CHECK(f2.values[i] == doctest::Approx(2.0 * f1.values[i]).epsilon(1e-9));
}

TEST_CASE("feat_lbp against naive oracle") {
    EyePair p = random_pair(3);
    FeatureVector f = feat_lbp(p);
    CHECK(f.values.size() == 3540);
    auto oracle_l = naive_lbp(p.left);
    auto oracle_r = naive_lbp(p.right);
    REQUIRE(oracle_l.size() + oracle_r.size() == f.values.size());
    for (size_t i = 0; i < oracle_l.size(); ++i) CHECK(f.values[i] == oracle_l[i]);
    for (size_t i = 0; i < oracle_r.size(); ++i) CHECK(f.values[oracle_l.size() + i] == oracle_r[i]);
}

TEST_CASE("feat_lbp: constant image gives per-cell indicator histograms") {
    FeatureVector f = feat_lbp(constant_pair(0.5));
    for (size_t cell = 0; cell < f.values.size() / kLbpBins; ++cell) {
        double sum = 0.0;
        int nonzero = 0;
        for (int b = 0; b < kLbpBins; ++b) {
            sum += f.values[cell * kLbpBins + b];
            nonzero += f.values[cell * kLbpBins + b] != 0.0;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(nonzero == 1);
    }
}

TEST_CASE("feat_lbp cell histograms sum to one") {
    FeatureVector f = feat_lbp(random_pair(4));
    for (size_t cell = 0; cell < f.values.size() / kLbpBins; ++cell) {
        double sum = 0.0;
        for (int b = 0; b < kLbpBins; ++b) sum += f.values[cell * kLbpBins + b];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("feat_hog against naive oracle") {
    EyePair p = random_pair(5);
    FeatureVector f = feat_hog(p);
    CHECK(f.values.size() == feature_length(Descriptor::hog));
    auto oracle_l = naive_hog(p.left);
    auto oracle_r = naive_hog(p.right);
    REQUIRE(oracle_l.size() + oracle_r.size() == f.values.size());
    for (size_t i = 0; i < oracle_l.size(); ++i)
        CHECK(f.values[i] == doctest::Approx(oracle_l[i]).epsilon(1e-9));
    for (size_t i = 0; i < oracle_r.size(); ++i)
        CHECK(f.values[oracle_l.size() + i] == doctest::Approx(oracle_r[i]).epsilon(1e-9));
}

TEST_CASE("feat_hog: constant image gives the zero vector") {
    FeatureVector f = feat_hog(constant_pair(0.7));
    for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("feat_hog: 180-degree rotation preserves unsigned histograms per matching cell") {
    GrayImage img = random_crop(6);
    GrayImage rot(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            rot.at(x, y) = img.at(img.width - 1 - x, img.height - 1 - y);
    auto cells = naive_cells(img, 3, 10);
    auto cells_rot = naive_cells(rot, 3, 10);
    // interior cells map exactly; border cells differ via gradient clamping
    for (int r = 1; r < 2; ++r)
        for (int c = 1; c < 9; ++c) {
            const auto& a = cells[r * 10 + c];
            const auto& b = cells_rot[(2 - r) * 10 + (9 - c)];
            for (int bin = 0; bin < 9; ++bin) CHECK(a[bin] == doctest::Approx(b[bin]).epsilon(1e-9));
        }
}

TEST_CASE("feat_mhog matches integral-histogram vs direct computation") {
    for (unsigned seed = 0; seed < 20; ++seed) {
        GrayImage img = random_crop(100 + seed);
        auto fast = detail::mhog_eye(img);
        auto direct = detail::mhog_eye_direct(img);
        auto oracle = naive_mhog(img);
        REQUIRE(fast.size() == direct.size());
        REQUIRE(fast.size() == oracle.size());
        for (size_t i = 0; i < fast.size(); ++i) {
            CHECK(std::abs(fast[i] - direct[i]) <= 1e-9);
            CHECK(std::abs(fast[i] - oracle[i]) <= 1e-9);
        }
    }
}

TEST_CASE("feat_mhog level 1 equals the global orientation histogram") {
    GrayImage img = random_crop(7);
    auto mhog = detail::mhog_eye(img);
    auto global = naive_cells(img, 1, 1)[0];
    double s = 0.0;
    for (double v : global) s += v;
    for (int b = 0; b < 9; ++b) CHECK(mhog[b] == doctest::Approx(global[b] / s).epsilon(1e-9));
}

TEST_CASE("feat_mhog: constant pair gives the zero vector") {
    FeatureVector f = feat_mhog(constant_pair(0.4));
    CHECK(f.values.size() == feature_length(Descriptor::mhog));
    for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("histogram features are invariant to affine intensity rescaling") {
    EyePair p = random_pair(8);
    // keep a*v+b inside [0,1]
    EyePair scaled = p;
    for (double& v : scaled.left.pixels) v = 0.6 * v + 0.15;
    for (double& v : scaled.right.pixels) v = 0.6 * v + 0.15;
    for (Descriptor d : {Descriptor::lbp, Descriptor::hog, Descriptor::mhog}) {
        FeatureVector a = extract(p, d);
        FeatureVector b = extract(scaled, d);
        for (size_t i = 0; i < a.values.size(); ++i)
            CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-6);
    }
}

TEST_CASE("extract determinism and fixed lengths") {
    EyePair p = random_pair(9);
    for (Descriptor d : {Descriptor::intensity, Descriptor::log, Descriptor::lbp, Descriptor::hog,
                         Descriptor::mhog}) {
        FeatureVector a = extract(p, d);
        FeatureVector b = extract(p, d);
        CHECK(a.values == b.values);
        CHECK(a.values.size() == feature_length(d));
        for (unsigned s = 0; s < 20; ++s)
            CHECK(extract(random_pair(200 + s), d).values.size() == feature_length(d));
    }
}

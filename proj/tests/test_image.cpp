#include <doctest.h>

#include <random>

#include "gazekit/image.hpp"

using namespace gazekit;

namespace {

GrayImage random_image(int w, int h, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage img(w, h);
    for (double& p : img.pixels) p = u(rng);
    return img;
}

}  // namespace

TEST_CASE("to_gray luma conversion") {
    std::vector<std::uint8_t> white = {255, 255, 255};
    CHECK(to_gray(white, 1, 1).pixels[0] == doctest::Approx(1.0));
    std::vector<std::uint8_t> black = {0, 0, 0};
    CHECK(to_gray(black, 1, 1).pixels[0] == doctest::Approx(0.0));
    std::vector<std::uint8_t> gray = {128, 128, 128};
    CHECK(to_gray(gray, 1, 1).pixels[0] == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("resize_bilinear identity and constants") {
    GrayImage img = random_image(13, 7, 1);
    GrayImage same = resize_bilinear(img, 13, 7);
    for (size_t i = 0; i < img.pixels.size(); ++i)
        CHECK(same.pixels[i] == doctest::Approx(img.pixels[i]).epsilon(1e-12));

    GrayImage flat(5, 4, 0.37);
    GrayImage up = resize_bilinear(flat, 17, 9);
    for (double p : up.pixels) CHECK(p == doctest::Approx(0.37));

    CHECK_THROWS_AS(resize_bilinear(img, 0, 5), std::invalid_argument);
}

TEST_CASE("resize_bilinear 2x2 checkerboard to 4x4 matches hand-computed table") {
    GrayImage cb(2, 2);
    cb.at(0, 0) = 1.0;
    cb.at(1, 0) = 0.0;
    cb.at(0, 1) = 0.0;
    cb.at(1, 1) = 1.0;
    GrayImage out = resize_bilinear(cb, 4, 4);
    // pixel centers map to source coords {-0.25, 0.25, 0.75, 1.25}, clamped
    // interpolation weights 0/ 1/4 / 3/4 along each axis
    const double e[4][4] = {{1.0, 0.75, 0.25, 0.0},
                            {0.75, 0.625, 0.375, 0.25},
                            {0.25, 0.375, 0.625, 0.75},
                            {0.0, 0.25, 0.75, 1.0}};
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) CHECK(out.at(x, y) == doctest::Approx(e[y][x]).epsilon(1e-12));
}

TEST_CASE("resize_bilinear stays within input envelope") {
    GrayImage img = random_image(20, 15, 7);
    auto [mn, mx] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    GrayImage out = resize_bilinear(img, 33, 9);
    for (double p : out.pixels) {
        CHECK(p >= *mn - 1e-12);
        CHECK(p <= *mx + 1e-12);
    }
}

TEST_CASE("convolve identity and impulse") {
    GrayImage img = random_image(9, 9, 2);
    Kernel ident(3, {0, 0, 0, 0, 1, 0, 0, 0, 0});
    GrayImage out = convolve(img, ident);
    for (size_t i = 0; i < img.pixels.size(); ++i)
        CHECK(out.pixels[i] == doctest::Approx(img.pixels[i]));

    GrayImage impulse(9, 9, 0.0);
    impulse.at(4, 4) = 1.0;
    Kernel box(3, std::vector<double>(9, 1.0 / 9.0));
    GrayImage resp = convolve(impulse, box);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            double expected = (std::abs(x - 4) <= 1 && std::abs(y - 4) <= 1) ? 1.0 / 9.0 : 0.0;
            CHECK(resp.at(x, y) == doctest::Approx(expected));
        }
}

TEST_CASE("convolve is linear") {
    GrayImage a = random_image(12, 8, 3), b = random_image(12, 8, 4);
    Kernel k = log_kernel(1.4, 9);
    GrayImage ca = convolve(a, k), cb = convolve(b, k);
    GrayImage mix(12, 8);
    for (size_t i = 0; i < mix.pixels.size(); ++i) mix.pixels[i] = 0.3 * a.pixels[i] + 0.7 * b.pixels[i];
    GrayImage cmix = convolve(mix, k);
    for (size_t i = 0; i < mix.pixels.size(); ++i)
        CHECK(cmix.pixels[i] == doctest::Approx(0.3 * ca.pixels[i] + 0.7 * cb.pixels[i]).epsilon(1e-9));
}

TEST_CASE("log_kernel shape") {
    Kernel k = log_kernel(1.0, 7);
    double sum = 0.0;
    for (double t : k.taps) sum += t;
    CHECK(std::abs(sum) <= 1e-12);

    double center = k.at(3, 3);
    for (double t : k.taps) CHECK(center <= t + 1e-15);

    // center tap against the analytic formula, mean-subtracted
    double analytic = 0.0, mean = 0.0;
    const double s2 = 1.0;
    for (int y = -3; y <= 3; ++y)
        for (int x = -3; x <= 3; ++x)
            mean += (x * x + y * y - 2 * s2) / (s2 * s2) * std::exp(-(x * x + y * y) / (2 * s2));
    mean /= 49.0;
    analytic = -2.0 - mean;
    CHECK(center == doctest::Approx(analytic).epsilon(1e-12));

    // constant image under a zero-sum kernel
    GrayImage flat(10, 10, 0.5);
    GrayImage resp = convolve(flat, log_kernel(1.4, 9));
    for (double v : resp.pixels) CHECK(std::abs(v) <= 1e-6);

    CHECK_THROWS_AS(log_kernel(0.0, 7), std::invalid_argument);
}

TEST_CASE("integral image box sums") {
    GrayImage ones(10, 10, 1.0);
    IntegralImage ii = integral_image(ones);
    CHECK(box_sum(ii, {0, 0, 10, 10}) == doctest::Approx(100.0));
    CHECK(box_sum(ii, {3, 3, 0, 0}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(box_sum(ii, {5, 5, 10, 2}), std::out_of_range);

    GrayImage img = random_image(17, 11, 5);
    IntegralImage rii = integral_image(img);
    std::mt19937 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        int x = rng() % 17, y = rng() % 11;
        int w = rng() % (17 - x + 1), h = rng() % (11 - y + 1);
        double brute = 0.0;
        for (int yy = y; yy < y + h; ++yy)
            for (int xx = x; xx < x + w; ++xx) brute += img.at(xx, yy);
        CHECK(box_sum(rii, {x, y, w, h}) == doctest::Approx(brute).epsilon(1e-9));
    }
}

TEST_CASE("box sums add over disjoint aligned rects") {
    GrayImage img = random_image(16, 12, 8);
    IntegralImage ii = integral_image(img);
    Rect r1{2, 3, 5, 4}, r2{7, 3, 6, 4}, uni{2, 3, 11, 4};
    CHECK(box_sum(ii, uni) == doctest::Approx(box_sum(ii, r1) + box_sum(ii, r2)).epsilon(1e-12));
}

TEST_CASE("mean_intensity") {
    CHECK(mean_intensity(GrayImage(4, 4, 0.0)) == doctest::Approx(0.0));
    CHECK(mean_intensity(GrayImage(4, 4, 1.0)) == doctest::Approx(1.0));
    GrayImage half(2, 2);
    half.at(0, 0) = half.at(1, 0) = 1.0;
    CHECK(mean_intensity(half) == doctest::Approx(0.5));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ethdr/colorspace.hpp"

#include <cmath>
#include <random>

using namespace ethdr;

namespace {
Tensor pixel(float r, float g, float b) { return Tensor({1, 3, 1, 1}, {r, g, b}); }
}  // namespace

TEST_CASE("paper coefficients: pure red") {
    Tensor out = rgb_to_ycbcr(pixel(1, 0, 0), ColorCoeffs::paper());
    CHECK(out.data()[0] == doctest::Approx(0.299).epsilon(1e-6));
    CHECK(out.data()[1] == doctest::Approx(-0.299).epsilon(1e-6));
    CHECK(out.data()[2] == doctest::Approx(0.701).epsilon(1e-6));
}

TEST_CASE("black maps to black") {
    Tensor out = rgb_to_ycbcr(pixel(0, 0, 0), ColorCoeffs::paper());
    for (int i = 0; i < 3; ++i) CHECK(out.data()[i] == 0.0f);
    Tensor back = ycbcr_to_rgb(pixel(0, 0, 0), ColorCoeffs::paper());
    for (int i = 0; i < 3; ++i) CHECK(back.data()[i] == 0.0f);
}

TEST_CASE("paper coefficients: white point") {
    // weights sum to 0.696, so white lands at Y = 0.696, Cb = Cr = 0.304
    Tensor out = rgb_to_ycbcr(pixel(1, 1, 1), ColorCoeffs::paper());
    CHECK(out.data()[0] == doctest::Approx(0.696).epsilon(1e-6));
    CHECK(out.data()[1] == doctest::Approx(0.304).epsilon(1e-6));
    CHECK(out.data()[2] == doctest::Approx(0.304).epsilon(1e-6));

    Tensor back = ycbcr_to_rgb(out, ColorCoeffs::paper());
    for (int i = 0; i < 3; ++i) CHECK(back.data()[i] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("round trip over 1000 random pixels, both modes") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    for (const ColorCoeffs& coeffs : {ColorCoeffs::paper(), ColorCoeffs::bt601()}) {
        Tensor img({1, 3, 10, 100});
        for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = dist(rng);
        Tensor back = ycbcr_to_rgb(rgb_to_ycbcr(img, coeffs), coeffs);
        float max_err = 0.0f;
        for (std::size_t i = 0; i < img.size(); ++i) {
            max_err = std::max(max_err, std::abs(back.data()[i] - img.data()[i]));
        }
        CHECK(max_err <= 1e-5f);
    }
}

TEST_CASE("forward transform is linear") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    const ColorCoeffs coeffs = ColorCoeffs::paper();
    for (int trial = 0; trial < 100; ++trial) {
        const float a = dist(rng), b = dist(rng);
        Tensor x = pixel(dist(rng), dist(rng), dist(rng));
        Tensor y = pixel(dist(rng), dist(rng), dist(rng));
        Tensor mix({1, 3, 1, 1});
        for (int i = 0; i < 3; ++i) mix.data()[i] = a * x.data()[i] + b * y.data()[i];
        Tensor lhs = rgb_to_ycbcr(mix, coeffs);
        Tensor fx = rgb_to_ycbcr(x, coeffs);
        Tensor fy = rgb_to_ycbcr(y, coeffs);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(lhs.data()[i] - (a * fx.data()[i] + b * fy.data()[i])) <= 1e-5f);
        }
    }
}

TEST_CASE("grey axis chroma") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    for (int trial = 0; trial < 50; ++trial) {
        const float v = dist(rng);
        {
            const ColorCoeffs c = ColorCoeffs::paper();
            Tensor out = rgb_to_ycbcr(pixel(v, v, v), c);
            const float expect = (1.0f - c.wr - c.wg - c.wb) * v;
            CHECK(out.data()[1] == doctest::Approx(expect).epsilon(1e-5));
            CHECK(out.data()[2] == doctest::Approx(expect).epsilon(1e-5));
        }
        {
            Tensor out = rgb_to_ycbcr(pixel(v, v, v), ColorCoeffs::bt601());
            CHECK(std::abs(out.data()[1]) <= 1e-6f);
            CHECK(std::abs(out.data()[2]) <= 1e-6f);
        }
    }
}

TEST_CASE("channel count is enforced") {
    Tensor wrong({1, 4, 1, 1});
    CHECK_THROWS_AS(rgb_to_ycbcr(wrong, ColorCoeffs::paper()), ShapeError);
    CHECK_THROWS_AS(ycbcr_to_rgb(wrong, ColorCoeffs::paper()), ShapeError);
}

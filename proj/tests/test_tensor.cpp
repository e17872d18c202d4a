#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ethdr/tensor.hpp"

#include <cmath>
#include <random>

using namespace ethdr;

namespace {

// Reference erf via the Maclaurin series, independent of std::erf.
double erf_series(double x) {
    double term = x, sum = x;
    for (int n = 1; n < 40; ++n) {
        term *= -x * x / n;
        sum += term / (2 * n + 1);
    }
    return sum * 2.0 / std::sqrt(std::acos(-1.0));
}

Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937& rng) {
    Tensor t(std::move(shape));
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
    return t;
}

}  // namespace

TEST_CASE("tensor shape invariants") {
    CHECK_THROWS_AS(Tensor({2, 0, 3}), ShapeError);
    CHECK_THROWS_AS(Tensor({2, 2}, {1.0f, 2.0f, 3.0f}), ShapeError);
    Tensor t({2, 3});
    CHECK(t.size() == 6);
    CHECK(t.rank() == 2);
}

TEST_CASE("conv2d identity kernel") {
    Tensor input({1, 1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    Tensor w({1, 1, 1, 1}, {1.0f});
    ConvSpec spec;
    Tensor out = conv2d(input, w, std::nullopt, spec);
    REQUIRE(out.same_shape(input));
    for (std::size_t i = 0; i < 9; ++i) CHECK(out.data()[i] == input.data()[i]);
}

TEST_CASE("conv2d 1x1 is a dot product over channels") {
    Tensor input({1, 2, 1, 1}, {3.0f, 5.0f});
    Tensor w({1, 2, 1, 1}, {2.0f, -1.0f});
    ConvSpec spec;
    spec.in_channels = 2;
    Tensor out = conv2d(input, w, std::nullopt, spec);
    CHECK(out.size() == 1);
    CHECK(out.data()[0] == doctest::Approx(3.0f * 2.0f + 5.0f * -1.0f));
}

TEST_CASE("conv2d_oracle depthwise all-ones center tap") {
    // 3x3 all-ones kernel over an all-ones 5x5 input, padding 1: center = 9
    const std::size_t C = 2;
    Tensor input = Tensor::full({1, C, 5, 5}, 1.0f);
    Tensor w = Tensor::full({C, 1, 3, 3}, 1.0f);
    ConvSpec spec;
    spec.in_channels = spec.out_channels = spec.groups = C;
    spec.kernel_h = spec.kernel_w = 3;
    spec.pad_h = spec.pad_w = 1;
    Tensor out = conv2d_oracle(input, w, std::nullopt, spec);
    CHECK(out.at(0, 0, 2, 2) == doctest::Approx(9.0f));
    CHECK(out.at(0, 1, 2, 2) == doctest::Approx(9.0f));
    CHECK(out.at(0, 0, 0, 0) == doctest::Approx(4.0f));  // corner sees 2x2
}

TEST_CASE("conv2d_oracle zero weights plus bias") {
    Tensor input({1, 1, 4, 4});
    Tensor w({2, 1, 3, 3});
    Tensor bias({2}, {0.75f, -1.5f});
    ConvSpec spec;
    spec.out_channels = 2;
    spec.kernel_h = spec.kernel_w = 3;
    spec.pad_h = spec.pad_w = 1;
    Tensor out = conv2d_oracle(input, w, bias, spec);
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 4; ++x) {
            CHECK(out.at(0, 0, y, x) == 0.75f);
            CHECK(out.at(0, 1, y, x) == -1.5f);
        }
}

TEST_CASE("conv2d matches oracle on 50 randomized grouped/dilated/strided cases") {
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        ConvSpec spec;
        const std::size_t groups_choices[3] = {1, 2, 4};
        spec.groups = groups_choices[rng() % 3];
        spec.in_channels = spec.groups * (1 + rng() % 2);
        spec.out_channels = spec.groups * (1 + rng() % 2);
        const std::size_t k = rng() % 2 ? 3 : 1;
        spec.kernel_h = spec.kernel_w = k;
        const std::size_t dil_choices[3] = {1, 3, 5};
        spec.dilation_h = spec.dilation_w = k == 1 ? 1 : dil_choices[rng() % 3];
        spec.stride_h = spec.stride_w = 1 + rng() % 2;
        spec.pad_h = spec.pad_w = rng() % 2 ? spec.dilation_h : 0;
        const std::size_t eff = spec.dilation_h * (k - 1) + 1;
        const std::size_t h = eff + rng() % (17 - eff);
        const std::size_t w = eff + rng() % (17 - eff);

        Tensor input = random_tensor({1, spec.in_channels, h, w}, rng);
        Tensor weights = random_tensor({spec.out_channels, spec.in_channels / spec.groups, k, k}, rng);
        std::optional<Tensor> bias;
        if (rng() % 2) bias = random_tensor({spec.out_channels}, rng);

        Tensor fast = conv2d(input, weights, bias, spec);
        Tensor ref = conv2d_oracle(input, weights, bias, spec);
        REQUIRE(fast.same_shape(ref));
        for (std::size_t j = 0; j < fast.size(); ++j) {
            const float tol = 1e-5f * std::max(1.0f, std::abs(ref.data()[j]));
            REQUIRE(std::abs(fast.data()[j] - ref.data()[j]) <= tol);
        }
    }
}

TEST_CASE("grouped conv equals independent slice convolutions") {
    std::mt19937 rng(11);
    ConvSpec spec;
    spec.groups = 2;
    spec.in_channels = 4;
    spec.out_channels = 6;
    spec.kernel_h = spec.kernel_w = 3;
    spec.pad_h = spec.pad_w = 1;
    Tensor input = random_tensor({1, 4, 6, 6}, rng);
    Tensor weights = random_tensor({6, 2, 3, 3}, rng);
    Tensor whole = conv2d(input, weights, std::nullopt, spec);

    ConvSpec sub = spec;
    sub.groups = 1;
    sub.in_channels = 2;
    sub.out_channels = 3;
    std::vector<Tensor> parts;
    for (std::size_t g = 0; g < 2; ++g) {
        Tensor in_slice({1, 2, 6, 6});
        for (std::size_t c = 0; c < 2; ++c)
            for (std::size_t y = 0; y < 6; ++y)
                for (std::size_t x = 0; x < 6; ++x) in_slice.at(0, c, y, x) = input.at(0, g * 2 + c, y, x);
        Tensor w_slice({3, 2, 3, 3});
        for (std::size_t o = 0; o < 3; ++o)
            for (std::size_t c = 0; c < 2; ++c)
                for (std::size_t i = 0; i < 9; ++i)
                    w_slice.data()[(o * 2 + c) * 9 + i] = weights.data()[((g * 3 + o) * 2 + c) * 9 + i];
        parts.push_back(conv2d(in_slice, w_slice, std::nullopt, sub));
    }
    Tensor stitched = concat_channels(parts);
    REQUIRE(stitched.same_shape(whole));
    for (std::size_t j = 0; j < whole.size(); ++j) {
        CHECK(std::abs(stitched.data()[j] - whole.data()[j]) <= 1e-6f);
    }
}

TEST_CASE("conv2d rejects bad shapes") {
    Tensor input({1, 3, 4, 4});
    Tensor w({2, 3, 3, 3});
    ConvSpec spec;
    spec.in_channels = 4;  // disagrees with input
    spec.out_channels = 2;
    spec.kernel_h = spec.kernel_w = 3;
    CHECK_THROWS_AS(conv2d(input, w, std::nullopt, spec), ShapeError);
    spec.in_channels = 3;
    spec.groups = 2;  // does not divide 3
    CHECK_THROWS_AS(conv2d(input, w, std::nullopt, spec), ShapeError);
}

TEST_CASE("matmul basics and oracle") {
    Tensor eye({2, 2}, {1, 0, 0, 1});
    Tensor a({2, 2}, {1, 2, 3, 4});
    Tensor prod = matmul(eye, a);
    for (std::size_t i = 0; i < 4; ++i) CHECK(prod.data()[i] == a.data()[i]);

    Tensor ones({2, 1}, {1, 1});
    Tensor v = matmul(a, ones);
    CHECK(v.at(0, 0) == 3.0f);
    CHECK(v.at(1, 0) == 7.0f);

    CHECK_THROWS_AS(matmul(a, Tensor({3, 2})), ShapeError);

    std::mt19937 rng(3);
    Tensor x = random_tensor({8, 8}, rng);
    Tensor y = random_tensor({8, 8}, rng);
    Tensor got = matmul(x, y);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) {
            float acc = 0.0f;
            for (std::size_t k = 0; k < 8; ++k) acc += x.at(r, k) * y.at(k, c);
            CHECK(std::abs(got.at(r, c) - acc) <= 1e-6f * std::max(1.0f, std::abs(acc)));
        }
}

TEST_CASE("softmax rows") {
    Tensor x({1, 3}, {0, 0, 0});
    Tensor s = softmax_rows(x);
    for (int i = 0; i < 3; ++i) CHECK(s.data()[i] == doctest::Approx(1.0 / 3.0));

    Tensor big({1, 2}, {1000.0f, 0.0f});
    Tensor sb = softmax_rows(big);
    CHECK(sb.data()[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sb.data()[1] == doctest::Approx(0.0).epsilon(1e-6));

    Tensor ln2({1, 2}, {std::log(2.0f), 0.0f});
    Tensor sl = softmax_rows(ln2);
    CHECK(sl.data()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(sl.data()[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("softmax invariants: row sums and shift invariance") {
    std::mt19937 rng(5);
    Tensor x = random_tensor({6, 9}, rng);
    Tensor s = softmax_rows(x);
    for (std::size_t r = 0; r < 6; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 9; ++c) {
            CHECK(s.at(r, c) >= 0.0f);
            sum += s.at(r, c);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    Tensor shifted = x;
    for (std::size_t c = 0; c < 9; ++c) shifted.at(2, c) += 7.5f;
    Tensor s2 = softmax_rows(shifted);
    for (std::size_t c = 0; c < 9; ++c) {
        CHECK(s2.at(2, c) == doctest::Approx(s.at(2, c)).epsilon(1e-5));
    }
}

TEST_CASE("activation known values") {
    Tensor zero({1, 1}, {0.0f});
    CHECK(activation(zero, Act::Gelu).data()[0] == 0.0f);
    CHECK(activation(zero, Act::Tanh).data()[0] == 0.0f);
    CHECK(activation(zero, Act::Sigmoid).data()[0] == doctest::Approx(0.5));

    // gelu(1) = 1 * Phi(1), Phi from the independent series erf
    const double phi1 = 0.5 * (1.0 + erf_series(1.0 / std::sqrt(2.0)));
    Tensor one({1, 1}, {1.0f});
    CHECK(activation(one, Act::Gelu).data()[0] == doctest::Approx(phi1).epsilon(1e-6));
    CHECK(activation(one, Act::Gelu).data()[0] == doctest::Approx(0.841345).epsilon(1e-5));

    // gelu(x) -> x for large x
    Tensor ten({1, 1}, {10.0f});
    CHECK(std::abs(activation(ten, Act::Gelu).data()[0] - 10.0f) < 1e-4f);
}

TEST_CASE("activation monotonicity for tanh/sigmoid/relu") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<float> dist(-4.0f, 4.0f);
    for (Act kind : {Act::Tanh, Act::Sigmoid, Act::Relu}) {
        for (int i = 0; i < 200; ++i) {
            float a = dist(rng), b = dist(rng);
            if (a > b) std::swap(a, b);
            Tensor ta({1, 1}, {a}), tb({1, 1}, {b});
            CHECK(activation(ta, kind).data()[0] <= activation(tb, kind).data()[0]);
        }
    }
}

TEST_CASE("resize_bilinear") {
    Tensor c = Tensor::full({1, 1, 3, 3}, 0.7f);
    Tensor up = resize_bilinear(c, 7, 5);
    for (std::size_t i = 0; i < up.size(); ++i) CHECK(up.data()[i] == doctest::Approx(0.7f));

    Tensor single({1, 1, 1, 1}, {0.3f});
    Tensor rep = resize_bilinear(single, 4, 4);
    for (std::size_t i = 0; i < rep.size(); ++i) CHECK(rep.data()[i] == 0.3f);

    // half-pixel centers: [1,3] doubled along width -> [1, 1.5, 2.5, 3]
    Tensor row({1, 1, 1, 2}, {1.0f, 3.0f});
    Tensor wide = resize_bilinear(row, 1, 4);
    CHECK(wide.data()[0] == doctest::Approx(1.0f));
    CHECK(wide.data()[1] == doctest::Approx(1.5f));
    CHECK(wide.data()[2] == doctest::Approx(2.5f));
    CHECK(wide.data()[3] == doctest::Approx(3.0f));
}

TEST_CASE("pad_reflect") {
    Tensor row({1, 1, 1, 3}, {1, 2, 3});
    Tensor padded = pad_reflect(row, 0, 1);
    REQUIRE(padded.extent(3) == 5);
    const float want[5] = {2, 1, 2, 3, 2};
    for (int i = 0; i < 5; ++i) CHECK(padded.data()[i] == want[i]);

    CHECK_THROWS_AS(pad_reflect(row, 1, 1), ShapeError);  // pad_h >= H
}

TEST_CASE("pointwise ops, concat, crop") {
    std::mt19937 rng(17);
    Tensor x = random_tensor({1, 2, 3, 3}, rng);
    Tensor zeros({1, 2, 3, 3});
    Tensor same = add(x, zeros);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(same.data()[i] == x.data()[i]);
    CHECK_THROWS_AS(add(x, Tensor({1, 2, 3, 4})), ShapeError);

    Tensor a = random_tensor({1, 2, 2, 2}, rng);
    Tensor b = random_tensor({1, 3, 2, 2}, rng);
    Tensor cat = concat_channels({a, b});
    REQUIRE(cat.extent(1) == 5);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(cat.data()[c * 4 + i] == a.data()[c * 4 + i]);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(cat.data()[(2 + c) * 4 + i] == b.data()[c * 4 + i]);
    CHECK_THROWS_AS(concat_channels({a, Tensor({1, 1, 3, 2})}), ShapeError);

    Tensor window = crop(x, 1, 0, 2, 3);
    CHECK(window.extent(2) == 2);
    CHECK(window.at(0, 1, 0, 2) == x.at(0, 1, 1, 2));
    CHECK_THROWS_AS(crop(x, 2, 0, 2, 3), ShapeError);
}

TEST_CASE("ops are pure: repeated calls are bit-identical") {
    std::mt19937 rng(23);
    Tensor input = random_tensor({1, 4, 9, 9}, rng);
    Tensor w = random_tensor({4, 1, 3, 3}, rng);
    ConvSpec spec;
    spec.in_channels = spec.out_channels = spec.groups = 4;
    spec.kernel_h = spec.kernel_w = 3;
    spec.pad_h = spec.pad_w = 1;
    Tensor r1 = conv2d(input, w, std::nullopt, spec);
    Tensor r2 = conv2d(input, w, std::nullopt, spec);
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1.data()[i] == r2.data()[i]);

    Tensor m = random_tensor({5, 5}, rng);
    Tensor s1 = softmax_rows(m);
    Tensor s2 = softmax_rows(m);
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1.data()[i] == s2.data()[i]);
}

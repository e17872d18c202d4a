#include "ethdr/selftest.hpp"

#include "ethdr/analyzer.hpp"
#include "ethdr/colorspace.hpp"
#include "ethdr/init_rng.hpp"
#include "ethdr/model.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ethdr {

namespace {

// Deterministic test-data stream built on the same counter hash as the
// weight init, so transcripts are identical across runs and platforms.
struct Stream {
    std::uint64_t seed;
    std::uint64_t n = 0;
    float uniform() { return unit_float(counter_hash(seed, 0x5e1f7e57, n++)); }
    float symmetric() { return 2.0f * uniform() - 1.0f; }
    std::size_t pick(std::size_t lo, std::size_t hi) {  // inclusive
        return lo + static_cast<std::size_t>(uniform() * static_cast<float>(hi - lo + 1)) % (hi - lo + 1);
    }
    Tensor tensor(std::vector<std::size_t> shape, float scale = 1.0f) {
        Tensor t(std::move(shape));
        for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = scale * symmetric();
        return t;
    }
};

std::string format_err(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

}  // namespace

std::string check_conv_fuzz(std::size_t cases, bool inject_conv_fault) {
    Stream rng{0xC0DEC0FFEEULL};
    double worst = 0.0;
    for (std::size_t i = 0; i < cases; ++i) {
        ConvSpec spec;
        spec.groups = std::size_t{1} << rng.pick(0, 2);  // 1, 2, 4
        spec.in_channels = spec.groups * rng.pick(1, 2);
        spec.out_channels = spec.groups * rng.pick(1, 2);
        const std::size_t k = rng.pick(0, 1) ? 3 : 1;
        spec.kernel_h = spec.kernel_w = k;
        spec.dilation_h = spec.dilation_w = k == 1 ? 1 : 2 * rng.pick(0, 2) + 1;  // 1, 3, 5
        spec.stride_h = spec.stride_w = rng.pick(1, 2);
        spec.pad_h = spec.pad_w = rng.pick(0, 1) ? spec.dilation_h : 0;
        const std::size_t eff = spec.dilation_h * (k - 1) + 1;
        const std::size_t h = rng.pick(eff, 16);
        const std::size_t w = rng.pick(eff, 16);

        Tensor input = rng.tensor({1, spec.in_channels, h, w});
        Tensor weights = rng.tensor({spec.out_channels, spec.in_channels / spec.groups, k, k});
        std::optional<Tensor> bias;
        if (rng.pick(0, 1)) bias = rng.tensor({spec.out_channels});

        Tensor conv_weights = weights;
        if (inject_conv_fault && i == 0) {
            conv_weights.data()[0] += 0.25f;  // deliberately corrupted kernel, test hook
        }

        Tensor got = conv2d(input, conv_weights, bias, spec);
        Tensor want = conv2d_oracle(input, weights, bias, spec);
        if (!got.same_shape(want)) return "case " + std::to_string(i) + ": shape disagreement";
        for (std::size_t j = 0; j < got.size(); ++j) {
            const double err = std::abs(got.data()[j] - want.data()[j]) /
                               std::max(1.0, std::abs(static_cast<double>(want.data()[j])));
            worst = std::max(worst, err);
            if (err > 1e-5) {
                return "case " + std::to_string(i) + ": rel err " + format_err(err) + " > 1e-5";
            }
        }
    }
    return "";
}

ShadowMsaResult shadow_msa(const Tensor& tokens, const AttentionParams& p) {
    const std::size_t n = tokens.extent(0), C = tokens.extent(1);
    const std::size_t heads = p.heads, d = C / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    ShadowMsaResult r;
    std::uint64_t count = 0;

    Tensor qkv({n, 3 * C});
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t o = 0; o < 3 * C; ++o) {
            float acc = p.qkv.bias.data()[o];
            for (std::size_t i = 0; i < C; ++i) {
                acc += tokens.at(row, i) * p.qkv.weight.at(o, i);
                ++count;
            }
            qkv.at(row, o) = acc;
        }

    Tensor merged({n, C});
    std::vector<float> scores(n);
    for (std::size_t h = 0; h < heads; ++h) {
        for (std::size_t row = 0; row < n; ++row) {
            for (std::size_t col = 0; col < n; ++col) {
                float acc = 0.0f;
                for (std::size_t j = 0; j < d; ++j) {
                    acc += qkv.at(row, h * d + j) * qkv.at(col, C + h * d + j);
                    ++count;
                }
                scores[col] = static_cast<float>(acc * scale);
            }
            float mx = scores[0];
            for (std::size_t col = 1; col < n; ++col) mx = std::max(mx, scores[col]);
            double denom = 0.0;
            for (std::size_t col = 0; col < n; ++col) denom += std::exp(static_cast<double>(scores[col] - mx));
            for (std::size_t j = 0; j < d; ++j) {
                float acc = 0.0f;
                for (std::size_t col = 0; col < n; ++col) {
                    const float prob = static_cast<float>(std::exp(static_cast<double>(scores[col] - mx)) / denom);
                    acc += prob * qkv.at(col, 2 * C + h * d + j);
                    ++count;
                }
                merged.at(row, h * d + j) = acc;
            }
        }
    }

    Tensor out({n, C});
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t o = 0; o < C; ++o) {
            float acc = p.out.bias.data()[o];
            for (std::size_t i = 0; i < C; ++i) {
                acc += merged.at(row, i) * p.out.weight.at(o, i);
                ++count;
            }
            out.at(row, o) = acc;
        }

    r.output = std::move(out);
    r.mul_adds = count;
    return r;
}

std::string check_msa_count_sweep() {
    Stream rng{0xA77E17ULL};
    for (std::size_t h = 1; h <= 8; ++h) {
        for (std::size_t w = 1; w <= 8; ++w) {
            for (std::size_t C : {std::size_t{4}, std::size_t{8}, std::size_t{16}}) {
                AttentionParams p;
                p.dim = C;
                p.heads = C >= 8 ? 4 : 2;
                p.qkv.weight = rng.tensor({3 * C, C});
                p.qkv.bias = rng.tensor({3 * C});
                p.out.weight = rng.tensor({C, C});
                p.out.bias = rng.tensor({C});
                Tensor tokens = rng.tensor({h * w, C});

                const ShadowMsaResult shadow = shadow_msa(tokens, p);
                const LayerCost cost = count_msa({h, w, C});
                if (shadow.mul_adds != cost.macs) {
                    return "h=" + std::to_string(h) + " w=" + std::to_string(w) + " C=" +
                           std::to_string(C) + ": shadow counted " + std::to_string(shadow.mul_adds) +
                           ", formula gives " + std::to_string(cost.macs);
                }
                const Tensor got = msa_forward(tokens, p);
                for (std::size_t i = 0; i < got.size(); ++i) {
                    const double err = std::abs(got.data()[i] - shadow.output.data()[i]);
                    if (err > 1e-3) {
                        return "h=" + std::to_string(h) + " w=" + std::to_string(w) + " C=" +
                               std::to_string(C) + ": shadow output deviates by " + format_err(err);
                    }
                }
            }
        }
    }
    return "";
}

std::string check_iaaf_algebra(std::size_t cases) {
    Stream rng{0x1AAFULL};
    const std::size_t C = 4;
    for (std::size_t i = 0; i < cases; ++i) {
        const std::size_t h = rng.pick(3, 8), w = rng.pick(3, 8);
        IAAFParams p;
        // trained-scale weights keep intermediate magnitudes near unity
        auto mk = [&](std::size_t ic) {
            ConvSpec s;
            s.out_channels = C;
            s.in_channels = ic;
            s.kernel_h = s.kernel_w = 3;
            s.pad_h = s.pad_w = 1;
            return ConvLayer{s, rng.tensor({C, ic, 3, 3}, 0.2f), rng.tensor({C}, 0.2f)};
        };
        p.pre = mk(2 * C);
        p.res0 = mk(C);
        p.res1 = mk(C);
        p.post = mk(C);
        Tensor f1 = rng.tensor({1, C, h, w});
        Tensor f2 = rng.tensor({1, C, h, w});

        Tensor fused = iaaf_fuse(f1, f2, p);
        Tensor inter = iaaf_intersection(f1, f2, p);
        Tensor lhs = add(fused, inter);
        Tensor rhs = add(f1, f2);
        for (std::size_t j = 0; j < lhs.size(); ++j) {
            if (std::abs(lhs.data()[j] - rhs.data()[j]) > 1e-6f) {
                return "case " + std::to_string(i) + ": fused + intersection deviates from f1 + f2 by " +
                       format_err(std::abs(lhs.data()[j] - rhs.data()[j]));
            }
        }
    }

    // zero intersection weights: fuse must reproduce f1 + f2 exactly
    IAAFParams zero;
    auto zmk = [&](std::size_t ic) {
        ConvSpec s;
        s.out_channels = C;
        s.in_channels = ic;
        s.kernel_h = s.kernel_w = 3;
        s.pad_h = s.pad_w = 1;
        return ConvLayer{s, Tensor({C, ic, 3, 3}), Tensor({C})};
    };
    zero.pre = zmk(2 * C);
    zero.res0 = zmk(C);
    zero.res1 = zmk(C);
    zero.post = zmk(C);
    Tensor f1 = rng.tensor({1, C, 5, 5});
    Tensor f2 = rng.tensor({1, C, 5, 5});
    Tensor fused = iaaf_fuse(f1, f2, zero);
    Tensor expect = add(f1, f2);
    for (std::size_t j = 0; j < fused.size(); ++j) {
        if (fused.data()[j] != expect.data()[j]) return "zero-weight fuse is not exactly f1 + f2";
    }
    return "";
}

std::string check_dyt_contract(std::size_t samples) {
    Stream rng{0xD4D7ULL};
    for (std::size_t i = 0; i < samples; ++i) {
        DyTParams p;
        p.alpha = rng.symmetric() * 2.0f;
        const std::size_t C = rng.pick(1, 6);
        for (std::size_t c = 0; c < C; ++c) {
            p.gamma.push_back(rng.symmetric() * 3.0f);
            p.beta.push_back(rng.symmetric());
        }
        Tensor x = rng.tensor({rng.pick(1, 8), C});
        Tensor y = dyt_forward(x, p);

        // bound: |out - beta_c| <= |gamma_c|
        for (std::size_t r = 0; r < x.extent(0); ++r)
            for (std::size_t c = 0; c < C; ++c) {
                if (std::abs(y.at(r, c) - p.beta[c]) > std::abs(p.gamma[c]) + 1e-6f) {
                    return "bound violated at sample " + std::to_string(i);
                }
            }

        // locality: one perturbed input element changes exactly that output
        Tensor x2 = x;
        const std::size_t r0 = rng.pick(0, x.extent(0) - 1), c0 = rng.pick(0, C - 1);
        x2.at(r0, c0) += 0.5f;
        Tensor y2 = dyt_forward(x2, p);
        for (std::size_t r = 0; r < x.extent(0); ++r)
            for (std::size_t c = 0; c < C; ++c) {
                const bool same = y.at(r, c) == y2.at(r, c);
                if ((r == r0 && c == c0) ? false : !same) {
                    return "locality violated at sample " + std::to_string(i);
                }
            }

        // monotone in x when alpha*gamma > 0
        for (std::size_t c = 0; c < C; ++c) {
            if (p.alpha * p.gamma[c] <= 0.0f) continue;
            const float a = rng.symmetric() * 4.0f;
            const float b = a + 0.25f + rng.uniform();
            DyTParams single{p.alpha, {p.gamma[c]}, {p.beta[c]}};
            Tensor lo({1, 1}, {a}), hi({1, 1}, {b});
            if (dyt_forward(lo, single).at(0, 0) > dyt_forward(hi, single).at(0, 0)) {
                return "monotonicity violated at sample " + std::to_string(i);
            }
        }
    }
    return "";
}

std::string check_ycbcr_roundtrip(std::size_t pixels) {
    Stream rng{0xC0106ULL};
    for (const ColorCoeffs& coeffs : {ColorCoeffs::paper(), ColorCoeffs::bt601()}) {
        Tensor img({1, 3, 1, pixels});
        for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = rng.uniform();
        Tensor back = ycbcr_to_rgb(rgb_to_ycbcr(img, coeffs), coeffs);
        for (std::size_t i = 0; i < img.size(); ++i) {
            const float err = std::abs(back.data()[i] - img.data()[i]);
            if (err > 1e-5f) return "round trip error " + format_err(err) + " > 1e-5";
        }
    }
    return "";
}

std::string check_weight_roundtrip() {
    namespace fs = std::filesystem;
    // pid-tagged so concurrent test runners cannot race on the scratch file
    const fs::path path = fs::temp_directory_path() /
                          ("ethdr_selftest_weights_" + std::to_string(::getpid()) + ".bin");

    Stream rng{0x3E1A7ULL};
    WeightStore store;
    store.add("a.weight", rng.tensor({2, 3, 3, 3}));
    store.add("a.bias", rng.tensor({2}));
    store.add("b.gamma", rng.tensor({7}));
    save_weights(store, path.string());
    WeightStore loaded = load_weights(path.string());
    if (loaded.count() != store.count()) return "tensor count changed across round trip";
    for (std::size_t i = 0; i < store.count(); ++i) {
        const auto& [name, t] = store.items()[i];
        const auto& [name2, t2] = loaded.items()[i];
        if (name != name2 || t.shape() != t2.shape()) return "name/shape changed across round trip";
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (t.data()[j] != t2.data()[j]) return "values changed across round trip";
        }
    }

    // a known file, byte for byte: one 2x2 tensor named "a.b"
    static const unsigned char golden[] = {
        'E', 'H', 'D', 'R', 'W', 0x00,              // magic
        0x01, 0x00,                                  // version 1
        0x01, 0x00, 0x00, 0x00,                      // one tensor
        0x03, 0x00, 'a', '.', 'b',                   // name
        0x02,                                        // rank 2
        0x02, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00,
        0x00, 0x00, 0x80, 0x3F,                      // 1.0f
        0x00, 0x00, 0x00, 0x40,                      // 2.0f
        0x00, 0x00, 0x00, 0xBF,                      // -0.5f
        0x00, 0x00, 0x80, 0x3E,                      // 0.25f
    };
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f.write(reinterpret_cast<const char*>(golden), sizeof(golden));
    }
    WeightStore g = load_weights(path.string());
    const Tensor& t = g.get("a.b");
    const float want[4] = {1.0f, 2.0f, -0.5f, 0.25f};
    if (t.shape() != std::vector<std::size_t>{2, 2}) return "golden tensor shape wrong";
    for (int i = 0; i < 4; ++i) {
        if (t.data()[i] != want[i]) return "golden tensor values wrong";
    }

    // corrupted magic must be rejected
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f.write("XHDRW", 5);
    }
    try {
        load_weights(path.string());
        return "bad magic was accepted";
    } catch (const FormatError&) {
    }
    fs::remove(path);
    return "";
}

std::vector<SuiteResult> run_selftest(bool inject_conv_fault) {
    std::vector<SuiteResult> results;
    auto run = [&](const std::string& name, std::string failure) {
        results.push_back({name, failure.empty(), std::move(failure)});
    };
    run("conv-oracle", check_conv_fuzz(50, inject_conv_fault));
    run("msa-count", check_msa_count_sweep());
    run("iaaf-algebra", check_iaaf_algebra(20));
    run("dyt-contract", check_dyt_contract(1000));
    run("ycbcr-roundtrip", check_ycbcr_roundtrip(1000));
    run("weights-roundtrip", check_weight_roundtrip());
    return results;
}

}  // namespace ethdr

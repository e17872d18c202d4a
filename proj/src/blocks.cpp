#include "ethdr/blocks.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

namespace ethdr {

Tensor apply_conv(const ConvLayer& layer, const Tensor& x) {
    std::optional<Tensor> bias;
    if (!layer.bias.empty()) bias = layer.bias;
    return conv2d(x, layer.weight, bias, layer.spec);
}

Tensor linear_forward(const Tensor& x, const LinearLayer& layer) {
    Tensor out = matmul(x, transpose(layer.weight));
    if (!layer.bias.empty()) {
        const std::size_t rows = out.extent(0), cols = out.extent(1);
        if (layer.bias.size() != cols) throw ShapeError("linear bias length mismatch");
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) out.at(r, c) += layer.bias.data()[c];
    }
    return out;
}

Tensor dyt_forward(const Tensor& x, const DyTParams& p) {
    const std::size_t channels = x.rank() == 2 ? x.extent(1) : x.rank() == 4 ? x.extent(1) : 0;
    if (channels == 0) throw ShapeError("dyt_forward expects a 2-D token or 4-D NCHW tensor");
    if (p.gamma.size() != channels || p.beta.size() != channels) {
        throw ShapeError("dyt gamma/beta length " + std::to_string(p.gamma.size()) +
                         " does not match channel count " + std::to_string(channels));
    }
    Tensor out({x.shape()});
    if (x.rank() == 2) {
        const std::size_t rows = x.extent(0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < channels; ++c) {
                const double t = std::tanh(static_cast<double>(p.alpha) * x.at(r, c));
                out.at(r, c) = static_cast<float>(p.gamma[c] * t + p.beta[c]);
            }
    } else {
        const std::size_t N = x.extent(0), H = x.extent(2), W = x.extent(3);
        const std::size_t plane = H * W;
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t c = 0; c < channels; ++c) {
                const float* src = x.data() + (n * channels + c) * plane;
                float* dst = out.data() + (n * channels + c) * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    const double t = std::tanh(static_cast<double>(p.alpha) * src[i]);
                    dst[i] = static_cast<float>(p.gamma[c] * t + p.beta[c]);
                }
            }
    }
    return out;
}

Tensor se_forward(const Tensor& x, const SEParams& p) {
    if (x.rank() != 4) throw ShapeError("se_forward expects NCHW");
    const std::size_t N = x.extent(0), C = x.extent(1), H = x.extent(2), W = x.extent(3);
    if (p.ratio == 0 || C % p.ratio != 0) throw ShapeError("se_forward: ratio must divide channel count");
    const std::size_t mid = C / p.ratio;
    if (p.reduce_w.rank() != 2 || p.reduce_w.extent(0) != mid || p.reduce_w.extent(1) != C ||
        p.expand_w.rank() != 2 || p.expand_w.extent(0) != C || p.expand_w.extent(1) != mid) {
        throw ShapeError("se_forward weight shapes inconsistent with channel count");
    }
    const std::size_t plane = H * W;
    Tensor out({x.shape()});
    std::vector<float> pooled(C), hidden(mid), gate(C);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t c = 0; c < C; ++c) {
            const float* src = x.data() + (n * C + c) * plane;
            double acc = 0.0;
            for (std::size_t i = 0; i < plane; ++i) acc += src[i];
            pooled[c] = static_cast<float>(acc / static_cast<double>(plane));
        }
        for (std::size_t m = 0; m < mid; ++m) {
            float acc = p.reduce_b.empty() ? 0.0f : p.reduce_b.data()[m];
            for (std::size_t c = 0; c < C; ++c) acc += p.reduce_w.at(m, c) * pooled[c];
            hidden[m] = acc > 0.0f ? acc : 0.0f;
        }
        for (std::size_t c = 0; c < C; ++c) {
            float acc = p.expand_b.empty() ? 0.0f : p.expand_b.data()[c];
            for (std::size_t m = 0; m < mid; ++m) acc += p.expand_w.at(c, m) * hidden[m];
            gate[c] = static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(acc))));
        }
        for (std::size_t c = 0; c < C; ++c) {
            const float* src = x.data() + (n * C + c) * plane;
            float* dst = out.data() + (n * C + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] * gate[c];
        }
    }
    return out;
}

Tensor ire_forward(const Tensor& x, const IREParams& p) {
    Tensor t = apply_conv(p.expand, x);
    t = apply_conv(p.depthwise, t);
    t = se_forward(t, p.se);
    return apply_conv(p.project, t);
}

Tensor rprelu(const Tensor& x) {
    Tensor out({x.shape()});
    const float* src = x.data();
    float* dst = out.data();
    for (std::size_t i = 0; i < x.size(); ++i) dst[i] = src[i] > 0.0f ? src[i] : 0.25f * src[i];
    return out;
}

namespace {
Tensor emsdc_act(const Tensor& x, EmsdcAct kind) {
    return kind == EmsdcAct::Gelu ? activation(x, Act::Gelu) : rprelu(x);
}
}  // namespace

Tensor emsdc_increment(const Tensor& x, const EMSDCParams& p) {
    if (x.rank() != 4) throw ShapeError("emsdc expects NCHW");
    if (x.extent(1) % 4 != 0) {
        throw ShapeError("emsdc channel count " + std::to_string(x.extent(1)) + " not divisible by 4");
    }
    Tensor summed = emsdc_act(apply_conv(p.branches[0], x), p.act);
    summed = add(summed, emsdc_act(apply_conv(p.branches[1], x), p.act));
    summed = add(summed, emsdc_act(apply_conv(p.branches[2], x), p.act));
    return apply_conv(p.merge, summed);
}

Tensor emsdc_forward(const Tensor& x, const EMSDCParams& p) {
    return add(x, emsdc_increment(x, p));
}

Tensor msa_forward(const Tensor& tokens, const AttentionParams& p) {
    if (tokens.rank() != 2) throw ShapeError("msa_forward expects (tokens x C)");
    const std::size_t n = tokens.extent(0), C = tokens.extent(1);
    if (C != p.dim) throw ShapeError("msa_forward token dim does not match params");
    if (p.heads == 0 || C % p.heads != 0) throw ShapeError("msa_forward heads must divide dim");
    const std::size_t d = C / p.heads;
    const float scale = 1.0f / std::sqrt(static_cast<float>(d));

    using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Tensor qkv = linear_forward(tokens, p.qkv);  // n x 3C
    Tensor merged({n, C});
    Tensor q({n, d}), k({n, d}), v({n, d});
    // attention runs in row blocks so the score slab stays cache resident
    const std::size_t block = std::min<std::size_t>(n, 256);
    FloatBuffer score_buf(block * n);
    for (std::size_t h = 0; h < p.heads; ++h) {
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                q.at(r, c) = qkv.at(r, h * d + c) * scale;
                k.at(r, c) = qkv.at(r, C + h * d + c);
                v.at(r, c) = qkv.at(r, 2 * C + h * d + c);
            }
        }
        Eigen::Map<const RowMat> qm(q.data(), n, d), km(k.data(), n, d), vm(v.data(), n, d);
        Eigen::Map<RowMat> out(merged.data(), n, C);
        for (std::size_t r0 = 0; r0 < n; r0 += block) {
            const std::size_t rows = std::min(block, n - r0);
            Eigen::Map<RowMat> scores(score_buf.data(), rows, n);
            scores.noalias() = qm.middleRows(r0, rows) * km.transpose();
            for (std::size_t r = 0; r < rows; ++r) {
                auto row = scores.row(r).array();
                const float m = row.maxCoeff();
                row = (row - m).exp();
                row /= row.sum();
            }
            out.block(r0, h * d, rows, d).noalias() = scores * vm;
        }
    }
    return linear_forward(merged, p.out);
}

Tensor tokens_to_grid(const Tensor& tokens, std::size_t grid_h, std::size_t grid_w) {
    if (tokens.rank() != 2) throw ShapeError("tokens_to_grid expects (tokens x C)");
    if (tokens.extent(0) != grid_h * grid_w) {
        throw ShapeError("token count " + std::to_string(tokens.extent(0)) + " does not match grid " +
                         std::to_string(grid_h) + "x" + std::to_string(grid_w));
    }
    const std::size_t C = tokens.extent(1);
    Tensor grid({1, C, grid_h, grid_w});
    for (std::size_t y = 0; y < grid_h; ++y)
        for (std::size_t x = 0; x < grid_w; ++x)
            for (std::size_t c = 0; c < C; ++c) grid.at(0, c, y, x) = tokens.at(y * grid_w + x, c);
    return grid;
}

Tensor grid_to_tokens(const Tensor& grid) {
    if (grid.rank() != 4 || grid.extent(0) != 1) throw ShapeError("grid_to_tokens expects 1xCxHxW");
    const std::size_t C = grid.extent(1), H = grid.extent(2), W = grid.extent(3);
    Tensor tokens({H * W, C});
    for (std::size_t y = 0; y < H; ++y)
        for (std::size_t x = 0; x < W; ++x)
            for (std::size_t c = 0; c < C; ++c) tokens.at(y * W + x, c) = grid.at(0, c, y, x);
    return tokens;
}

Tensor lce_forward(const Tensor& tokens, std::size_t grid_h, std::size_t grid_w,
                   const LCEParams& p) {
    Tensor g = tokens_to_grid(tokens, grid_h, grid_w);
    g = apply_conv(p.dw, g);
    g = activation(g, Act::Gelu);
    g = apply_conv(p.pw, g);
    g = se_forward(g, p.channel_gate);
    return grid_to_tokens(g);
}

Tensor cavit_block_forward(const Tensor& tokens, std::size_t grid_h, std::size_t grid_w,
                           const CAViTBlockParams& p) {
    Tensor y = add(tokens, msa_forward(dyt_forward(tokens, p.dyt1), p.attn));
    y = add(y, lce_forward(tokens, grid_h, grid_w, p.lce));

    Tensor hidden = activation(linear_forward(dyt_forward(y, p.dyt2), p.mlp.fc0), Act::Gelu);
    Tensor z = add(y, linear_forward(hidden, p.mlp.fc1));

    const Tensor& mixer_in = p.attach == EmsdcAttach::Input ? tokens : z;
    Tensor inc = emsdc_increment(tokens_to_grid(mixer_in, grid_h, grid_w), p.emsdc);
    return add(z, grid_to_tokens(inc));
}

Tensor iaaf_intersection(const Tensor& fa, const Tensor& fb, const IAAFParams& p) {
    if (!fa.same_shape(fb)) {
        throw ShapeError("iaaf inputs differ: " + fa.shape_str() + " vs " + fb.shape_str());
    }
    Tensor t = apply_conv(p.pre, concat_channels({fa, fb}));
    Tensor r = add(t, apply_conv(p.res1, activation(apply_conv(p.res0, t), Act::Gelu)));
    return apply_conv(p.post, r);
}

Tensor iaaf_fuse(const Tensor& f1, const Tensor& f2, const IAAFParams& p) {
    return sub(add(f1, f2), iaaf_intersection(f1, f2, p));
}

}  // namespace ethdr

#include "ethdr/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

namespace ethdr {

namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using MapConst = Eigen::Map<const RowMat>;

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

void check_extents(const std::vector<std::size_t>& shape) {
    if (shape.empty()) throw ShapeError("tensor shape must have at least one extent");
    for (std::size_t e : shape) {
        if (e == 0) throw ShapeError("tensor extents must all be >= 1");
    }
}

void validate_conv_args(const Tensor& input, const Tensor& weights,
                        const std::optional<Tensor>& bias, const ConvSpec& spec) {
    if (input.rank() != 4) throw ShapeError("conv2d input must be NCHW, got rank " + std::to_string(input.rank()));
    if (weights.rank() != 4) throw ShapeError("conv2d weights must be rank 4");
    if (spec.kernel_h < 1 || spec.kernel_w < 1 || spec.stride_h < 1 || spec.stride_w < 1 ||
        spec.dilation_h < 1 || spec.dilation_w < 1 || spec.groups < 1) {
        throw ShapeError("conv2d kernel/stride/dilation/groups extents must be >= 1");
    }
    if (spec.in_channels % spec.groups != 0 || spec.out_channels % spec.groups != 0) {
        throw ShapeError("conv2d groups must divide in_channels and out_channels");
    }
    if (input.extent(1) != spec.in_channels) {
        throw ShapeError("conv2d input has " + std::to_string(input.extent(1)) +
                         " channels, spec expects " + std::to_string(spec.in_channels));
    }
    const std::size_t icpg = spec.in_channels / spec.groups;
    if (weights.extent(0) != spec.out_channels || weights.extent(1) != icpg ||
        weights.extent(2) != spec.kernel_h || weights.extent(3) != spec.kernel_w) {
        throw ShapeError("conv2d weights shape " + weights.shape_str() +
                         " does not match spec (out, in/groups, kh, kw)");
    }
    if (bias && (bias->rank() != 1 || bias->extent(0) != spec.out_channels)) {
        throw ShapeError("conv2d bias must have one entry per output channel");
    }
}

float gelu_exact(float x) {
    // x * Phi(x), Phi from the error function
    const double d = static_cast<double>(x);
    return static_cast<float>(d * 0.5 * (1.0 + std::erf(d * 0.7071067811865475244)));
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    check_extents(shape_);
    data_.assign(shape_product(shape_), 0.0f);
}

Tensor::Tensor(std::vector<std::size_t> shape, const std::vector<float>& values)
    : shape_(std::move(shape)), data_(values.begin(), values.end()) {
    check_extents(shape_);
    if (shape_product(shape_) != data_.size()) {
        throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str());
    }
}

Tensor Tensor::from_buffer(std::vector<std::size_t> shape, FloatBuffer values) {
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(values);
    check_extents(t.shape_);
    if (shape_product(t.shape_) != t.data_.size()) {
        throw ShapeError("tensor data length " + std::to_string(t.data_.size()) +
                         " does not match shape " + t.shape_str());
    }
    return t;
}

Tensor Tensor::full(std::vector<std::size_t> shape, float value) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

float& Tensor::at(std::size_t r, std::size_t c) {
    return data_[r * shape_[1] + c];
}
float Tensor::at(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
}
float& Tensor::at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) {
    return data_[((n * shape_[1] + c) * shape_[2] + y) * shape_[3] + x];
}
float Tensor::at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[((n * shape_[1] + c) * shape_[2] + y) * shape_[3] + x];
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << 'x';
        os << shape_[i];
    }
    return os.str();
}

std::pair<std::size_t, std::size_t> conv_output_dims(const ConvSpec& spec,
                                                     std::size_t in_h, std::size_t in_w) {
    const std::int64_t eff_kh = static_cast<std::int64_t>(spec.dilation_h) * (spec.kernel_h - 1) + 1;
    const std::int64_t eff_kw = static_cast<std::int64_t>(spec.dilation_w) * (spec.kernel_w - 1) + 1;
    const std::int64_t oh = (static_cast<std::int64_t>(in_h) + 2 * spec.pad_h - eff_kh) / static_cast<std::int64_t>(spec.stride_h) + 1;
    const std::int64_t ow = (static_cast<std::int64_t>(in_w) + 2 * spec.pad_w - eff_kw) / static_cast<std::int64_t>(spec.stride_w) + 1;
    if (oh < 1 || ow < 1) {
        throw ShapeError("conv2d output would be empty for input " + std::to_string(in_h) +
                         "x" + std::to_string(in_w));
    }
    return {static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)};
}

Tensor conv2d(const Tensor& input, const Tensor& weights,
              const std::optional<Tensor>& bias, const ConvSpec& spec) {
    validate_conv_args(input, weights, bias, spec);
    const std::size_t N = input.extent(0), H = input.extent(2), W = input.extent(3);
    const auto [oh, ow] = conv_output_dims(spec, H, W);
    const std::size_t icpg = spec.in_channels / spec.groups;
    const std::size_t ocpg = spec.out_channels / spec.groups;
    const std::size_t khw = spec.kernel_h * spec.kernel_w;

    Tensor out({N, spec.out_channels, oh, ow});

    const bool depthwise = spec.groups == spec.in_channels && spec.groups == spec.out_channels;
    if (depthwise) {
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t c = 0; c < spec.out_channels; ++c) {
                const float* w = weights.data() + c * khw;
                const float b = bias ? bias->data()[c] : 0.0f;
                for (std::size_t oy = 0; oy < oh; ++oy) {
                    const std::int64_t iy0 = static_cast<std::int64_t>(oy * spec.stride_h) - spec.pad_h;
                    for (std::size_t ox = 0; ox < ow; ++ox) {
                        const std::int64_t ix0 = static_cast<std::int64_t>(ox * spec.stride_w) - spec.pad_w;
                        float acc = b;
                        for (std::size_t ky = 0; ky < spec.kernel_h; ++ky) {
                            const std::int64_t iy = iy0 + static_cast<std::int64_t>(ky * spec.dilation_h);
                            if (iy < 0 || iy >= static_cast<std::int64_t>(H)) continue;
                            for (std::size_t kx = 0; kx < spec.kernel_w; ++kx) {
                                const std::int64_t ix = ix0 + static_cast<std::int64_t>(kx * spec.dilation_w);
                                if (ix < 0 || ix >= static_cast<std::int64_t>(W)) continue;
                                acc += input.at(n, c, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix)) *
                                       w[ky * spec.kernel_w + kx];
                            }
                        }
                        out.at(n, c, oy, ox) = acc;
                    }
                }
            }
        }
        return out;
    }

    const bool plain_1x1 = spec.kernel_h == 1 && spec.kernel_w == 1 && spec.stride_h == 1 &&
                           spec.stride_w == 1 && spec.pad_h == 0 && spec.pad_w == 0;
    const std::size_t cols = oh * ow;
    const std::size_t patch_rows = icpg * khw;
    FloatBuffer patches;
    if (!plain_1x1) patches.resize(patch_rows * cols);

    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t g = 0; g < spec.groups; ++g) {
            const float* in_base = input.data() + (n * spec.in_channels + g * icpg) * H * W;
            const float* patch_ptr = in_base;
            if (!plain_1x1) {
                // im2col: one row per (in-channel, tap), one column per output pixel
                for (std::size_t ci = 0; ci < icpg; ++ci) {
                    const float* plane = in_base + ci * H * W;
                    for (std::size_t ky = 0; ky < spec.kernel_h; ++ky) {
                        for (std::size_t kx = 0; kx < spec.kernel_w; ++kx) {
                            float* row = patches.data() + ((ci * spec.kernel_h + ky) * spec.kernel_w + kx) * cols;
                            for (std::size_t oy = 0; oy < oh; ++oy) {
                                const std::int64_t iy = static_cast<std::int64_t>(oy * spec.stride_h) -
                                                        spec.pad_h + ky * spec.dilation_h;
                                float* dst = row + oy * ow;
                                if (iy < 0 || iy >= static_cast<std::int64_t>(H)) {
                                    std::fill(dst, dst + ow, 0.0f);
                                    continue;
                                }
                                const float* src = plane + static_cast<std::size_t>(iy) * W;
                                for (std::size_t ox = 0; ox < ow; ++ox) {
                                    const std::int64_t ix = static_cast<std::int64_t>(ox * spec.stride_w) -
                                                            spec.pad_w + kx * spec.dilation_w;
                                    dst[ox] = (ix < 0 || ix >= static_cast<std::int64_t>(W))
                                                  ? 0.0f
                                                  : src[static_cast<std::size_t>(ix)];
                                }
                            }
                        }
                    }
                }
                patch_ptr = patches.data();
            }

            MapConst wmat(weights.data() + g * ocpg * patch_rows, ocpg, patch_rows);
            MapConst pmat(patch_ptr, patch_rows, cols);
            MapMat omat(out.data() + (n * spec.out_channels + g * ocpg) * cols, ocpg, cols);
            omat.noalias() = wmat * pmat;
        }
        if (bias) {
            for (std::size_t c = 0; c < spec.out_channels; ++c) {
                float* dst = out.data() + (n * spec.out_channels + c) * cols;
                const float b = bias->data()[c];
                for (std::size_t i = 0; i < cols; ++i) dst[i] += b;
            }
        }
    }
    return out;
}

Tensor conv2d_oracle(const Tensor& input, const Tensor& weights,
                     const std::optional<Tensor>& bias, const ConvSpec& spec,
                     std::uint64_t* mul_count) {
    // Checks duplicated from conv2d on purpose: the oracle stands alone.
    if (input.rank() != 4 || weights.rank() != 4) throw ShapeError("conv2d_oracle expects rank-4 input and weights");
    if (spec.groups < 1 || spec.in_channels % spec.groups != 0 || spec.out_channels % spec.groups != 0) {
        throw ShapeError("conv2d_oracle groups must divide channel counts");
    }
    if (input.extent(1) != spec.in_channels) throw ShapeError("conv2d_oracle channel mismatch");
    const std::size_t icpg = spec.in_channels / spec.groups;
    if (weights.extent(0) != spec.out_channels || weights.extent(1) != icpg ||
        weights.extent(2) != spec.kernel_h || weights.extent(3) != spec.kernel_w) {
        throw ShapeError("conv2d_oracle weight shape mismatch");
    }
    if (bias && (bias->rank() != 1 || bias->extent(0) != spec.out_channels)) {
        throw ShapeError("conv2d_oracle bias shape mismatch");
    }

    const std::size_t N = input.extent(0), H = input.extent(2), W = input.extent(3);
    const auto [oh, ow] = conv_output_dims(spec, H, W);
    Tensor out({N, spec.out_channels, oh, ow});

    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t oc = 0; oc < spec.out_channels; ++oc) {
            const std::size_t g = oc / (spec.out_channels / spec.groups);
            for (std::size_t oy = 0; oy < oh; ++oy) {
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    float acc = bias ? bias->data()[oc] : 0.0f;
                    for (std::size_t ci = 0; ci < icpg; ++ci) {
                        const std::size_t ic = g * icpg + ci;
                        for (std::size_t ky = 0; ky < spec.kernel_h; ++ky) {
                            for (std::size_t kx = 0; kx < spec.kernel_w; ++kx) {
                                const std::int64_t iy = static_cast<std::int64_t>(oy * spec.stride_h) -
                                                        spec.pad_h + ky * spec.dilation_h;
                                const std::int64_t ix = static_cast<std::int64_t>(ox * spec.stride_w) -
                                                        spec.pad_w + kx * spec.dilation_w;
                                const bool inside = iy >= 0 && iy < static_cast<std::int64_t>(H) &&
                                                    ix >= 0 && ix < static_cast<std::int64_t>(W);
                                const float v = inside ? input.at(n, ic, static_cast<std::size_t>(iy),
                                                                  static_cast<std::size_t>(ix))
                                                       : 0.0f;
                                acc += v * weights.at(oc, ci, ky, kx);
                                if (mul_count) ++*mul_count;
                            }
                        }
                    }
                    out.at(n, oc, oy, ox) = acc;
                }
            }
        }
    }
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) throw ShapeError("matmul expects 2-D tensors");
    if (a.extent(1) != b.extent(0)) {
        throw ShapeError("matmul inner dims disagree: " + a.shape_str() + " vs " + b.shape_str());
    }
    Tensor out({a.extent(0), b.extent(1)});
    MapConst am(a.data(), a.extent(0), a.extent(1));
    MapConst bm(b.data(), b.extent(0), b.extent(1));
    MapMat om(out.data(), out.extent(0), out.extent(1));
    om.noalias() = am * bm;
    return out;
}

Tensor transpose(const Tensor& a) {
    if (a.rank() != 2) throw ShapeError("transpose expects a 2-D tensor");
    Tensor out({a.extent(1), a.extent(0)});
    for (std::size_t r = 0; r < a.extent(0); ++r)
        for (std::size_t c = 0; c < a.extent(1); ++c) out.at(c, r) = a.at(r, c);
    return out;
}

Tensor softmax_rows(const Tensor& x) {
    if (x.rank() != 2) throw ShapeError("softmax_rows expects a 2-D tensor");
    const std::size_t rows = x.extent(0), cols = x.extent(1);
    Tensor out({rows, cols});
    for (std::size_t r = 0; r < rows; ++r) {
        Eigen::Map<const Eigen::ArrayXf> row(x.data() + r * cols, cols);
        Eigen::Map<Eigen::ArrayXf> dst(out.data() + r * cols, cols);
        const float m = row.maxCoeff();
        dst = (row - m).exp();
        dst /= dst.sum();
    }
    return out;
}

Tensor activation(const Tensor& x, Act kind) {
    Tensor out({x.shape()});
    const float* src = x.data();
    float* dst = out.data();
    const std::size_t n = x.size();
    switch (kind) {
        case Act::Gelu:
            for (std::size_t i = 0; i < n; ++i) dst[i] = gelu_exact(src[i]);
            break;
        case Act::Tanh:
            for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<float>(std::tanh(static_cast<double>(src[i])));
            break;
        case Act::Sigmoid:
            for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(src[i]))));
            break;
        case Act::Relu:
            for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] > 0.0f ? src[i] : 0.0f;
            break;
        default:
            throw ShapeError("unknown activation kind");
    }
    return out;
}

Tensor resize_bilinear(const Tensor& x, std::size_t out_h, std::size_t out_w) {
    if (x.rank() != 4) throw ShapeError("resize_bilinear expects NCHW");
    if (out_h < 1 || out_w < 1) throw ShapeError("resize_bilinear output dims must be >= 1");
    const std::size_t N = x.extent(0), C = x.extent(1), H = x.extent(2), W = x.extent(3);
    Tensor out({N, C, out_h, out_w});

    const double sy = static_cast<double>(H) / static_cast<double>(out_h);
    const double sx = static_cast<double>(W) / static_cast<double>(out_w);
    std::vector<std::size_t> y0(out_h), y1(out_h), x0(out_w), x1(out_w);
    std::vector<float> fy(out_h), fx(out_w);
    for (std::size_t oy = 0; oy < out_h; ++oy) {
        double src = (oy + 0.5) * sy - 0.5;
        src = std::min(std::max(src, 0.0), static_cast<double>(H - 1));
        y0[oy] = static_cast<std::size_t>(src);
        y1[oy] = std::min(y0[oy] + 1, H - 1);
        fy[oy] = static_cast<float>(src - static_cast<double>(y0[oy]));
    }
    for (std::size_t ox = 0; ox < out_w; ++ox) {
        double src = (ox + 0.5) * sx - 0.5;
        src = std::min(std::max(src, 0.0), static_cast<double>(W - 1));
        x0[ox] = static_cast<std::size_t>(src);
        x1[ox] = std::min(x0[ox] + 1, W - 1);
        fx[ox] = static_cast<float>(src - static_cast<double>(x0[ox]));
    }

    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t c = 0; c < C; ++c) {
            const float* plane = x.data() + (n * C + c) * H * W;
            float* dst = out.data() + (n * C + c) * out_h * out_w;
            for (std::size_t oy = 0; oy < out_h; ++oy) {
                const float* r0 = plane + y0[oy] * W;
                const float* r1 = plane + y1[oy] * W;
                const float ty = fy[oy];
                for (std::size_t ox = 0; ox < out_w; ++ox) {
                    const float tx = fx[ox];
                    const float top = r0[x0[ox]] * (1.0f - tx) + r0[x1[ox]] * tx;
                    const float bot = r1[x0[ox]] * (1.0f - tx) + r1[x1[ox]] * tx;
                    dst[oy * out_w + ox] = top * (1.0f - ty) + bot * ty;
                }
            }
        }
    }
    return out;
}

Tensor pad_reflect(const Tensor& x, std::size_t pad_h, std::size_t pad_w) {
    if (x.rank() != 4) throw ShapeError("pad_reflect expects NCHW");
    const std::size_t N = x.extent(0), C = x.extent(1), H = x.extent(2), W = x.extent(3);
    if (pad_h >= H || pad_w >= W) {
        throw ShapeError("pad_reflect pad (" + std::to_string(pad_h) + "," + std::to_string(pad_w) +
                         ") too large for " + std::to_string(H) + "x" + std::to_string(W));
    }
    const std::size_t OH = H + 2 * pad_h, OW = W + 2 * pad_w;
    Tensor out({N, C, OH, OW});
    auto reflect = [](std::int64_t i, std::int64_t n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
        return static_cast<std::size_t>(i);
    };
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t y = 0; y < OH; ++y) {
                const std::size_t sy = reflect(static_cast<std::int64_t>(y) - static_cast<std::int64_t>(pad_h),
                                               static_cast<std::int64_t>(H));
                for (std::size_t xx = 0; xx < OW; ++xx) {
                    const std::size_t sx = reflect(static_cast<std::int64_t>(xx) - static_cast<std::int64_t>(pad_w),
                                                   static_cast<std::int64_t>(W));
                    out.at(n, c, y, xx) = x.at(n, c, sy, sx);
                }
            }
    return out;
}

namespace {
Tensor zip(const Tensor& a, const Tensor& b, float (*op)(float, float), const char* name) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(name) + " shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    }
    Tensor out({a.shape()});
    const float* pa = a.data();
    const float* pb = b.data();
    float* po = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) po[i] = op(pa[i], pb[i]);
    return out;
}
}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    return zip(a, b, [](float x, float y) { return x + y; }, "add");
}
Tensor sub(const Tensor& a, const Tensor& b) {
    return zip(a, b, [](float x, float y) { return x - y; }, "sub");
}
Tensor mul(const Tensor& a, const Tensor& b) {
    return zip(a, b, [](float x, float y) { return x * y; }, "mul");
}

Tensor concat_channels(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_channels needs at least one tensor");
    const std::size_t N = parts[0].extent(0), H = parts[0].extent(2), W = parts[0].extent(3);
    std::size_t total_c = 0;
    for (const Tensor& t : parts) {
        if (t.rank() != 4) throw ShapeError("concat_channels expects NCHW tensors");
        if (t.extent(0) != N || t.extent(2) != H || t.extent(3) != W) {
            throw ShapeError("concat_channels N/H/W mismatch: " + parts[0].shape_str() + " vs " + t.shape_str());
        }
        total_c += t.extent(1);
    }
    Tensor out({N, total_c, H, W});
    const std::size_t plane = H * W;
    for (std::size_t n = 0; n < N; ++n) {
        std::size_t c_off = 0;
        for (const Tensor& t : parts) {
            const std::size_t tc = t.extent(1);
            std::memcpy(out.data() + (n * total_c + c_off) * plane,
                        t.data() + n * tc * plane, tc * plane * sizeof(float));
            c_off += tc;
        }
    }
    return out;
}

Tensor crop(const Tensor& x, std::size_t top, std::size_t left,
            std::size_t height, std::size_t width) {
    if (x.rank() != 4) throw ShapeError("crop expects NCHW");
    const std::size_t N = x.extent(0), C = x.extent(1), H = x.extent(2), W = x.extent(3);
    if (height < 1 || width < 1 || top + height > H || left + width > W) {
        throw ShapeError("crop window out of bounds");
    }
    Tensor out({N, C, height, width});
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t y = 0; y < height; ++y) {
                std::memcpy(out.data() + ((n * C + c) * height + y) * width,
                            x.data() + ((n * C + c) * H + top + y) * W + left,
                            width * sizeof(float));
            }
    return out;
}

bool all_finite(const Tensor& x) {
    const float* p = x.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(p[i])) return false;
    }
    return true;
}

}  // namespace ethdr

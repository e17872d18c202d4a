#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ethdr {

// Thrown on any dimension/extent violation.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 64-byte-aligned storage. SIMD reductions pick their loop splits from the
// address, so a fixed alignment is what makes results a pure function of
// shape and data rather than of where the allocator happened to put things.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::size_t kAlign = 64;

    AlignedAllocator() = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) {}

    T* allocate(std::size_t n) {
        if (n == 0) return nullptr;
        const std::size_t bytes = (n * sizeof(T) + kAlign - 1) / kAlign * kAlign;
        void* p = std::aligned_alloc(kAlign, bytes);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { std::free(p); }

    template <typename U>
    bool operator==(const AlignedAllocator<U>&) const {
        return true;
    }
};

using FloatBuffer = std::vector<float, AlignedAllocator<float>>;

/// Dense row-major float32 tensor. Image-like data is NCHW; matrices are 2-D.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);  // zero-filled
    Tensor(std::vector<std::size_t> shape, const std::vector<float>& values);

    static Tensor full(std::vector<std::size_t> shape, float value);
    // adopts an aligned buffer without copying
    static Tensor from_buffer(std::vector<std::size_t> shape, FloatBuffer values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    const FloatBuffer& values() const { return data_; }

    // 2-D access
    float& at(std::size_t r, std::size_t c);
    float at(std::size_t r, std::size_t c) const;
    // 4-D NCHW access
    float& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x);
    float at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    FloatBuffer data_;
};

/// Grouped/dilated/strided 2-D convolution description. Padding is zero-fill.
struct ConvSpec {
    std::size_t out_channels = 1;
    std::size_t in_channels = 1;
    std::size_t kernel_h = 1, kernel_w = 1;
    std::size_t stride_h = 1, stride_w = 1;
    std::size_t dilation_h = 1, dilation_w = 1;
    std::size_t groups = 1;
    std::size_t pad_h = 0, pad_w = 0;
};

/// Output spatial extents for `spec` applied to an in_h x in_w input.
std::pair<std::size_t, std::size_t> conv_output_dims(const ConvSpec& spec,
                                                     std::size_t in_h,
                                                     std::size_t in_w);

// Weights are (out_channels, in_channels/groups, kh, kw); bias is per output channel.
Tensor conv2d(const Tensor& input, const Tensor& weights,
              const std::optional<Tensor>& bias, const ConvSpec& spec);

// Reference convolution: direct summation, one tap at a time, no shortcuts.
// Every kernel tap is multiplied (padded taps against an explicit zero); when
// `mul_count` is given it is incremented once per scalar multiply.
Tensor conv2d_oracle(const Tensor& input, const Tensor& weights,
                     const std::optional<Tensor>& bias, const ConvSpec& spec,
                     std::uint64_t* mul_count = nullptr);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// Row-wise softmax with row-max stabilization.
Tensor softmax_rows(const Tensor& x);

enum class Act { Gelu, Tanh, Sigmoid, Relu };

// Elementwise activation. GELU is the exact Gaussian-CDF form x * Phi(x).
Tensor activation(const Tensor& x, Act kind);

// Bilinear resampling with half-pixel centers (align_corners = false).
Tensor resize_bilinear(const Tensor& x, std::size_t out_h, std::size_t out_w);

// Mirror padding without edge duplication; pad amounts must be < the extent.
Tensor pad_reflect(const Tensor& x, std::size_t pad_h, std::size_t pad_w);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor concat_channels(const std::vector<Tensor>& parts);
Tensor crop(const Tensor& x, std::size_t top, std::size_t left,
            std::size_t height, std::size_t width);

bool all_finite(const Tensor& x);

}  // namespace ethdr

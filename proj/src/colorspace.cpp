#include "ethdr/colorspace.hpp"

namespace ethdr {

namespace {
void check_rgb(const Tensor& img, const char* op) {
    if (img.rank() != 4 || img.extent(1) != 3) {
        throw ShapeError(std::string(op) + " expects an Nx3xHxW tensor, got " + img.shape_str());
    }
}
}  // namespace

Tensor rgb_to_ycbcr(const Tensor& img, const ColorCoeffs& coeffs) {
    check_rgb(img, "rgb_to_ycbcr");
    const std::size_t N = img.extent(0), H = img.extent(2), W = img.extent(3);
    const std::size_t plane = H * W;
    Tensor out({N, 3, H, W});
    for (std::size_t n = 0; n < N; ++n) {
        const float* r = img.data() + (n * 3 + 0) * plane;
        const float* g = img.data() + (n * 3 + 1) * plane;
        const float* b = img.data() + (n * 3 + 2) * plane;
        float* y = out.data() + (n * 3 + 0) * plane;
        float* cb = out.data() + (n * 3 + 1) * plane;
        float* cr = out.data() + (n * 3 + 2) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            const float luma = coeffs.wr * r[i] + coeffs.wg * g[i] + coeffs.wb * b[i];
            y[i] = luma;
            cb[i] = b[i] - luma;
            cr[i] = r[i] - luma;
        }
    }
    return out;
}

Tensor ycbcr_to_rgb(const Tensor& img, const ColorCoeffs& coeffs) {
    check_rgb(img, "ycbcr_to_rgb");
    if (coeffs.wg == 0.0f) throw ShapeError("ycbcr_to_rgb requires wg > 0");
    const std::size_t N = img.extent(0), H = img.extent(2), W = img.extent(3);
    const std::size_t plane = H * W;
    Tensor out({N, 3, H, W});
    for (std::size_t n = 0; n < N; ++n) {
        const float* y = img.data() + (n * 3 + 0) * plane;
        const float* cb = img.data() + (n * 3 + 1) * plane;
        const float* cr = img.data() + (n * 3 + 2) * plane;
        float* r = out.data() + (n * 3 + 0) * plane;
        float* g = out.data() + (n * 3 + 1) * plane;
        float* b = out.data() + (n * 3 + 2) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            r[i] = cr[i] + y[i];
            b[i] = cb[i] + y[i];
            g[i] = (y[i] - coeffs.wr * r[i] - coeffs.wb * b[i]) / coeffs.wg;
        }
    }
    return out;
}

}  // namespace ethdr

#pragma once

#include "ethdr/tensor.hpp"

namespace ethdr {

/// Luminance weights for the YCbCr channel prior.
struct ColorCoeffs {
    float wr, wg, wb;

    // Default mode: Y = 0.299 R + 0.287 G + 0.11 B. The green weight is
    // deliberately non-standard; weights sum to 0.696.
    static ColorCoeffs paper() { return {0.299f, 0.287f, 0.11f}; }
    // Standard BT.601 luma weights, for sanity comparisons.
    static ColorCoeffs bt601() { return {0.299f, 0.587f, 0.114f}; }
};

// Channels in: R, G, B. Channels out: Y, Cb = B - Y, Cr = R - Y.
Tensor rgb_to_ycbcr(const Tensor& img, const ColorCoeffs& coeffs);

// Exact algebraic inverse: R = Cr + Y, B = Cb + Y, G = (Y - wr*R - wb*B) / wg.
Tensor ycbcr_to_rgb(const Tensor& img, const ColorCoeffs& coeffs);

}  // namespace ethdr

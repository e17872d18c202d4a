#pragma once

#include "ethdr/tensor.hpp"

#include <array>
#include <vector>

namespace ethdr {

/// A convolution with bound weights. Empty bias means no bias term.
struct ConvLayer {
    ConvSpec spec;
    Tensor weight;
    Tensor bias;
};

Tensor apply_conv(const ConvLayer& layer, const Tensor& x);

/// Token-wise affine map. weight is (out x in), bias is (out).
struct LinearLayer {
    Tensor weight;
    Tensor bias;
};

Tensor linear_forward(const Tensor& x, const LinearLayer& layer);

// ---------------------------------------------------------------------------
// Dynamic Tanh: gamma_c * tanh(alpha * x) + beta_c, no batch statistics.
// ---------------------------------------------------------------------------
struct DyTParams {
    float alpha = 0.5f;
    std::vector<float> gamma;
    std::vector<float> beta;
};

// Channel axis is axis 1 for NCHW tensors and the column axis for 2-D tokens.
Tensor dyt_forward(const Tensor& x, const DyTParams& p);

// ---------------------------------------------------------------------------
// Squeeze-and-excitation channel gate.
// ---------------------------------------------------------------------------
struct SEParams {
    Tensor reduce_w;  // (C/r x C)
    Tensor reduce_b;  // (C/r)
    Tensor expand_w;  // (C x C/r)
    Tensor expand_b;  // (C)
    std::size_t ratio = 4;
};

// pool -> reduce -> ReLU -> expand -> sigmoid -> per-channel gate on x
Tensor se_forward(const Tensor& x, const SEParams& p);

// ---------------------------------------------------------------------------
// Inverted Residual Embedding: 1x1 expand, strided 3x3 depthwise, SE, 1x1 project.
// ---------------------------------------------------------------------------
struct IREParams {
    ConvLayer expand;
    ConvLayer depthwise;
    SEParams se;
    ConvLayer project;
    std::size_t expansion_ratio = 6;
    std::size_t stride = 2;
};

Tensor ire_forward(const Tensor& x, const IREParams& p);

// ---------------------------------------------------------------------------
// Enhanced Multi-Scale Dilated Convolution: three grouped 3x3 branches at
// dilations 1/3/5 (groups = 4), activated, summed, merged by 1x1, residual.
// ---------------------------------------------------------------------------
enum class EmsdcAct { Gelu, RPRelu };

struct EMSDCParams {
    std::array<ConvLayer, 3> branches;  // dilation 1, 3, 5 with matching padding
    ConvLayer merge;
    EmsdcAct act = EmsdcAct::Gelu;
};

// Only the convolutional increment (merge of activated branches), without x.
Tensor emsdc_increment(const Tensor& x, const EMSDCParams& p);
// x + increment
Tensor emsdc_forward(const Tensor& x, const EMSDCParams& p);

// ---------------------------------------------------------------------------
// Multi-head self-attention over tokens, global, scale 1/sqrt(C/heads).
// ---------------------------------------------------------------------------
struct AttentionParams {
    std::size_t dim = 0;
    std::size_t heads = 1;
    LinearLayer qkv;  // C -> 3C
    LinearLayer out;  // C -> C
};

Tensor msa_forward(const Tensor& tokens, const AttentionParams& p);

// ---------------------------------------------------------------------------
// Local Context Extractor: depthwise 3x3 over the token grid, GELU, 1x1, SE gate.
// ---------------------------------------------------------------------------
struct LCEParams {
    ConvLayer dw;
    ConvLayer pw;
    SEParams channel_gate;
};

Tensor lce_forward(const Tensor& tokens, std::size_t grid_h, std::size_t grid_w,
                   const LCEParams& p);

// ---------------------------------------------------------------------------
// Context-aware transformer block.
// ---------------------------------------------------------------------------
struct MlpParams {
    LinearLayer fc0;
    LinearLayer fc1;
};

enum class EmsdcAttach { Input, Output };

struct CAViTBlockParams {
    DyTParams dyt1, dyt2;
    AttentionParams attn;
    LCEParams lce;
    MlpParams mlp;
    EMSDCParams emsdc;
    EmsdcAttach attach = EmsdcAttach::Input;
};

// y = x + MSA(DyT1(x)) + LCE(x); z = y + MLP(DyT2(y));
// out = z + emsdc_increment(x or z, depending on the attach point)
Tensor cavit_block_forward(const Tensor& tokens, std::size_t grid_h, std::size_t grid_w,
                           const CAViTBlockParams& p);

// ---------------------------------------------------------------------------
// Intersection-Aware Adaptive Fusion.
// ---------------------------------------------------------------------------
struct IAAFParams {
    ConvLayer pre;      // 2C -> C, 3x3
    ConvLayer res0;     // C -> C, 3x3
    ConvLayer res1;     // C -> C, 3x3
    ConvLayer post;     // C -> C, 3x3
};

// post(resblock(pre(concat(fa, fb)))) where resblock(t) = t + res1(gelu(res0(t)))
Tensor iaaf_intersection(const Tensor& fa, const Tensor& fb, const IAAFParams& p);
// f1 + f2 - intersection(f1, f2)
Tensor iaaf_fuse(const Tensor& f1, const Tensor& f2, const IAAFParams& p);

// Token layout helpers: token t = y * grid_w + x.
Tensor tokens_to_grid(const Tensor& tokens, std::size_t grid_h, std::size_t grid_w);
Tensor grid_to_tokens(const Tensor& grid);

// Fixed-shape RPReLU stand-in used by the E-MSDC activation ablation flag.
Tensor rprelu(const Tensor& x);

}  // namespace ethdr

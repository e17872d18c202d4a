#pragma once

#include "ethdr/model.hpp"
#include "ethdr/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ethdr {

enum class CostKind { Conv, Linear, Attention, Elementwise };

/// One accounted layer. MACs are the primitive; FLOPs are reported as 2x.
struct LayerCost {
    std::string name;
    std::uint64_t macs = 0;
    std::uint64_t flops = 0;
    std::uint64_t params = 0;
    CostKind kind = CostKind::Conv;
};

struct CostReport {
    std::vector<LayerCost> layers;
    std::uint64_t total_macs = 0;
    std::uint64_t total_flops = 0;
    std::uint64_t total_params = 0;
    std::uint64_t elementwise_macs = 0;  // subtotal, so it can be excluded
    ModelConfig config;
    std::size_t input_h = 0, input_w = 0;    // as requested
    std::size_t padded_h = 0, padded_w = 0;  // after stride alignment
};

struct AttentionDims {
    std::size_t h = 1, w = 1, c = 1;
};

// MSA cost: macs = 4*h*w*C^2 + 2*(h*w)^2*C; params = 4C^2 + 4C.
LayerCost count_msa(const AttentionDims& dims);

// The two terms of the MSA cost: projections (linear in hw) and the
// attention matmuls (quadratic in hw).
struct MsaTerms {
    std::uint64_t linear_macs = 0;
    std::uint64_t quadratic_macs = 0;
};
MsaTerms count_msa_terms(const AttentionDims& dims);

// macs = oh*ow*out_c*(in_c/groups)*kh*kw; params add one bias per out channel.
LayerCost count_conv(const ConvSpec& spec, std::size_t out_h, std::size_t out_w);

// Static walk of the full forward pipeline. Parameter totals match the
// WeightStore element count for the same config exactly.
CostReport count_model(const ModelConfig& cfg, std::size_t input_h, std::size_t input_w);

struct VariantDelta {
    double macs_pct = 0.0;    // vs the first config
    double params_pct = 0.0;
};

struct VariantComparison {
    std::vector<CostReport> reports;
    std::vector<VariantDelta> deltas;  // deltas[0] is always 0/0
};

VariantComparison compare_variants(const std::vector<ModelConfig>& cfgs,
                                   std::size_t input_h, std::size_t input_w);

std::string render_report_text(const CostReport& report);
std::string render_report_tsv(const CostReport& report);
std::string render_comparison_text(const VariantComparison& cmp);

std::string variant_name(Variant v);

}  // namespace ethdr

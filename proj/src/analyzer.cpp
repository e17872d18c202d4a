#include "ethdr/analyzer.hpp"

#include <iomanip>
#include <sstream>

namespace ethdr {

LayerCost count_msa(const AttentionDims& dims) {
    const MsaTerms t = count_msa_terms(dims);
    const std::uint64_t c = dims.c;
    LayerCost cost;
    cost.name = "msa";
    cost.kind = CostKind::Attention;
    cost.macs = t.linear_macs + t.quadratic_macs;
    cost.flops = 2 * cost.macs;
    cost.params = 4 * c * c + 4 * c;  // qkv and out projections, with biases
    return cost;
}

MsaTerms count_msa_terms(const AttentionDims& dims) {
    const std::uint64_t hw = static_cast<std::uint64_t>(dims.h) * dims.w;
    const std::uint64_t c = dims.c;
    return {4 * hw * c * c, 2 * hw * hw * c};
}

LayerCost count_conv(const ConvSpec& spec, std::size_t out_h, std::size_t out_w) {
    const std::uint64_t fan_in = static_cast<std::uint64_t>(spec.in_channels / spec.groups) *
                                 spec.kernel_h * spec.kernel_w;
    LayerCost cost;
    cost.kind = CostKind::Conv;
    cost.macs = static_cast<std::uint64_t>(out_h) * out_w * spec.out_channels * fan_in;
    cost.flops = 2 * cost.macs;
    cost.params = spec.out_channels * fan_in + spec.out_channels;
    return cost;
}

namespace {

struct Walk {
    CostReport report;

    void push(LayerCost cost, std::string name) {
        cost.name = std::move(name);
        cost.flops = 2 * cost.macs;
        report.total_macs += cost.macs;
        report.total_flops += cost.flops;
        report.total_params += cost.params;
        if (cost.kind == CostKind::Elementwise) report.elementwise_macs += cost.macs;
        report.layers.push_back(std::move(cost));
    }

    void conv(const std::string& name, std::size_t oc, std::size_t ic, std::size_t k,
              std::size_t groups, std::size_t out_h, std::size_t out_w) {
        ConvSpec s;
        s.out_channels = oc;
        s.in_channels = ic;
        s.kernel_h = s.kernel_w = k;
        s.groups = groups;
        push(count_conv(s, out_h, out_w), name);
    }

    void linear(const std::string& name, std::size_t tokens, std::size_t in, std::size_t out) {
        LayerCost c;
        c.kind = CostKind::Linear;
        c.macs = static_cast<std::uint64_t>(tokens) * in * out;
        c.params = static_cast<std::uint64_t>(out) * in + out;
        push(c, name);
    }

    void elementwise(const std::string& name, std::uint64_t macs, std::uint64_t params = 0) {
        LayerCost c;
        c.kind = CostKind::Elementwise;
        c.macs = macs;
        c.params = params;
        push(c, name);
    }

    // pool + two channel-mixing layers + activations + gate multiply
    void se(const std::string& name, std::size_t ch, std::uint64_t hw) {
        const std::size_t mid = ch / kSeRatio;
        linear(name + ".reduce", 1, ch, mid);
        linear(name + ".expand", 1, mid, ch);
        elementwise(name + ".gate", ch * hw + mid + ch + ch * hw);
    }
};

}  // namespace

CostReport count_model(const ModelConfig& cfg, std::size_t input_h, std::size_t input_w) {
    validate_config(cfg);
    const std::size_t s = cfg.ire_stride;
    const std::size_t H = input_h + (s - input_h % s) % s;
    const std::size_t W = input_w + (s - input_w % s) % s;
    const std::uint64_t hw = static_cast<std::uint64_t>(H) * W;

    const std::size_t C = cfg.base_channels;
    const std::size_t D = cfg.embed_dim;
    const std::size_t CC = transformer_input_channels(cfg);
    const std::size_t E = kIreExpansion * CC;
    const std::size_t mD = cfg.mlp_ratio * D;
    const std::size_t gh = H / s, gw = W / s;
    const std::uint64_t n_tok = static_cast<std::uint64_t>(gh) * gw;

    Walk w;
    w.report.config = cfg;
    w.report.input_h = input_h;
    w.report.input_w = input_w;
    w.report.padded_h = H;
    w.report.padded_w = W;

    // 3 multiplies for Y plus the two chroma differences, per pixel, per frame
    w.elementwise("color.ycbcr", 3 * 5 * hw);

    for (const char* stem : {"stem.over", "stem.normal", "stem.under"}) w.conv(stem, C, 3, 3, 1, H, W);

    for (const char* br : {"iaaf.over", "iaaf.under"}) {
        const std::string base = br;
        w.conv(base + ".pre", C, 2 * C, 3, 1, H, W);
        w.conv(base + ".res.conv0", C, C, 3, 1, H, W);
        w.elementwise(base + ".res.gelu", C * hw);
        w.conv(base + ".res.conv1", C, C, 3, 1, H, W);
        w.elementwise(base + ".res.add", C * hw);
        w.conv(base + ".post", C, C, 3, 1, H, W);
        w.elementwise(base + ".fuse", 2 * C * hw);  // f1 + f2 - intersection
    }

    w.conv("ire.expand", E, CC, 1, 1, H, W);
    w.conv("ire.dw", E, E, 3, E, gh, gw);
    w.se("ire.se", E, n_tok);
    w.conv("ire.project", D, E, 1, 1, gh, gw);

    for (std::size_t i = 0; i < cfg.num_blocks; ++i) {
        const std::string b = "block" + std::to_string(i);
        w.elementwise(b + ".dyt1", 3 * n_tok * D, 2 * D + 1);
        LayerCost msa = count_msa({gh, gw, D});
        w.push(msa, b + ".attn");
        w.elementwise(b + ".attn.softmax", 3 * cfg.heads * n_tok * n_tok + n_tok * D);
        w.conv(b + ".lce.dw", D, D, 3, D, gh, gw);
        w.elementwise(b + ".lce.gelu", n_tok * D);
        w.conv(b + ".lce.pw", D, D, 1, 1, gh, gw);
        w.se(b + ".lce.se", D, n_tok);
        w.elementwise(b + ".add1", 2 * n_tok * D);
        w.elementwise(b + ".dyt2", 3 * n_tok * D, 2 * D + 1);
        w.linear(b + ".mlp.fc0", n_tok, D, mD);
        w.elementwise(b + ".mlp.gelu", n_tok * mD);
        w.linear(b + ".mlp.fc1", n_tok, mD, D);
        w.elementwise(b + ".add2", n_tok * D);
        w.conv(b + ".emsdc.branch1", D, D, 3, 4, gh, gw);
        w.conv(b + ".emsdc.branch3", D, D, 3, 4, gh, gw);
        w.conv(b + ".emsdc.branch5", D, D, 3, 4, gh, gw);
        w.elementwise(b + ".emsdc.act_sum", 3 * n_tok * D + 2 * n_tok * D);
        w.conv(b + ".emsdc.merge", D, D, 1, 1, gh, gw);
        w.elementwise(b + ".emsdc.add", n_tok * D);
    }

    w.elementwise("recon.upsample", 4 * D * hw);
    w.conv("recon.conv0", C, D, 3, 1, H, W);
    w.elementwise("recon.skip_add", C * hw);
    w.elementwise("recon.gelu", C * hw);
    w.conv("recon.conv1", 3, C, 3, 1, H, W);
    w.elementwise("recon.sigmoid", 3 * hw);

    return w.report;
}

VariantComparison compare_variants(const std::vector<ModelConfig>& cfgs,
                                   std::size_t input_h, std::size_t input_w) {
    if (cfgs.size() < 2) throw FormatError("compare_variants needs at least two configs");
    VariantComparison cmp;
    for (const ModelConfig& cfg : cfgs) cmp.reports.push_back(count_model(cfg, input_h, input_w));
    const CostReport& base = cmp.reports.front();
    for (const CostReport& r : cmp.reports) {
        VariantDelta d;
        d.macs_pct = 100.0 * (static_cast<double>(r.total_macs) - static_cast<double>(base.total_macs)) /
                     static_cast<double>(base.total_macs);
        d.params_pct = 100.0 * (static_cast<double>(r.total_params) - static_cast<double>(base.total_params)) /
                       static_cast<double>(base.total_params);
        cmp.deltas.push_back(d);
    }
    return cmp;
}

std::string variant_name(Variant v) { return v == Variant::Main ? "main" : "lite"; }

std::string render_report_text(const CostReport& r) {
    std::ostringstream os;
    os << "cost report: variant=" << variant_name(r.config.variant)
       << " C=" << r.config.base_channels << " embed=" << r.config.embed_dim
       << " blocks=" << r.config.num_blocks << " heads=" << r.config.heads
       << " stride=" << r.config.ire_stride << " input=" << r.input_h << "x" << r.input_w
       << " (padded " << r.padded_h << "x" << r.padded_w << ")\n";
    os << "units: multiply-accumulates (MACs); FLOPs = 2*MACs; elementwise rows\n"
       << "count tanh/GELU/sigmoid as 1, DyT as 3, softmax as 3 per element.\n";
    os << std::left << std::setw(26) << "layer" << std::right << std::setw(16) << "macs"
       << std::setw(16) << "flops" << std::setw(12) << "params" << "\n";
    for (const LayerCost& l : r.layers) {
        os << std::left << std::setw(26) << l.name << std::right << std::setw(16) << l.macs
           << std::setw(16) << l.flops << std::setw(12) << l.params << "\n";
    }
    os << std::left << std::setw(26) << "TOTAL" << std::right << std::setw(16) << r.total_macs
       << std::setw(16) << r.total_flops << std::setw(12) << r.total_params << "\n";
    os << std::left << std::setw(26) << "  of which elementwise" << std::right << std::setw(16)
       << r.elementwise_macs << std::setw(16) << 2 * r.elementwise_macs << std::setw(12) << 0 << "\n";
    os << std::fixed << std::setprecision(4) << "totals: " << static_cast<double>(r.total_macs) / 1e9
       << " GMACs, " << static_cast<double>(r.total_flops) / 1e9 << " GFLOPs, "
       << std::setprecision(3) << static_cast<double>(r.total_params) / 1e6 << " M params\n";
    return os.str();
}

std::string render_report_tsv(const CostReport& r) {
    std::ostringstream os;
    for (const LayerCost& l : r.layers) {
        os << l.name << '\t' << l.macs << '\t' << l.flops << '\t' << l.params << '\n';
    }
    os << "TOTAL\t" << r.total_macs << '\t' << r.total_flops << '\t' << r.total_params << '\n';
    return os.str();
}

namespace {
std::string config_label(const ModelConfig& cfg) {
    return variant_name(cfg.variant) + "/s" + std::to_string(cfg.ire_stride);
}
}  // namespace

std::string render_comparison_text(const VariantComparison& cmp) {
    std::ostringstream os;
    os << "variant comparison (deltas vs " << config_label(cmp.reports[0].config) << ")\n";
    os << std::left << std::setw(10) << "config" << std::right << std::setw(16) << "macs"
       << std::setw(12) << "params" << std::setw(12) << "macs %" << std::setw(12) << "params %"
       << "\n";
    for (std::size_t i = 0; i < cmp.reports.size(); ++i) {
        const CostReport& r = cmp.reports[i];
        os << std::left << std::setw(10) << config_label(r.config) << std::right
           << std::setw(16) << r.total_macs << std::setw(12) << r.total_params << std::fixed
           << std::setprecision(2) << std::setw(11) << cmp.deltas[i].macs_pct << "%" << std::setw(11)
           << cmp.deltas[i].params_pct << "%\n";
    }
    return os.str();
}

}  // namespace ethdr

// ethdr — multi-exposure HDR fusion, complexity reports, quality metrics.
//
// Exit codes: 0 success, 1 failed selftest or internal error, 2 I/O or
// config error, 3 shape mismatch, 4 weight-file format error.

#include "CLI11.hpp"

#include "ethdr/analyzer.hpp"
#include "ethdr/config.hpp"
#include "ethdr/image_io.hpp"
#include "ethdr/metrics.hpp"
#include "ethdr/model.hpp"
#include "ethdr/selftest.hpp"

#include <chrono>
#include <iostream>

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct FuseArgs {
    std::string under, normal, over, weights, config, out;
    std::uint64_t seed = 42;
    std::size_t tile = 128, overlap = 16;
};

ethdr::Tensor load_ldr(const std::string& path) {
    ethdr::Tensor img = ethdr::read_image(path);
    bool clamped = false;
    for (std::size_t i = 0; i < img.size(); ++i) {
        float& v = img.data()[i];
        if (v < 0.0f || v > 1.0f) {
            v = std::min(std::max(v, 0.0f), 1.0f);
            clamped = true;
        }
    }
    if (clamped) std::cerr << "note: clamped " << path << " into [0,1]\n";
    return img;
}

int cmd_fuse(const FuseArgs& args) {
    auto t0 = Clock::now();
    ethdr::ExposureStack stack;
    stack.under = load_ldr(args.under);
    stack.normal = load_ldr(args.normal);
    stack.over = load_ldr(args.over);
    std::cerr << "[fuse] load images: " << ms_since(t0) << " ms\n";

    t0 = Clock::now();
    const ethdr::ModelConfig cfg =
        args.config.empty() ? ethdr::ModelConfig{} : ethdr::load_config(args.config);
    ethdr::Model model = args.weights.empty()
                             ? ethdr::Model::build(cfg, args.seed)
                             : ethdr::Model::from_weights(cfg, ethdr::load_weights(args.weights));
    std::cerr << "[fuse] build model: " << ms_since(t0) << " ms\n";

    t0 = Clock::now();
    ethdr::Tensor fused = model.fuse_tiled(stack, args.tile, args.overlap);
    std::cerr << "[fuse] forward: " << ms_since(t0) << " ms\n";

    t0 = Clock::now();
    ethdr::write_pfm(args.out, fused);
    std::cerr << "[fuse] write output: " << ms_since(t0) << " ms\n";
    return 0;
}

int cmd_analyze(const std::string& config, const std::string& variant, std::size_t height,
                std::size_t width, const std::string& format) {
    ethdr::ModelConfig cfg = config.empty() ? ethdr::ModelConfig{} : ethdr::load_config(config);
    std::vector<ethdr::ModelConfig> cfgs;
    if (variant == "main" || variant == "lite") {
        cfg.variant = variant == "main" ? ethdr::Variant::Main : ethdr::Variant::Lite;
        cfgs.push_back(cfg);
    } else {
        cfg.variant = ethdr::Variant::Main;
        cfgs.push_back(cfg);
        cfg.variant = ethdr::Variant::Lite;
        cfgs.push_back(cfg);
    }

    std::vector<ethdr::CostReport> reports;
    for (const auto& c : cfgs) reports.push_back(ethdr::count_model(c, height, width));

    if (format == "tsv") {
        for (const auto& r : reports) {
            if (reports.size() > 1) std::cout << "# variant=" << ethdr::variant_name(r.config.variant) << "\n";
            std::cout << ethdr::render_report_tsv(r);
        }
    } else {
        for (const auto& r : reports) std::cout << ethdr::render_report_text(r) << "\n";
        if (cfgs.size() > 1) {
            std::cout << ethdr::render_comparison_text(ethdr::compare_variants(cfgs, height, width));
        }
    }
    return 0;
}

int cmd_metrics(const std::string& fused_path, const std::string& reference_path, double mu,
                const std::string& format) {
    ethdr::Tensor fused = ethdr::read_image(fused_path);
    ethdr::Tensor reference = ethdr::read_image(reference_path);
    if (!fused.same_shape(reference)) {
        throw ethdr::ShapeError("metrics shape mismatch: fused " + fused.shape_str() +
                                " vs reference " + reference.shape_str());
    }
    // HDR references arrive at arbitrary scale; normalize by the reference max.
    float ref_max = 0.0f;
    for (std::size_t i = 0; i < reference.size(); ++i) ref_max = std::max(ref_max, reference.data()[i]);
    if (ref_max > 1.0f) {
        std::cerr << "note: normalizing both images by the reference max " << ref_max << "\n";
        for (std::size_t i = 0; i < reference.size(); ++i) reference.data()[i] /= ref_max;
        for (std::size_t i = 0; i < fused.size(); ++i) fused.data()[i] /= ref_max;
    }

    ethdr::MuLawConfig mu_cfg;
    mu_cfg.mu = mu;
    const ethdr::MetricReport rep = ethdr::evaluate_pair(fused, reference, mu_cfg, ethdr::SSIMConfig{});
    std::cout << (format == "tsv" ? ethdr::render_metrics_tsv(rep) : ethdr::render_metrics_text(rep));
    return 0;
}

int cmd_selftest(bool inject_conv_fault) {
    const std::vector<ethdr::SuiteResult> results = ethdr::run_selftest(inject_conv_fault);
    bool all_pass = true;
    for (const ethdr::SuiteResult& r : results) {
        std::cout << r.name << ": " << (r.pass ? "PASS" : "FAIL");
        if (!r.pass) std::cout << " — " << r.detail;
        std::cout << "\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

int cmd_convert(const std::string& in, const std::string& out) {
    const ethdr::Tensor img = ethdr::read_image(in);
    if (out.size() >= 4 && out.substr(out.size() - 4) == ".pfm") {
        ethdr::write_pfm(out, img);
    } else if (out.size() >= 4 && out.substr(out.size() - 4) == ".ppm") {
        ethdr::write_ppm(out, img);
    } else {
        throw ethdr::IoError("convert: output must end in .ppm or .pfm: " + out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EfficienT-HDR fusion and analysis"};
    app.require_subcommand(1);

    FuseArgs fuse;
    CLI::App* fuse_cmd = app.add_subcommand("fuse", "fuse three LDR exposures into an HDR image");
    fuse_cmd->add_option("--under", fuse.under, "under-exposed image (PPM/PFM)")->required();
    fuse_cmd->add_option("--normal", fuse.normal, "normally exposed image")->required();
    fuse_cmd->add_option("--over", fuse.over, "over-exposed image")->required();
    fuse_cmd->add_option("--weights", fuse.weights, "weight file (default: seeded init)");
    fuse_cmd->add_option("--config", fuse.config, "model config file");
    fuse_cmd->add_option("--seed", fuse.seed, "init seed when no weights are given");
    fuse_cmd->add_option("--out", fuse.out, "output PFM path")->required();
    fuse_cmd->add_option("--tile", fuse.tile, "tile size for large images");
    fuse_cmd->add_option("--overlap", fuse.overlap, "tile overlap in pixels");

    std::string an_config, an_variant = "both", an_format = "text";
    std::size_t an_h = 128, an_w = 128;
    CLI::App* an_cmd = app.add_subcommand("analyze", "static MAC/FLOP/parameter report");
    an_cmd->add_option("--config", an_config, "model config file");
    an_cmd->add_option("--variant", an_variant, "main, lite, or both")
        ->check(CLI::IsMember({"main", "lite", "both"}));
    an_cmd->add_option("--height", an_h, "input height");
    an_cmd->add_option("--width", an_w, "input width");
    an_cmd->add_option("--format", an_format, "text or tsv")->check(CLI::IsMember({"text", "tsv"}));

    std::string m_fused, m_reference, m_format = "text";
    double m_mu = 5000.0;
    CLI::App* m_cmd = app.add_subcommand("metrics", "PSNR/SSIM in linear and mu-law domains");
    m_cmd->add_option("--fused", m_fused, "fused image (PFM)")->required();
    m_cmd->add_option("--reference", m_reference, "reference image (PFM)")->required();
    m_cmd->add_option("--mu", m_mu, "mu-law constant");
    m_cmd->add_option("--format", m_format, "text or tsv")->check(CLI::IsMember({"text", "tsv"}));

    bool inject_conv_fault = false;
    CLI::App* st_cmd = app.add_subcommand("selftest", "run the invariant suites");
    st_cmd->add_flag("--inject-conv-fault", inject_conv_fault, "corrupt a conv kernel (test hook)")
        ->group("");  // hidden

    std::string cv_in, cv_out;
    CLI::App* cv_cmd = app.add_subcommand("convert", "convert between PPM and PFM");
    cv_cmd->add_option("--in", cv_in, "input image")->required();
    cv_cmd->add_option("--out", cv_out, "output image (.ppm or .pfm)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fuse_cmd->parsed()) return cmd_fuse(fuse);
        if (an_cmd->parsed()) return cmd_analyze(an_config, an_variant, an_h, an_w, an_format);
        if (m_cmd->parsed()) return cmd_metrics(m_fused, m_reference, m_mu, m_format);
        if (st_cmd->parsed()) return cmd_selftest(inject_conv_fault);
        if (cv_cmd->parsed()) return cmd_convert(cv_in, cv_out);
    } catch (const ethdr::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ethdr::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ethdr::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ethdr::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

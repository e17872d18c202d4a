// Acceptance suite: runs every contract the project promises, one line each.
// Usage: acceptance [path-to-ethdr-cli]

#include "ethdr/analyzer.hpp"
#include "ethdr/colorspace.hpp"
#include "ethdr/image_io.hpp"
#include "ethdr/metrics.hpp"
#include "ethdr/model.hpp"
#include "ethdr/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ethdr;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, const std::function<std::string()>& body) {
    const auto t0 = Clock::now();
    std::string failure;
    try {
        failure = body();
    } catch (const std::exception& e) {
        failure = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    char line[256];
    std::snprintf(line, sizeof(line), "[%2d] %-28s %s (%.2f s)", number, name.c_str(),
                  failure.empty() ? "PASS" : "FAIL", secs);
    std::cout << line << "\n";
    if (!failure.empty()) {
        std::cout << "     " << failure << "\n";
        ++g_failures;
    }
}

std::string check_time(double secs, double limit) {
    if (secs > limit) {
        std::ostringstream os;
        os << "took " << secs << " s, limit " << limit << " s";
        return os.str();
    }
    return "";
}

ExposureStack random_stack(std::size_t h, std::size_t w, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    auto img = [&] {
        Tensor t({1, 3, h, w});
        for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
        return t;
    };
    ExposureStack s;
    s.under = img();
    s.normal = img();
    s.over = img();
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";

    criterion(1, "msa-count-exact", [] {
        const auto t0 = Clock::now();
        std::string failure = check_msa_count_sweep();
        if (!failure.empty()) return failure;
        return check_time(std::chrono::duration<double>(Clock::now() - t0).count(), 10.0);
    });

    criterion(2, "ire-stride-reduction", [] {
        ModelConfig s1, s2;
        s1.ire_stride = 1;
        s2.ire_stride = 2;
        const CostReport r1 = count_model(s1, 128, 128);
        const CostReport r2 = count_model(s2, 128, 128);
        const double reduction =
            100.0 * (1.0 - static_cast<double>(r2.total_macs) / static_cast<double>(r1.total_macs));
        if (reduction < 55.0) {
            return "stride-2 cuts total MACs by only " + std::to_string(reduction) + "%";
        }
        const MsaTerms q1 = count_msa_terms({128, 128, s1.embed_dim});
        const MsaTerms q2 = count_msa_terms({64, 64, s2.embed_dim});
        if (q1.quadratic_macs != 16 * q2.quadratic_macs) {
            return std::string("attention quadratic term is not exactly 16x smaller");
        }
        return std::string();
    });

    criterion(3, "variant-ordering-and-params", [] {
        ModelConfig main_cfg, lite_cfg;
        lite_cfg.variant = Variant::Lite;
        const CostReport m = count_model(main_cfg, 128, 128);
        const CostReport l = count_model(lite_cfg, 128, 128);
        if (l.total_macs >= m.total_macs) return std::string("lite MACs are not below main");
        if (l.total_params >= m.total_params) return std::string("lite params are not below main");
        if (m.total_params != Model::build(main_cfg, 42).weights().total_elements()) {
            return std::string("main param total does not equal the weight store element count");
        }
        if (l.total_params != Model::build(lite_cfg, 42).weights().total_elements()) {
            return std::string("lite param total does not equal the weight store element count");
        }
        return std::string();
    });

    criterion(4, "conv-oracle-equivalence", [] {
        const auto t0 = Clock::now();
        std::string failure = check_conv_fuzz(50, /*inject_conv_fault=*/false);
        if (!failure.empty()) return failure;
        return check_time(std::chrono::duration<double>(Clock::now() - t0).count(), 30.0);
    });

    criterion(5, "iaaf-algebra", [] { return check_iaaf_algebra(20); });

    criterion(6, "dyt-contract", [] { return check_dyt_contract(1000); });

    criterion(7, "color-prior", [] {
        std::string failure = check_ycbcr_roundtrip(1000);
        if (!failure.empty()) return failure;
        Tensor white({1, 3, 1, 1}, {1.0f, 1.0f, 1.0f});
        const Tensor out = rgb_to_ycbcr(white, ColorCoeffs::paper());
        if (std::abs(out.data()[0] - 0.696f) > 1e-6f) {
            return "white luma is " + std::to_string(out.data()[0]) + ", expected 0.696";
        }
        return std::string();
    });

    criterion(8, "end-to-end-smoke", [] {
        const ModelConfig cfg;  // main variant, desk-scale defaults
        Model model = Model::build(cfg, 42);
        ExposureStack stack = random_stack(128, 128, 42);

        const auto t0 = Clock::now();
        Tensor out = model.forward(stack);
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

        if (out.shape() != std::vector<std::size_t>{1, 3, 128, 128}) {
            return "output shape is " + out.shape_str();
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            const float v = out.data()[i];
            if (!(v >= 0.0f && v <= 1.0f)) return std::string("output leaves [0,1]");
            if (v != 0.5f) return std::string("zero-initialized head did not yield the 0.5 image");
        }
        Tensor again = model.forward(stack);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out.data()[i] != again.data()[i]) return std::string("forward is not bit-stable");
        }
        return check_time(secs, 5.0);
    });

    criterion(9, "metrics-known-answers", [] {
        // the formula itself is exact in double arithmetic
        if (10.0 * std::log10(1.0 / 0.01) != 20.0) return std::string("PSNR formula is off at mse 0.01");
        Tensor zero = Tensor::full({1, 3, 8, 8}, 0.0f);
        Tensor tenth = Tensor::full({1, 3, 8, 8}, 0.1f);
        const double p = psnr(zero, tenth, 1.0);
        // 0.1 is not representable in float; allow the quantization residue
        if (std::abs(p - 20.0) > 1e-5) return "psnr(mse=0.01) = " + std::to_string(p);

        std::mt19937 rng(17);
        std::uniform_real_distribution<float> dist(0.0f, 1.0f);
        Tensor img({1, 1, 16, 16});
        for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = dist(rng);
        if (std::abs(ssim(img, img, SSIMConfig{}) - 1.0) > 1e-9) {
            return std::string("ssim(a,a) is not 1");
        }

        MuLawConfig mu;
        Tensor ends({1, 1, 1, 2}, {0.0f, 1.0f});
        Tensor mapped = mu_law(ends, mu);
        if (mapped.data()[0] != 0.0f || mapped.data()[1] != 1.0f) {
            return std::string("mu-law endpoints moved");
        }
        Tensor half({1, 1, 1, 1}, {0.5f});
        const double v = mu_law(half, mu).data()[0];
        if (std::abs(v - 0.91866) > 1e-4) return "mu_law(0.5) = " + std::to_string(v);
        return std::string();
    });

    criterion(10, "formats-and-selftest", [&cli] {
        // weight container round trip, bit for bit
        const fs::path wpath = fs::temp_directory_path() / "ethdr_acceptance_weights.bin";
        ModelConfig small;
        small.base_channels = 4;
        small.embed_dim = 8;
        small.num_blocks = 1;
        small.heads = 2;
        Model m = Model::build(small, 5);
        save_weights(m.weights(), wpath.string());
        WeightStore loaded = load_weights(wpath.string());
        if (loaded.count() != m.weights().count()) return std::string("weight round trip lost tensors");
        for (std::size_t i = 0; i < loaded.count(); ++i) {
            const auto& [name, t] = m.weights().items()[i];
            const auto& [name2, t2] = loaded.items()[i];
            if (name != name2 || t.shape() != t2.shape()) return std::string("weight round trip changed layout");
            for (std::size_t j = 0; j < t.size(); ++j) {
                if (t.data()[j] != t2.data()[j]) return std::string("weight round trip changed bits");
            }
        }
        fs::remove(wpath);

        // golden bytes and magic rejection live in the selftest check
        std::string failure = check_weight_roundtrip();
        if (!failure.empty()) return failure;

        // PFM round trip, bit for bit
        const fs::path ppath = fs::temp_directory_path() / "ethdr_acceptance.pfm";
        std::mt19937 rng(19);
        std::uniform_real_distribution<float> dist(-4.0f, 4.0f);
        Tensor img({1, 3, 11, 7});
        for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = dist(rng);
        write_pfm(ppath.string(), img);
        Tensor back = read_pfm(ppath.string());
        for (std::size_t i = 0; i < img.size(); ++i) {
            if (back.data()[i] != img.data()[i]) return std::string("PFM round trip changed bits");
        }
        fs::remove(ppath);

        // the CLI selftest must pass, quickly
        if (cli.empty()) return std::string("pass the ethdr binary path as argv[1]");
        const auto t0 = Clock::now();
        const int status = std::system(("\"" + cli + "\" selftest > " +
                                        (fs::temp_directory_path() / "ethdr_selftest_out.txt").string())
                                           .c_str());
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        if (code != 0) return "selftest exited with " + std::to_string(code);
        return check_time(secs, 60.0);
    });

    std::cout << (g_failures == 0 ? "ACCEPTANCE: ALL CRITERIA PASS"
                                  : "ACCEPTANCE: " + std::to_string(g_failures) + " CRITERIA FAILED")
              << "\n";
    return g_failures == 0 ? 0 : 1;
}

#include "ethdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

namespace ethdr {

namespace {

constexpr double kPsnrCap = 99.0;

void check_same(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + " shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    }
}

// sign-preserving power so structure terms below zero stay meaningful
double signed_pow(double v, double e) {
    if (e == 1.0) return v;
    return std::copysign(std::pow(std::abs(v), e), v);
}

}  // namespace

double mse(const Tensor& a, const Tensor& b) {
    check_same(a, b, "mse");
    double acc = 0.0;
    const float* pa = a.data();
    const float* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr(const Tensor& a, const Tensor& b, double max_val) {
    check_same(a, b, "psnr");
    if (max_val <= 0.0) throw ShapeError("psnr max_val must be > 0");
    const double err = mse(a, b);
    if (err == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(max_val * max_val / err));
}

Tensor mu_law(const Tensor& x, const MuLawConfig& cfg) {
    if (cfg.mu <= 0.0) throw ShapeError("mu_law: mu must be > 0");
    const double denom = std::log1p(cfg.mu);
    Tensor out({x.shape()});
    const float* src = x.data();
    float* dst = out.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = std::clamp(static_cast<double>(src[i]), 0.0, 1.0);
        dst[i] = static_cast<float>(std::log1p(cfg.mu * v) / denom);
    }
    return out;
}

Tensor mu_law_inverse(const Tensor& y, const MuLawConfig& cfg) {
    if (cfg.mu <= 0.0) throw ShapeError("mu_law_inverse: mu must be > 0");
    const double lg = std::log1p(cfg.mu);
    Tensor out({y.shape()});
    const float* src = y.data();
    float* dst = out.data();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double v = std::clamp(static_cast<double>(src[i]), 0.0, 1.0);
        dst[i] = static_cast<float>(std::expm1(v * lg) / cfg.mu);
    }
    return out;
}

double ssim(const Tensor& a, const Tensor& b, const SSIMConfig& cfg) {
    check_same(a, b, "ssim");
    if (a.rank() != 4) throw ShapeError("ssim expects NCHW tensors");
    if (cfg.window < 1 || cfg.sigma <= 0.0) throw ShapeError("ssim window/sigma must be positive");
    if (cfg.alpha <= 0.0 || cfg.beta <= 0.0 || cfg.gamma <= 0.0) {
        throw ShapeError("ssim exponents must be > 0");
    }
    const std::size_t N = a.extent(0), C = a.extent(1), H = a.extent(2), W = a.extent(3);
    const std::size_t win = static_cast<std::size_t>(cfg.window);
    if (H < win || W < win) {
        throw ShapeError("ssim image " + a.shape_str() + " smaller than the " +
                         std::to_string(win) + "-pixel window");
    }

    std::vector<double> kernel(win * win);
    {
        const double half = (static_cast<double>(win) - 1.0) / 2.0;
        double sum = 0.0;
        for (std::size_t y = 0; y < win; ++y)
            for (std::size_t x = 0; x < win; ++x) {
                const double dy = static_cast<double>(y) - half;
                const double dx = static_cast<double>(x) - half;
                const double v = std::exp(-(dy * dy + dx * dx) / (2.0 * cfg.sigma * cfg.sigma));
                kernel[y * win + x] = v;
                sum += v;
            }
        for (double& v : kernel) v /= sum;  // normalized to sum 1
    }

    const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);
    const double c3 = c2 / 2.0;

    double channel_sum = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t c = 0; c < C; ++c) {
            const float* pa = a.data() + (n * C + c) * H * W;
            const float* pb = b.data() + (n * C + c) * H * W;
            double acc = 0.0;
            std::size_t windows = 0;
            for (std::size_t y = 0; y + win <= H; ++y) {
                for (std::size_t x = 0; x + win <= W; ++x) {
                    double ma = 0.0, mb = 0.0, maa = 0.0, mbb = 0.0, mab = 0.0;
                    for (std::size_t ky = 0; ky < win; ++ky)
                        for (std::size_t kx = 0; kx < win; ++kx) {
                            const double wgt = kernel[ky * win + kx];
                            const double va = pa[(y + ky) * W + (x + kx)];
                            const double vb = pb[(y + ky) * W + (x + kx)];
                            ma += wgt * va;
                            mb += wgt * vb;
                            maa += wgt * va * va;
                            mbb += wgt * vb * vb;
                            mab += wgt * va * vb;
                        }
                    const double var_a = std::max(maa - ma * ma, 0.0);
                    const double var_b = std::max(mbb - mb * mb, 0.0);
                    const double cov = mab - ma * mb;
                    const double sa = std::sqrt(var_a);
                    const double sb = std::sqrt(var_b);
                    const double lum = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
                    const double con = (2.0 * sa * sb + c2) / (var_a + var_b + c2);
                    const double str = (cov + c3) / (sa * sb + c3);
                    acc += signed_pow(lum, cfg.alpha) * signed_pow(con, cfg.beta) *
                           signed_pow(str, cfg.gamma);
                    ++windows;
                }
            }
            channel_sum += acc / static_cast<double>(windows);
        }
    }
    return channel_sum / static_cast<double>(N * C);
}

MetricReport evaluate_pair(const Tensor& fused, const Tensor& reference,
                           const MuLawConfig& mu_cfg, const SSIMConfig& ssim_cfg) {
    check_same(fused, reference, "evaluate_pair");
    auto clamp01 = [](const Tensor& t) {
        Tensor out({t.shape()});
        const float* src = t.data();
        float* dst = out.data();
        for (std::size_t i = 0; i < t.size(); ++i) dst[i] = std::clamp(src[i], 0.0f, 1.0f);
        return out;
    };
    const Tensor f = clamp01(fused);
    const Tensor r = clamp01(reference);
    const Tensor fm = mu_law(f, mu_cfg);
    const Tensor rm = mu_law(r, mu_cfg);

    MetricReport rep;
    rep.psnr_l = psnr(f, r, 1.0);
    rep.ssim_l = ssim(f, r, ssim_cfg);
    rep.psnr_mu = psnr(fm, rm, 1.0);
    rep.ssim_mu = ssim(fm, rm, ssim_cfg);
    return rep;
}

std::string render_metrics_text(const MetricReport& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "PSNR-l:  " << r.psnr_l << " dB\n";
    os << "SSIM-l:  " << r.ssim_l << "\n";
    os << "PSNR-mu: " << r.psnr_mu << " dB\n";
    os << "SSIM-mu: " << r.ssim_mu << "\n";
    return os.str();
}

std::string render_metrics_tsv(const MetricReport& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6);
    os << r.psnr_l << '\t' << r.ssim_l << '\t' << r.psnr_mu << '\t' << r.ssim_mu << '\n';
    return os.str();
}

}  // namespace ethdr

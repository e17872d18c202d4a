#pragma once

#include "ethdr/tensor.hpp"

#include <string>

namespace ethdr {

struct SSIMConfig {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01, k2 = 0.03;
    double dynamic_range = 1.0;
    double alpha = 1.0, beta = 1.0, gamma = 1.0;  // luminance/contrast/structure weights
};

struct MuLawConfig {
    double mu = 5000.0;
};

double mse(const Tensor& a, const Tensor& b);

// 10*log10(max^2 / mse), capped at 99.0 dB (identical inputs hit the cap).
double psnr(const Tensor& a, const Tensor& b, double max_val);

// log(1 + mu*x) / log(1 + mu) on [0,1]-clamped input.
Tensor mu_law(const Tensor& x, const MuLawConfig& cfg);
Tensor mu_law_inverse(const Tensor& y, const MuLawConfig& cfg);

// Mean over valid (fully interior) Gaussian windows, averaged across channels.
double ssim(const Tensor& a, const Tensor& b, const SSIMConfig& cfg);

struct MetricReport {
    double psnr_l = 0.0, ssim_l = 0.0;
    double psnr_mu = 0.0, ssim_mu = 0.0;
};

MetricReport evaluate_pair(const Tensor& fused, const Tensor& reference,
                           const MuLawConfig& mu_cfg, const SSIMConfig& ssim_cfg);

std::string render_metrics_text(const MetricReport& r);
// One line: psnr_l, ssim_l, psnr_mu, ssim_mu, tab-separated.
std::string render_metrics_tsv(const MetricReport& r);

}  // namespace ethdr

#include "mkf/metrics.hpp"

#include "mkf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mkf {

namespace {

void require_same_shape(const Raster& a, const Raster& b) {
    if (!a.same_shape(b)) {
        throw ConfigError("metric operands differ in shape: " + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()));
    }
}

std::vector<double> gaussian_taps(int window, double sigma) {
    std::vector<double> taps(static_cast<std::size_t>(window));
    const int half = window / 2;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        const double d = i - half;
        taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += taps[static_cast<std::size_t>(i)];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

// Separable convolution with symmetric mirroring.
std::vector<double> blur(const std::vector<double>& src, int w, int h, const std::vector<double>& taps) {
    const int half = static_cast<int>(taps.size()) / 2;
    std::vector<double> tmp(src.size()), out(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -half; k <= half; ++k) {
                acc += taps[static_cast<std::size_t>(k + half)] *
                       src[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(mirror_index(x + k, w))];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -half; k <= half; ++k) {
                acc += taps[static_cast<std::size_t>(k + half)] *
                       tmp[static_cast<std::size_t>(mirror_index(y + k, h)) * w + static_cast<std::size_t>(x)];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

}  // namespace

double mae(const Raster& a, const Raster& b) {
    require_same_shape(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
}

double ssim(const Raster& a, const Raster& b, double dynamic_range, const SsimOptions& options) {
    require_same_shape(a, b);
    if (!(dynamic_range > 0.0)) throw ConfigError("SSIM dynamic range must be positive");
    if (options.window < 1 || options.window % 2 == 0) throw ConfigError("SSIM window must be odd");
    const int w = a.width();
    const int h = a.height();
    const auto taps = gaussian_taps(options.window, options.sigma);

    const std::size_t n = a.size();
    std::vector<double> va(a.values().begin(), a.values().end());
    std::vector<double> vb(b.values().begin(), b.values().end());
    std::vector<double> aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        aa[i] = va[i] * va[i];
        bb[i] = vb[i] * vb[i];
        ab[i] = va[i] * vb[i];
    }
    const auto mu_a = blur(va, w, h, taps);
    const auto mu_b = blur(vb, w, h, taps);
    const auto e_aa = blur(aa, w, h, taps);
    const auto e_bb = blur(bb, w, h, taps);
    const auto e_ab = blur(ab, w, h, taps);

    const double c1 = (options.k1 * dynamic_range) * (options.k1 * dynamic_range);
    const double c2 = (options.k2 * dynamic_range) * (options.k2 * dynamic_range);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
        const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
        const double cov = e_ab[i] - mu_a[i] * mu_b[i];
        const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
        const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
        total += std::clamp(num / den, -1.0, 1.0);
    }
    return total / static_cast<double>(n);
}

ScorePair score(const Raster& reference, const Raster& estimate, double dynamic_range) {
    return {mae(reference, estimate), ssim(reference, estimate, dynamic_range)};
}

}  // namespace mkf

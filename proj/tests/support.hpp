#pragma once

// Independent reference implementations shared by the unit and acceptance tests. They deliberately avoid the
// library's internals (no precomputed tables, no shared padding helpers).

#include "mkf/clustering.hpp"
#include "mkf/filter.hpp"
#include "mkf/raster.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline int reflect(int i, int n) {
    // Symmetric extension with the edge sample repeated: ... 1 0 | 0 1 ... n-1 | n-1 n-2 ...
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

/// Direct-sum weighted mean, w(cx, cy, dx, dy, center value, neighbor value).
template <class Weight>
mkf::Raster direct_sum(const mkf::Raster& img, int radius, Weight weight) {
    mkf::Raster out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double num = 0.0, den = 0.0;
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    const double v = img(reflect(x + dx, img.width()), reflect(y + dy, img.height()));
                    const double w = weight(x, y, dx, dy, img(x, y), v);
                    num += w * v;
                    den += w;
                }
            }
            out(x, y) = num / den;
        }
    }
    return out;
}

inline mkf::Raster bilateral(const mkf::Raster& img, double h_x, double h_i, int radius) {
    return direct_sum(img, radius, [&](int, int, int dx, int dy, double c, double v) {
        return std::exp(-(dx * dx + dy * dy) / (2 * h_x * h_x)) * std::exp(-(c - v) * (c - v) / (2 * h_i * h_i));
    });
}

/// MKF by direct sum, reading (delta, psi) for each center pixel from a caller-supplied table.
inline mkf::Raster multi_kernel(const mkf::Raster& img, double h_x, int radius, const std::vector<double>& delta,
                                const std::vector<double>& psi) {
    return direct_sum(img, radius, [&](int x, int y, int dx, int dy, double c, double v) {
        const auto i = static_cast<std::size_t>(y) * img.width() + x;
        return std::exp(-(dx * dx + dy * dy) / (2 * h_x * h_x) - (c - v) * (c - v) * psi[i] / (2 * delta[i] * delta[i]));
    });
}

inline mkf::Raster random_raster(std::mt19937_64& rng, int w, int h, double lo = 0.0, double hi = 255.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    mkf::Raster r(w, h);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = u(rng);
    return r;
}

/// Random image made of a few flat regions, rounded to integers.
inline mkf::Raster blocky_raster(std::mt19937_64& rng, int w, int h, int regions) {
    std::uniform_int_distribution<int> px(0, w - 1), py(0, h - 1), level(0, 255);
    std::vector<int> sx(regions), sy(regions), val(regions);
    for (int k = 0; k < regions; ++k) {
        sx[k] = px(rng);
        sy[k] = py(rng);
        val[k] = level(rng);
    }
    mkf::Raster r(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int best = 0;
            long bd = -1;
            for (int k = 0; k < regions; ++k) {
                const long d = long(x - sx[k]) * (x - sx[k]) + long(y - sy[k]) * (y - sy[k]);
                if (bd < 0 || d < bd) {
                    bd = d;
                    best = k;
                }
            }
            r(x, y) = val[best];
        }
    }
    return r;
}

/// True when every pixel carrying label `label` is reachable from every other one through `n`-connected
/// steps (n = 4 or 8) over pixels with the same label.
inline bool label_connected(const mkf::LabelMap& m, std::int32_t label, int n) {
    std::vector<char> seen(m.labels.size(), 0);
    std::vector<std::size_t> stack;
    std::size_t members = 0;
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        if (m.labels[i] != label) continue;
        ++members;
        if (stack.empty() && !seen[i] && members == 1) {
            stack.push_back(i);
            seen[i] = 1;
        }
    }
    std::size_t reached = 0;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        ++reached;
        const int x = static_cast<int>(i % m.width), y = static_cast<int>(i / m.width);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if ((dx == 0 && dy == 0) || (n == 4 && dx != 0 && dy != 0)) continue;
                const int u = x + dx, v = y + dy;
                if (u < 0 || v < 0 || u >= m.width || v >= m.height) continue;
                const std::size_t j = static_cast<std::size_t>(v) * m.width + u;
                if (!seen[j] && m.labels[j] == label) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
    }
    return reached == members;
}

}  // namespace oracle

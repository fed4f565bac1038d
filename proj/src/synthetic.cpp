#include "mkf/synthetic.hpp"

#include "mkf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace mkf::synthetic {

namespace {

bool inside_ellipse(double x, double y, double cx, double cy, double rx, double ry, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    const double u = ((x - cx) * c + (y - cy) * s) / rx;
    const double v = (-(x - cx) * s + (y - cy) * c) / ry;
    return u * u + v * v <= 1.0;
}

}  // namespace

Raster piecewise_constant(int width, int height, std::uint64_t seed) {
    if (width < 1 || height < 1) throw ConfigError("image dimensions must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Dead-leaves model: opaque disks dropped front to back, radii with density proportional to r^-3.
    const double r_min = 2.0, r_max = std::max(r_min, std::min(width, height) / 4.0);
    const double a = 1.0 / (r_min * r_min), b = 1.0 / (r_max * r_max);
    Raster img(width, height, 0.0, {0.0, 255.0});
    std::vector<char> covered(img.size(), 0);
    std::size_t remaining = img.size();
    for (int disk = 0; disk < 200000 && remaining > 0; ++disk) {
        const double r = 1.0 / std::sqrt(a - unit(rng) * (a - b));
        const double cx = -r_max + unit(rng) * (width + 2 * r_max);
        const double cy = -r_max + unit(rng) * (height + 2 * r_max);
        const double value = std::round(20.0 + 215.0 * unit(rng));
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - r))), x1 = std::min(width - 1, static_cast<int>(std::ceil(cx + r)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - r))), y1 = std::min(height - 1, static_cast<int>(std::ceil(cy + r)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const std::size_t i = img.index(x, y);
                if (covered[i] || (x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
                covered[i] = 1;
                img[i] = value;
                --remaining;
            }
        }
    }
    if (remaining > 0) {
        const double value = std::round(20.0 + 215.0 * unit(rng));
        for (std::size_t i = 0; i < img.size(); ++i) {
            if (!covered[i]) img[i] = value;
        }
    }
    return img;
}

Raster natural_scene(int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Sky-like vertical shading as the background.
    const double top = 150.0 + 80.0 * unit(rng), bottom = 60.0 + 80.0 * unit(rng);
    Raster img(width, height, 0.0, {0.0, 255.0});
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) img(x, y) = top + (bottom - top) * y / std::max(1, height - 1);
    }
    const int objects = 5 + static_cast<int>(unit(rng) * 4);
    for (int o = 0; o < objects; ++o) {
        const double cx = unit(rng) * width, cy = unit(rng) * height;
        const double rx = (0.1 + 0.25 * unit(rng)) * width, ry = (0.1 + 0.25 * unit(rng)) * height;
        const double angle = unit(rng) * std::numbers::pi;
        const double base = 30.0 + 190.0 * unit(rng);
        const double gx = (unit(rng) - 0.5) * 60.0 / width, gy = (unit(rng) - 0.5) * 60.0 / height;
        const bool textured = unit(rng) < 0.4;
        const double amp = 8.0 + 20.0 * unit(rng);
        const double fx = 0.2 + 0.6 * unit(rng), fy = 0.2 + 0.6 * unit(rng);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                if (!inside_ellipse(x, y, cx, cy, rx, ry, angle)) continue;
                double v = base + gx * (x - cx) + gy * (y - cy);
                if (textured) v += amp * std::sin(fx * x) * std::sin(fy * y);
                img(x, y) = v;
            }
        }
    }
    for (double& v : img.values()) v = std::clamp(std::round(v), 0.0, 255.0);
    return img;
}

Raster brain_phantom(int width, int height, int slice, int slice_count) {
    if (slice_count < 1 || slice < 0 || slice >= slice_count) throw ConfigError("slice index out of range");
    // Position along the volume in [-1, 1]; the head narrows away from the center slice.
    const double z = slice_count > 1 ? 2.0 * slice / (slice_count - 1) - 1.0 : 0.0;
    const double scale = std::sqrt(std::max(0.0, 1.0 - 0.35 * z * z));
    const double cx = 0.5 * (width - 1), cy = 0.5 * (height - 1);
    const double ax = 0.44 * width * scale, ay = 0.47 * height * scale;

    Raster img(width, height, 0.0, {0.0, 3000.0});
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = 0.0;  // air
            if (inside_ellipse(x, y, cx, cy, ax, ay, 0.0)) v = 1400.0;                        // scalp
            if (inside_ellipse(x, y, cx, cy, 0.92 * ax, 0.93 * ay, 0.0)) v = 300.0;           // skull
            if (inside_ellipse(x, y, cx, cy, 0.86 * ax, 0.87 * ay, 0.0)) v = 700.0;           // CSF
            if (inside_ellipse(x, y, cx, cy, 0.82 * ax, 0.83 * ay, 0.0)) v = 1900.0;          // gray matter
            if (inside_ellipse(x, y, cx, cy, 0.66 * ax, 0.68 * ay, 0.0)) v = 2700.0;          // white matter
            // Cortical folds: gray-matter lobes intruding into white matter.
            for (int k = 0; k < 8; ++k) {
                const double t = 2.0 * std::numbers::pi * k / 8.0 + 0.3 * z;
                const double fx = cx + 0.6 * ax * std::cos(t), fy = cy + 0.62 * ay * std::sin(t);
                if (inside_ellipse(x, y, fx, fy, 0.16 * ax, 0.07 * ay, t)) v = 1900.0;
            }
            // Lateral ventricles, growing toward the center slice.
            const double vent = 0.09 + 0.05 * (1.0 - std::abs(z));
            if (inside_ellipse(x, y, cx - 0.14 * ax, cy - 0.05 * ay, vent * ax, 2.6 * vent * ay, 0.25) ||
                inside_ellipse(x, y, cx + 0.14 * ax, cy - 0.05 * ay, vent * ax, 2.6 * vent * ay, -0.25)) {
                v = 700.0;
            }
            // Deep gray nuclei.
            if (inside_ellipse(x, y, cx - 0.3 * ax, cy + 0.2 * ay, 0.09 * ax, 0.12 * ay, 0.0) ||
                inside_ellipse(x, y, cx + 0.3 * ax, cy + 0.2 * ay, 0.09 * ax, 0.12 * ay, 0.0)) {
                v = 2200.0;
            }
            img(x, y) = v;
        }
    }
    return img;
}

}  // namespace mkf::synthetic

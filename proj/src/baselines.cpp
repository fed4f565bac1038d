#include "mkf/baselines.hpp"

#include "mkf/errors.hpp"
#include "mkf/parallel.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace mkf {

// ---------------------------------------------------------------------------
// Total variation
// ---------------------------------------------------------------------------

void TvParams::validate() const {
    if (!(lambda > 0.0)) throw ConfigError("TV lambda must be positive");
    if (iters < 1) throw ConfigError("TV iteration count must be >= 1");
    if (!(step > 0.0)) throw ConfigError("TV step must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("TV epsilon must be positive");
}

namespace {

// Forward differences with the last column/row differencing against its mirror image (zero).
inline double forward_dx(const Raster& u, int x, int y) { return x + 1 < u.width() ? u(x + 1, y) - u(x, y) : 0.0; }
inline double forward_dy(const Raster& u, int x, int y) { return y + 1 < u.height() ? u(x, y + 1) - u(x, y) : 0.0; }

Raster tv_gradient(const Raster& u, const Raster& observed, double lambda, double epsilon) {
    const int w = u.width();
    const int h = u.height();
    Raster px(w, h), py(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = forward_dx(u, x, y);
            const double gy = forward_dy(u, x, y);
            const double mag = std::sqrt(gx * gx + gy * gy + epsilon * epsilon);
            px(x, y) = gx / mag;
            py(x, y) = gy / mag;
        }
    }
    Raster grad(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double div = px(x, y) - (x > 0 ? px(x - 1, y) : 0.0) + py(x, y) - (y > 0 ? py(x, y - 1) : 0.0);
            grad(x, y) = -div + lambda * (u(x, y) - observed(x, y));
        }
    }
    return grad;
}

}  // namespace

double tv_energy(const Raster& u, const Raster& observed, double lambda, double epsilon) {
    if (!u.same_shape(observed)) throw ConfigError("TV energy operands differ in shape");
    double tv = 0.0;
    double fidelity = 0.0;
    for (int y = 0; y < u.height(); ++y) {
        for (int x = 0; x < u.width(); ++x) {
            const double gx = forward_dx(u, x, y);
            const double gy = forward_dy(u, x, y);
            tv += std::sqrt(gx * gx + gy * gy + epsilon * epsilon);
            const double r = u(x, y) - observed(x, y);
            fidelity += r * r;
        }
    }
    return tv + 0.5 * lambda * fidelity;
}

TvResult tv_denoise(const Raster& image, const TvParams& params) {
    params.validate();
    TvResult result{image, {}, 0};
    Raster& u = result.output;
    double energy = tv_energy(u, image, params.lambda, params.epsilon);
    result.energy.push_back(energy);

    for (int it = 0; it < params.iters; ++it) {
        const Raster grad = tv_gradient(u, image, params.lambda, params.epsilon);
        double step = params.step;
        bool backtracked = false;
        // A step that would raise the energy is halved until it does not.
        for (int attempt = 0; attempt < 60; ++attempt) {
            Raster trial = u;
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= step * grad[i];
            const double trial_energy = tv_energy(trial, image, params.lambda, params.epsilon);
            if (trial_energy <= energy) {
                u = std::move(trial);
                energy = trial_energy;
                break;
            }
            step *= 0.5;
            backtracked = true;
        }
        if (backtracked) ++result.backtracked;
        result.energy.push_back(energy);
    }
    return result;
}

void write_energy_csv(std::ostream& out, const std::vector<double>& energy) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "iter,energy\n";
    for (std::size_t i = 0; i < energy.size(); ++i) out << i << ',' << energy[i] << '\n';
    out.precision(old_precision);
}

// ---------------------------------------------------------------------------
// Gaussian curvature filter
// ---------------------------------------------------------------------------

void CfParams::validate() const {
    if (iters < 1) throw ConfigError("CF iteration count must be >= 1");
}

std::array<double, 8> gc_projection_distances(const Raster& u, int x, int y) {
    const double c = u(x, y);
    const double l = u.mirrored(x - 1, y);
    const double r = u.mirrored(x + 1, y);
    const double t = u.mirrored(x, y - 1);
    const double b = u.mirrored(x, y + 1);
    const double lt = u.mirrored(x - 1, y - 1);
    const double rb = u.mirrored(x + 1, y + 1);
    const double lb = u.mirrored(x - 1, y + 1);
    const double rt = u.mirrored(x + 1, y - 1);
    return {
        (l + r) / 2.0 - c,
        (t + b) / 2.0 - c,
        (lt + rb) / 2.0 - c,
        (lb + rt) / 2.0 - c,
        l + t - lt - c,
        l + b - lb - c,
        r + t - rt - c,
        r + b - rb - c,
    };
}

Raster cf_gaussian_denoise(const Raster& image, const CfParams& params) {
    params.validate();
    Raster u = image;
    // Pixels of one parity class share no 8-neighbors, so each class updates in place independently.
    static constexpr int kOffsets[4][2] = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    for (int it = 0; it < params.iters; ++it) {
        for (const auto& off : kOffsets) {
            const int rows = (u.height() - off[1] + 1) / 2;
            parallel_for(static_cast<std::size_t>(std::max(rows, 0)), [&](std::size_t ri) {
                const int y = off[1] + 2 * static_cast<int>(ri);
                for (int x = off[0]; x < u.width(); x += 2) {
                    const auto d = gc_projection_distances(u, x, y);
                    double best = d[0];
                    for (std::size_t k = 1; k < d.size(); ++k) {
                        if (std::abs(d[k]) < std::abs(best)) best = d[k];
                    }
                    u(x, y) += best;
                }
            });
        }
    }
    return u;
}

Raster bf_denoise(const Raster& image, const BfParams& params) { return bilateral_filter(image, params); }

}  // namespace mkf

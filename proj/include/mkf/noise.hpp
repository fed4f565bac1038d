#pragma once

#include "mkf/raster.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mkf {

/// Generator used by every noise routine. Each image row draws from its own mt19937_64 stream seeded with
/// splitmix64(seed, row), so output does not depend on the worker count.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64-rowstream";

/// 8-bit variance normalizer (255^2).
inline constexpr double kUint8VarianceScale = 65025.0;

inline double normalized_noise_level(double variance) { return variance / kUint8VarianceScale; }

/// image + N(0, variance), i.i.d. per pixel, no clamping.
Raster add_integral_noise(const Raster& image, double variance, std::uint64_t seed);

struct NoiseField {
    std::optional<Coordinate> center;  // default: (width / 2, height / 2)
    std::optional<double> spread;      // default: min(width, height) / 4
    double peak_sigma = 500.0;
};

/// sigma(x, y) = peak * exp(-((x - cx)^2 + (y - cy)^2) / (2 spread^2)).
Raster make_noise_field(int width, int height, const NoiseField& field = {});

/// image(x) + N(0, sigma(x)^2), independent per pixel.
Raster add_spatial_noise(const Raster& image, const Raster& sigma, std::uint64_t seed);

/// Parsed `--noise` argument: `integral:level=1000,seed=42` or `field:peak=500,spread=auto,seed=42`.
/// Keys may also be separated by ';'. An `rng=` key is accepted if it names kRngAlgorithm.
struct NoiseSpec {
    enum class Kind { integral, field };
    Kind kind = Kind::integral;
    double level = 0.0;  // variance for integral noise, peak sigma for field noise
    std::optional<Coordinate> center;
    std::optional<double> spread;
    std::uint64_t seed = 0;

    static NoiseSpec parse(std::string_view text);
    /// Canonical descriptor (without the seed) used in result tables.
    std::string descriptor() const;
    void validate() const;
};

Raster apply_noise(const Raster& image, const NoiseSpec& spec);

/// Background phase: a quadratic polynomial in normalized coordinates X, Y in [-1, 1]
///   phi = c0 + c1 X + c2 Y + c3 X^2 + c4 X Y + c5 Y^2
/// with coefficients c = coefficients + slice_index * drift, wrapped to (-pi, pi].
struct PhaseSpec {
    int slice_index = 0;
    std::array<double, 6> coefficients{0.4, 0.9, -0.6, 0.5, 0.35, -0.45};
    std::array<double, 6> drift{0.06, 0.04, -0.05, 0.02, 0.03, -0.02};
};

double wrap_phase(double phi);
Raster phase_map(int width, int height, const PhaseSpec& phase);

/// real = m cos(phi), imag = m sin(phi).
ComplexRaster synthesize_complex_slice(const Raster& magnitude, const PhaseSpec& phase);

std::uint64_t splitmix64(std::uint64_t x);
/// Derives an independent seed for sub-task `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mkf

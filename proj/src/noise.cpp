#include "mkf/noise.hpp"

#include "mkf/errors.hpp"
#include "mkf/parallel.hpp"
#include "mkf/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mkf {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ull + 0x632BE59BD9B4E019ull));
}

namespace {

// Adds N(0, sigma(i)^2) to every pixel; rows draw from independent streams.
template <class SigmaOf>
Raster add_gaussian(const Raster& image, std::uint64_t seed, SigmaOf sigma_of) {
    Raster out = image;
    parallel_for(static_cast<std::size_t>(image.height()), [&](std::size_t y) {
        std::mt19937_64 rng(derive_seed(seed, y));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int x = 0; x < image.width(); ++x) {
            const std::size_t i = image.index(x, static_cast<int>(y));
            const double z = normal(rng);
            out[i] += sigma_of(i) * z;
        }
    });
    return out;
}

}  // namespace

Raster add_integral_noise(const Raster& image, double variance, std::uint64_t seed) {
    if (!(variance > 0.0)) throw ConfigError("noise variance must be positive");
    const double sigma = std::sqrt(variance);
    return add_gaussian(image, seed, [sigma](std::size_t) { return sigma; });
}

Raster make_noise_field(int width, int height, const NoiseField& field) {
    if (!(field.peak_sigma > 0.0)) throw ConfigError("noise field peak must be positive");
    const Coordinate c = field.center.value_or(Coordinate{width / 2, height / 2});
    const double spread = field.spread.value_or(std::min(width, height) / 4.0);
    if (!(spread > 0.0)) throw ConfigError("noise field spread must be positive");
    Raster sigma(width, height, 0.0, {0.0, field.peak_sigma});
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double dx = x - c.x;
            const double dy = y - c.y;
            sigma(x, y) = field.peak_sigma * std::exp(-(dx * dx + dy * dy) / (2.0 * spread * spread));
        }
    }
    return sigma;
}

Raster add_spatial_noise(const Raster& image, const Raster& sigma, std::uint64_t seed) {
    if (!image.same_shape(sigma)) throw ConfigError("noise field and image differ in shape");
    return add_gaussian(image, seed, [&sigma](std::size_t i) { return sigma[i]; });
}

// ---------------------------------------------------------------------------
// NoiseSpec
// ---------------------------------------------------------------------------

NoiseSpec NoiseSpec::parse(std::string_view text) {
    const auto [head, pairs] = text::split_spec(text);
    NoiseSpec spec;
    if (head == "integral") {
        spec.kind = Kind::integral;
    } else if (head == "field") {
        spec.kind = Kind::field;
        spec.level = 500.0;
    } else {
        throw ConfigError("unknown noise kind '" + std::string(head) + "'");
    }
    std::optional<int> cx, cy;
    for (const auto& [key, value] : pairs) {
        if (key == "seed") {
            spec.seed = text::parse_u64(value, key);
        } else if (key == "rng") {
            if (value != kRngAlgorithm) throw ConfigError("noise generator '" + value + "' is not available");
        } else if (spec.kind == Kind::integral && key == "level") {
            spec.level = text::parse_double(value, key);
        } else if (spec.kind == Kind::field && (key == "peak" || key == "level")) {
            spec.level = text::parse_double(value, key);
        } else if (spec.kind == Kind::field && key == "spread") {
            if (value != "auto") spec.spread = text::parse_double(value, key);
        } else if (spec.kind == Kind::field && key == "cx") {
            cx = static_cast<int>(text::parse_double(value, key));
        } else if (spec.kind == Kind::field && key == "cy") {
            cy = static_cast<int>(text::parse_double(value, key));
        } else {
            throw ConfigError("unknown noise key '" + key + "'");
        }
    }
    if (cx.has_value() != cy.has_value()) throw ConfigError("noise field center needs both cx and cy");
    if (cx) spec.center = Coordinate{*cx, *cy};
    spec.validate();
    return spec;
}

void NoiseSpec::validate() const {
    if (!(level > 0.0)) throw ConfigError("noise level must be positive");
    if (spread && !(*spread > 0.0)) throw ConfigError("noise spread must be positive");
}

std::string NoiseSpec::descriptor() const {
    std::string out;
    if (kind == Kind::integral) {
        out = "integral:level=" + text::format_double(level);
    } else {
        out = "field:peak=" + text::format_double(level) + ";spread=" + (spread ? text::format_double(*spread) : "auto");
        if (center) out += ";cx=" + std::to_string(center->x) + ";cy=" + std::to_string(center->y);
    }
    return out + ";rng=" + std::string(kRngAlgorithm);
}

Raster apply_noise(const Raster& image, const NoiseSpec& spec) {
    spec.validate();
    if (spec.kind == NoiseSpec::Kind::integral) return add_integral_noise(image, spec.level, spec.seed);
    const Raster sigma = make_noise_field(image.width(), image.height(), {spec.center, spec.spread, spec.level});
    return add_spatial_noise(image, sigma, spec.seed);
}

// ---------------------------------------------------------------------------
// Complex MRI synthesis
// ---------------------------------------------------------------------------

double wrap_phase(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(phi + std::numbers::pi, two_pi);
    if (w <= 0.0) w += two_pi;
    return w - std::numbers::pi;
}

Raster phase_map(int width, int height, const PhaseSpec& phase) {
    std::array<double, 6> c{};
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = phase.coefficients[i] + phase.slice_index * phase.drift[i];
    Raster phi(width, height, 0.0, {-std::numbers::pi, std::numbers::pi});
    for (int y = 0; y < height; ++y) {
        const double Y = height > 1 ? 2.0 * y / (height - 1) - 1.0 : 0.0;
        for (int x = 0; x < width; ++x) {
            const double X = width > 1 ? 2.0 * x / (width - 1) - 1.0 : 0.0;
            phi(x, y) = wrap_phase(c[0] + c[1] * X + c[2] * Y + c[3] * X * X + c[4] * X * Y + c[5] * Y * Y);
        }
    }
    return phi;
}

ComplexRaster synthesize_complex_slice(const Raster& magnitude, const PhaseSpec& phase) {
    magnitude.check_finite();
    const Raster phi = phase_map(magnitude.width(), magnitude.height(), phase);
    const double bound = std::max(std::abs(magnitude.range_hint().min), std::abs(magnitude.range_hint().max));
    Raster re(magnitude.width(), magnitude.height(), 0.0, {-bound, bound});
    Raster im(magnitude.width(), magnitude.height(), 0.0, {-bound, bound});
    for (std::size_t i = 0; i < magnitude.size(); ++i) {
        re[i] = magnitude[i] * std::cos(phi[i]);
        im[i] = magnitude[i] * std::sin(phi[i]);
    }
    return ComplexRaster(std::move(re), std::move(im));
}

}  // namespace mkf

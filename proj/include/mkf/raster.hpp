#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mkf {

struct Coordinate {
    int x = 0;  // column
    int y = 0;  // row

    friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

/// Nominal intensity range of a raster (e.g. 0..255 for 8-bit sources).
struct IntensityRange {
    double min = 0.0;
    double max = 255.0;

    double span() const { return max - min; }
};

/// Row-major 2D grid of finite 64-bit intensities.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, double fill = 0.0, IntensityRange hint = {});
    Raster(int width, int height, std::vector<double> data, IntensityRange hint = {});

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    IntensityRange range_hint() const { return hint_; }
    void set_range_hint(IntensityRange hint) { hint_ = hint; }

    double operator()(int x, int y) const { return data_[index(x, y)]; }
    double& operator()(int x, int y) { return data_[index(x, y)]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }
    Coordinate coordinate(std::size_t i) const {
        return {static_cast<int>(i % static_cast<std::size_t>(width_)),
                static_cast<int>(i / static_cast<std::size_t>(width_))};
    }

    /// Value at (x, y) with symmetric (edge-repeating) mirroring for out-of-range coordinates.
    double mirrored(int x, int y) const;

    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    bool same_shape(const Raster& other) const { return width_ == other.width_ && height_ == other.height_; }

    /// Throws ConfigError if any value is NaN or infinite.
    void check_finite() const;

    friend bool operator==(const Raster& a, const Raster& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
    IntensityRange hint_{};
};

struct ComplexRaster {
    Raster real;
    Raster imag;

    ComplexRaster() = default;
    ComplexRaster(Raster re, Raster im);

    Raster magnitude() const;
};

/// Per-pixel integer labels for one hierarchy level.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;

    LabelMap() = default;
    LabelMap(int w, int h, std::int32_t fill = 0);

    std::int32_t operator()(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
    std::size_t size() const { return labels.size(); }

    /// Number of distinct label values.
    std::size_t count_distinct() const;

    Raster to_raster() const;
};

/// Symmetric mirror of an index into [0, n): -1 -> 0, n -> n-1. Handles arbitrarily large offsets.
inline int mirror_index(int i, int n) {
    if (i >= 0 && i < n) return i;
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;  // population (divisor n)
    double min = 0.0;
    double max = 0.0;
};

Moments moments(std::span<const double> values);

}  // namespace mkf

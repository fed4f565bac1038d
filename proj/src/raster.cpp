#include "mkf/raster.hpp"

#include "mkf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace mkf {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw ConfigError("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
}

}  // namespace

Raster::Raster(int width, int height, double fill, IntensityRange hint)
    : width_(width), height_(height), hint_(hint) {
    check_dims(width, height);
    if (!std::isfinite(fill)) throw ConfigError("raster fill value must be finite");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Raster::Raster(int width, int height, std::vector<double> data, IntensityRange hint)
    : width_(width), height_(height), data_(std::move(data)), hint_(hint) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ConfigError("raster data length " + std::to_string(data_.size()) + " does not match " +
                          std::to_string(width) + "x" + std::to_string(height));
    }
    check_finite();
}

double Raster::mirrored(int x, int y) const {
    return data_[index(mirror_index(x, width_), mirror_index(y, height_))];
}

void Raster::check_finite() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw ConfigError("raster value at index " + std::to_string(i) + " is not finite");
        }
    }
}

ComplexRaster::ComplexRaster(Raster re, Raster im) : real(std::move(re)), imag(std::move(im)) {
    if (!real.same_shape(imag)) throw ConfigError("real and imaginary rasters differ in shape");
}

Raster ComplexRaster::magnitude() const {
    Raster out(real.width(), real.height(), 0.0, real.range_hint());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::hypot(real[i], imag[i]);
    return out;
}

LabelMap::LabelMap(int w, int h, std::int32_t fill) : width(w), height(h) {
    check_dims(w, h);
    labels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

std::size_t LabelMap::count_distinct() const {
    std::vector<std::int32_t> sorted(labels);
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

Raster LabelMap::to_raster() const {
    std::vector<double> values(labels.begin(), labels.end());
    double hi = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    return Raster(width, height, std::move(values), {0.0, hi});
}

Moments moments(std::span<const double> values) {
    Moments m;
    if (values.empty()) return m;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    m.min = *lo;
    m.max = *hi;
    double sum = 0.0;
    for (double v : values) sum += v;
    const double n = static_cast<double>(values.size());
    m.mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(ss / n);
    return m;
}

}  // namespace mkf

#pragma once

#include "mkf/raster.hpp"

namespace mkf {

struct ScorePair {
    double mae = 0.0;
    double ssim = 1.0;
};

/// Mean absolute error over equal-shape rasters.
double mae(const Raster& a, const Raster& b);

struct SsimOptions {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// Mean local SSIM with a Gaussian window and mirrored boundaries. `dynamic_range` is L in
/// C1 = (k1 L)^2, C2 = (k2 L)^2: 255 for 8-bit data, 6000 for the -3000..3000 MRI range.
double ssim(const Raster& a, const Raster& b, double dynamic_range, const SsimOptions& options = {});

ScorePair score(const Raster& reference, const Raster& estimate, double dynamic_range);

}  // namespace mkf

#pragma once

#include "mkf/raster.hpp"

#include <cstdint>

namespace mkf::synthetic {

/// Dead-leaves image: occluding disks with flat intensities in [20, 235] and radii distributed as r^-3 on
/// [2, min(width, height) / 4].
Raster piecewise_constant(int width, int height, std::uint64_t seed);

/// Natural-image stand-in on 0..255: smooth shading, flat and textured regions, hard edges.
Raster natural_scene(int width, int height, std::uint64_t seed);

/// T1-like axial head phantom (magnitude, roughly 0..3000). Anatomy changes smoothly with `slice` over
/// [0, slice_count).
Raster brain_phantom(int width, int height, int slice, int slice_count);

}  // namespace mkf::synthetic

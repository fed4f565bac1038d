#pragma once

#include "mkf/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <span>

namespace mkf::io {

/// Reads a P2 (ASCII) or P5 (binary) PGM. Intensities are taken verbatim; range_hint is (0, maxval).
/// P5 files with maxval > 255 use big-endian 16-bit samples.
Raster load_pgm(const std::filesystem::path& path);

/// Writes a P5 PGM. Values are clamped to [0, maxval] and rounded half away from zero; maxval above 255
/// gives 16-bit big-endian samples.
void save_pgm(const Raster& raster, const std::filesystem::path& path, int maxval = 255);

/// "MKFR" container: magic, u32 LE width, u32 LE height, width*height f64 LE values, row-major.
Raster load_f64_raster(const std::filesystem::path& path);
void save_f64_raster(const Raster& raster, const std::filesystem::path& path);

/// Decodes in-memory buffers; `load_*` are thin wrappers over these.
Raster decode_pgm(std::span<const std::uint8_t> bytes);
Raster decode_f64_raster(std::span<const std::uint8_t> bytes);

/// Binary P6 PPM, returned as interleaved RGB bytes. Used only to feed to_grayscale.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;
};
RgbImage load_ppm(const std::filesystem::path& path);

/// BT.601 luma (0.299 R + 0.587 G + 0.114 B), rounded half away from zero.
Raster to_grayscale(std::span<const std::uint8_t> rgb8, int width, int height);

/// Dispatches on extension: ".mkfr" uses the f64 container, anything else PGM.
Raster load_raster(const std::filesystem::path& path);
void save_raster(const Raster& raster, const std::filesystem::path& path);

}  // namespace mkf::io

#pragma once

#include "mkf/baselines.hpp"
#include "mkf/filter.hpp"
#include "mkf/metrics.hpp"
#include "mkf/noise.hpp"
#include "mkf/raster.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mkf {

enum class FilterKind { bf, mkf, tv, cf };

/// A filter id plus its full parameter set, e.g. `mkf:depth=2,max-cluster=20,hx=3,radius=5`.
///
/// Keys: bf {hi, hx, radius}; mkf {depth, max-cluster, min-cluster, ne, precision, em-tol, hx, radius};
/// tv {lambda, iters, step, eps}; cf {iters}. Unspecified keys keep their defaults.
struct FilterSpec {
    FilterKind kind = FilterKind::mkf;
    BfParams bf;
    MkfParams mkf;
    TvParams tv;
    CfParams cf;

    static FilterSpec parse(std::string_view text);
    static FilterSpec bilateral(const BfParams& p);
    static FilterSpec multi_kernel(const MkfParams& p);
    static FilterSpec total_variation(const TvParams& p);
    static FilterSpec curvature(const CfParams& p);

    std::string id() const;
    /// Canonical, complete parameter list separated by ';' (CSV-safe). `parse(id() + ":" + digest())`
    /// reproduces the spec.
    std::string digest() const;
    std::string label() const { return id() + ":" + digest(); }

    Raster apply(const Raster& image) const;
    void validate() const;
};

/// One benchmark measurement. CSV header: `image,filter,params,noise,seed,component,mae,ssim,ms`.
struct ResultRow {
    std::string image;
    std::string filter;
    std::string params;
    std::string noise;
    std::uint64_t seed = 0;
    std::string component = "gray";
    double mae = 0.0;
    double ssim = 0.0;
    double ms = 0.0;
};

inline constexpr std::string_view kCsvHeader = "image,filter,params,noise,seed,component,mae,ssim,ms";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);

struct CaseResult {
    Raster noisy;
    Raster output;
    ScorePair score;
    double ms = 0.0;
};

/// Adds noise to `clean`, filters it and scores the result against `clean`.
CaseResult run_case(const Raster& clean, const FilterSpec& filter, const NoiseSpec& noise, double dynamic_range);

/// Recomputes a row's metrics from the clean image it was measured on, its parameter digest, noise
/// descriptor and seed.
ScorePair reproduce_row(const ResultRow& row, const Raster& clean, double dynamic_range);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct SweepOptions {
    std::vector<int> depths{2, 3, 4, 5, 6, 7};
    std::vector<int> sizes;   // default 10..200 step 10
    std::vector<double> levels{10.0, 1000.0};
    MkfParams base;           // everything except depth and max-cluster
    std::uint64_t seed = 42;

    SweepOptions();
};

/// Tree depth x cluster size x noise level grid on one clean 8-bit image. All rows at one noise level share
/// the same noise realization.
std::vector<ResultRow> sweep_depth(const Raster& clean, const std::string& image_id, const SweepOptions& options);

struct NamedRaster {
    std::string id;
    Raster raster;
};

struct BsdOptions {
    std::vector<double> levels;  // default 10..1000 step 10
    std::vector<FilterSpec> filters;  // default: BF h_I 57 and 5, MKF depth 2 and 7
    std::uint64_t seed = 42;
    double dynamic_range = 255.0;

    BsdOptions();
};

/// Integral-noise benchmark; one row per (image, level, filter).
std::vector<ResultRow> bench_bsd(const std::vector<NamedRaster>& images, const BsdOptions& options);

/// Mean MAE/SSIM/time across images for every (filter, params, noise, component); image column "mean".
std::vector<ResultRow> summarize_over_images(const std::vector<ResultRow>& rows);

struct BrainwebOptions {
    std::vector<FilterSpec> filters;  // default: BF, TV, CF, MKF with the MRI settings
    NoiseSpec field;                  // spatial-field noise, peak 500
    PhaseSpec phase;                  // slice_index is overwritten per slice
    std::uint64_t seed = 42;
    double dynamic_range = 6000.0;

    BrainwebOptions();
};

/// Complex-MRI benchmark: per slice, synthesize real/imaginary parts, add spatially varying noise to each,
/// filter them independently and score. Rows per (slice, component, filter).
std::vector<ResultRow> bench_brainweb(const std::vector<NamedRaster>& magnitudes, const BrainwebOptions& options);

/// Noise-free complex parts of slice `index` as bench_brainweb builds them.
ComplexRaster brainweb_slice(const Raster& magnitude, int index, const BrainwebOptions& options);

// ---------------------------------------------------------------------------
// Charts
// ---------------------------------------------------------------------------

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// Groups rows into one series per `filter:params` (plus component when `split_components`), with x taken
/// from `x_of` and y the chosen metric ("mae" or "ssim"). Points are sorted by x.
std::vector<Series> series_from_rows(const std::vector<ResultRow>& rows, std::string_view metric,
                                     const std::function<double(const ResultRow&)>& x_of,
                                     bool split_components = false);

/// Minimal SVG line chart: axes with tick labels, one polyline per series, legend.
std::string render_svg(const std::vector<Series>& series, std::string_view title, std::string_view x_label,
                       std::string_view y_label);

/// Noise level stored in a descriptor (`level=` or `peak=`).
double noise_level_of(const ResultRow& row);

}  // namespace mkf

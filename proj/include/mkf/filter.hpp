#pragma once

#include "mkf/clustering.hpp"
#include "mkf/raster.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mkf {

struct BfParams {
    double h_x = 3.0;    // spatial bandwidth, pixels
    double h_I = 57.0;   // range bandwidth, intensity units
    int radius = 5;      // window radius, pixels

    void validate() const;
};

/// Classic bilateral weight: spatial Gaussian times range Gaussian.
double bf_weight(Coordinate center, double center_value, Coordinate neighbor, double neighbor_value,
                 const BfParams& params);

/// Contextual gain Psi = (delta_parent / delta_grandparent)^2. Also used for the shallow-leaf fallback
/// (delta / delta_parent)^2. Not clamped: values above 1 are legal.
double contextual_gain(double delta_parent, double delta_grandparent);

/// Multi-kernel weight. The effective range bandwidth is delta / sqrt(psi).
double mkf_weight(Coordinate center, double center_value, Coordinate neighbor, double neighbor_value, double h_x,
                  double delta, double psi);

struct KernelRecord {
    int cluster_id = 0;  // leaf cluster
    int source_id = 0;   // node supplying the statistics (differs for ineligible leaves)
    double delta = 1.0;
    double psi = 1.0;
};

/// Range-kernel parameters per leaf cluster plus the pixel -> record lookup.
class KernelField {
public:
    KernelField() = default;
    KernelField(int width, int height, std::vector<KernelRecord> records, std::vector<std::int32_t> pixel_record);

    static KernelField from_tree(const ClusterTree& tree);
    /// Every pixel shares one record; used to reduce MKF to BF.
    static KernelField uniform(int width, int height, double delta, double psi);

    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<KernelRecord>& records() const { return records_; }
    const KernelRecord& at(std::size_t pixel) const {
        return records_[static_cast<std::size_t>(pixel_record_[pixel])];
    }
    const std::vector<std::int32_t>& pixel_records() const { return pixel_record_; }

    /// CSV rows `x,y,cluster_id,delta,psi` with a header line.
    void write_csv(std::ostream& out) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<KernelRecord> records_;
    std::vector<std::int32_t> pixel_record_;
};

/// Weight rule of the weighted-mean engine: w = exp(-|x - xi|^2 / (2 h_x^2)) * exp(-dI^2 * c(x)), where the
/// range coefficient c depends on the center pixel only.
class WeightRule {
public:
    static WeightRule bilateral(double h_x, double h_I);
    static WeightRule multi_kernel(double h_x, const KernelField& field);

    double h_x() const { return h_x_; }
    double range_coefficient(std::size_t center) const {
        return pixel_record_.empty() ? coefficients_[0] : coefficients_[static_cast<std::size_t>(pixel_record_[center])];
    }
    double weight(std::size_t center_index, Coordinate center, double center_value, Coordinate neighbor,
                  double neighbor_value) const;

private:
    double h_x_ = 1.0;
    std::vector<double> coefficients_;
    std::vector<std::int32_t> pixel_record_;  // empty: one coefficient for all pixels
};

enum class FilterForm {
    direct,    // sum(w * I(xi)) / sum(w)
    residual,  // I(x) - sum(w * (I(x) - I(xi))) / sum(w)
};

/// Weighted mean over the (2 radius + 1)^2 window with symmetric mirror padding.
Raster weighted_mean_filter(const Raster& image, const WeightRule& rule, int radius,
                            FilterForm form = FilterForm::direct);

Raster bilateral_filter(const Raster& image, const BfParams& params, FilterForm form = FilterForm::direct);

struct MkfParams {
    ClusterConfig cluster;
    double h_x = 3.0;
    int radius = 5;

    void validate() const;
};

struct MkfResult {
    Raster output;
    ClusterTree tree;
    KernelField kernels;
};

MkfResult mkf_denoise(const Raster& image, const MkfParams& params);

}  // namespace mkf

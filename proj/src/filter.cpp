#include "mkf/filter.hpp"

#include "mkf/errors.hpp"
#include "mkf/parallel.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>

namespace mkf {

namespace {

double squared_distance(Coordinate a, Coordinate b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

}  // namespace

void BfParams::validate() const {
    if (!(h_x > 0.0)) throw ConfigError("h_x must be positive");
    if (!(h_I > 0.0)) throw ConfigError("h_I must be positive");
    if (radius < 1) throw ConfigError("radius must be >= 1");
}

double bf_weight(Coordinate center, double center_value, Coordinate neighbor, double neighbor_value,
                 const BfParams& params) {
    const double di = center_value - neighbor_value;
    return std::exp(-squared_distance(center, neighbor) / (2.0 * params.h_x * params.h_x)) *
           std::exp(-di * di / (2.0 * params.h_I * params.h_I));
}

double contextual_gain(double delta_parent, double delta_grandparent) {
    const double ratio = delta_parent / delta_grandparent;
    return ratio * ratio;
}

double mkf_weight(Coordinate center, double center_value, Coordinate neighbor, double neighbor_value, double h_x,
                  double delta, double psi) {
    const double di = center_value - neighbor_value;
    return std::exp(-squared_distance(center, neighbor) / (2.0 * h_x * h_x) - di * di * psi / (2.0 * delta * delta));
}

// ---------------------------------------------------------------------------
// KernelField
// ---------------------------------------------------------------------------

KernelField::KernelField(int width, int height, std::vector<KernelRecord> records,
                         std::vector<std::int32_t> pixel_record)
    : width_(width), height_(height), records_(std::move(records)), pixel_record_(std::move(pixel_record)) {
    if (pixel_record_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ConfigError("kernel field lookup does not cover the image");
    }
    for (auto r : pixel_record_) {
        if (r < 0 || static_cast<std::size_t>(r) >= records_.size()) throw ConfigError("dangling kernel record");
    }
    for (const auto& rec : records_) {
        if (!(rec.delta > 0.0) || !(rec.psi > 0.0) || !std::isfinite(rec.psi)) {
            throw ConfigError("kernel record for cluster " + std::to_string(rec.cluster_id) +
                              " needs positive delta and psi");
        }
    }
}

KernelField KernelField::from_tree(const ClusterTree& tree) {
    std::vector<KernelRecord> records;
    std::unordered_map<int, std::int32_t> index_of;
    for (int leaf : tree.leaves()) {
        const ClusterContext ctx = context_of(tree, leaf);
        double psi = 1.0;
        if (ctx.delta_grandparent) {
            psi = contextual_gain(*ctx.delta_parent, *ctx.delta_grandparent);
        } else if (ctx.delta_parent) {
            psi = contextual_gain(ctx.delta, *ctx.delta_parent);
        }
        index_of[leaf] = static_cast<std::int32_t>(records.size());
        records.push_back({leaf, ctx.source_id, ctx.delta, psi});
    }
    const auto& leaf_map = tree.levels().back().labels;
    std::vector<std::int32_t> lookup(leaf_map.size());
    for (std::size_t i = 0; i < leaf_map.size(); ++i) lookup[i] = index_of.at(leaf_map[i]);
    return KernelField(tree.width(), tree.height(), std::move(records), std::move(lookup));
}

KernelField KernelField::uniform(int width, int height, double delta, double psi) {
    return KernelField(width, height, {{0, 0, delta, psi}},
                       std::vector<std::int32_t>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0));
}

void KernelField::write_csv(std::ostream& out) const {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "x,y,cluster_id,delta,psi\n";
    for (std::size_t i = 0; i < pixel_record_.size(); ++i) {
        const auto& rec = at(i);
        out << i % static_cast<std::size_t>(width_) << ',' << i / static_cast<std::size_t>(width_) << ','
            << rec.cluster_id << ',' << rec.delta << ',' << rec.psi << '\n';
    }
    out.precision(old_precision);
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

WeightRule WeightRule::bilateral(double h_x, double h_I) {
    BfParams{h_x, h_I, 1}.validate();
    WeightRule rule;
    rule.h_x_ = h_x;
    rule.coefficients_ = {1.0 / (2.0 * h_I * h_I)};
    return rule;
}

WeightRule WeightRule::multi_kernel(double h_x, const KernelField& field) {
    if (!(h_x > 0.0)) throw ConfigError("h_x must be positive");
    WeightRule rule;
    rule.h_x_ = h_x;
    for (const auto& rec : field.records()) rule.coefficients_.push_back(rec.psi / (2.0 * rec.delta * rec.delta));
    rule.pixel_record_ = field.pixel_records();
    return rule;
}

double WeightRule::weight(std::size_t center_index, Coordinate center, double center_value, Coordinate neighbor,
                          double neighbor_value) const {
    const double di = center_value - neighbor_value;
    return std::exp(-squared_distance(center, neighbor) / (2.0 * h_x_ * h_x_)) *
           std::exp(-di * di * range_coefficient(center_index));
}

Raster weighted_mean_filter(const Raster& image, const WeightRule& rule, int radius, FilterForm form) {
    if (radius < 1) throw ConfigError("radius must be >= 1");
    const int w = image.width();
    const int h = image.height();
    const int side = 2 * radius + 1;

    std::vector<double> spatial(static_cast<std::size_t>(side) * side);
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            spatial[static_cast<std::size_t>((dy + radius) * side + dx + radius)] =
                std::exp(-(dx * dx + dy * dy) / (2.0 * rule.h_x() * rule.h_x()));
        }
    }
    // Mirrored source column/row for every padded position.
    std::vector<int> cols(static_cast<std::size_t>(w + 2 * radius));
    std::vector<int> rows(static_cast<std::size_t>(h + 2 * radius));
    for (int i = -radius; i < w + radius; ++i) cols[static_cast<std::size_t>(i + radius)] = mirror_index(i, w);
    for (int i = -radius; i < h + radius; ++i) rows[static_cast<std::size_t>(i + radius)] = mirror_index(i, h);

    Raster out(w, h, 0.0, image.range_hint());
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t yi) {
        const int y = static_cast<int>(yi);
        for (int x = 0; x < w; ++x) {
            const std::size_t center = image.index(x, y);
            const double ic = image[center];
            const double coef = rule.range_coefficient(center);
            double num = 0.0;
            double den = 0.0;
            for (int dy = 0; dy < side; ++dy) {
                const int sy = rows[static_cast<std::size_t>(y + dy)];
                const double* srow = &spatial[static_cast<std::size_t>(dy * side)];
                for (int dx = 0; dx < side; ++dx) {
                    const double v = image(cols[static_cast<std::size_t>(x + dx)], sy);
                    const double di = ic - v;
                    const double wt = srow[dx] * std::exp(-di * di * coef);
                    num += wt * (form == FilterForm::direct ? v : di);
                    den += wt;
                }
            }
            out[center] = form == FilterForm::direct ? num / den : ic - num / den;
        }
    });
    return out;
}

Raster bilateral_filter(const Raster& image, const BfParams& params, FilterForm form) {
    params.validate();
    return weighted_mean_filter(image, WeightRule::bilateral(params.h_x, params.h_I), params.radius, form);
}

void MkfParams::validate() const {
    cluster.validate();
    if (!(h_x > 0.0)) throw ConfigError("h_x must be positive");
    if (radius < 1) throw ConfigError("radius must be >= 1");
}

MkfResult mkf_denoise(const Raster& image, const MkfParams& params) {
    params.validate();
    ClusterTree tree = build_cluster_tree(image, params.cluster);
    KernelField kernels = KernelField::from_tree(tree);
    Raster output = weighted_mean_filter(image, WeightRule::multi_kernel(params.h_x, kernels), params.radius);
    return {std::move(output), std::move(tree), std::move(kernels)};
}

}  // namespace mkf

#include "mkf/clustering.hpp"

#include "mkf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace mkf {

// ---------------------------------------------------------------------------
// Histogram
// ---------------------------------------------------------------------------

std::int64_t Histogram::key_of(double value) const {
    return static_cast<std::int64_t>(std::floor((value - anchor) / bin_width));
}

std::size_t Histogram::bin_of(double value) const {
    const std::int64_t key = key_of(value);
    const auto it = std::lower_bound(bins.begin(), bins.end(), key,
                                     [](const HistogramBin& b, std::int64_t k) { return b.key < k; });
    if (it == bins.end() || it->key != key) throw LookupError("value not covered by histogram");
    return static_cast<std::size_t>(it - bins.begin());
}

double Histogram::total_weight() const {
    double total = 0.0;
    for (const auto& b : bins) total += b.weight;
    return total;
}

Histogram build_histogram(std::span<const double> pixels, double bin_width) {
    if (pixels.empty()) throw ConfigError("histogram needs at least one pixel");
    if (!(bin_width > 0.0)) throw ConfigError("histogram bin width must be positive");
    Histogram h;
    h.bin_width = bin_width;
    h.anchor = std::floor(*std::min_element(pixels.begin(), pixels.end()) / bin_width) * bin_width;

    std::vector<std::int64_t> keys(pixels.size());
    std::transform(pixels.begin(), pixels.end(), keys.begin(), [&](double v) { return h.key_of(v); });
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        h.bins.push_back({keys[i], h.anchor + (static_cast<double>(keys[i]) + 0.5) * bin_width,
                          static_cast<double>(j - i)});
        i = j;
    }
    return h;
}

// ---------------------------------------------------------------------------
// EM
// ---------------------------------------------------------------------------

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

double log_density(double x, const GaussComponent& c) {
    if (c.weight <= 0.0) return -std::numeric_limits<double>::infinity();
    const double z = (x - c.mu) / c.sigma;
    return std::log(c.weight) - std::log(c.sigma) - kHalfLog2Pi - 0.5 * z * z;
}

double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

GaussPair initial_gauss_pair(double min_intensity, double max_intensity) {
    GaussPair p;
    if (max_intensity > 0.0) {
        p.first = {max_intensity / 3.0, max_intensity, 0.5};
        p.second = {2.0 * max_intensity / 3.0, max_intensity, 0.5};
    } else {
        const double range = std::max(max_intensity - min_intensity, std::numeric_limits<double>::min());
        p.first = {min_intensity + range / 3.0, range, 0.5};
        p.second = {min_intensity + 2.0 * range / 3.0, range, 0.5};
    }
    return p;
}

double mixture_log_likelihood(const Histogram& histogram, const GaussPair& params) {
    double ll = 0.0;
    for (const auto& b : histogram.bins) {
        ll += b.weight * log_sum_exp(log_density(b.center, params.first), log_density(b.center, params.second));
    }
    return ll;
}

EmResult em_similarity_cluster(const Histogram& histogram, const GaussPair& init, const EmOptions& options) {
    EmResult result;
    const std::size_t n = histogram.bins.size();
    result.bin_labels.assign(n, 0);
    result.fit = init;

    if (n < 2) {
        const auto& only = histogram.bins.empty() ? HistogramBin{} : histogram.bins.front();
        result.fit.first = {only.center, options.sigma_floor, 1.0};
        result.fit.second = {only.center, options.sigma_floor, 0.0};
        result.degenerate = true;
        return result;
    }

    GaussPair theta = init;
    theta.first.sigma = std::max(theta.first.sigma, options.sigma_floor);
    theta.second.sigma = std::max(theta.second.sigma, options.sigma_floor);
    const double total = histogram.total_weight();
    std::vector<double> resp(n);  // posterior of the second component

    auto e_step = [&](const GaussPair& p) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& b = histogram.bins[i];
            const double l1 = log_density(b.center, p.first);
            const double l2 = log_density(b.center, p.second);
            const double lse = log_sum_exp(l1, l2);
            resp[i] = std::exp(l2 - lse);
            ll += b.weight * lse;
        }
        return ll;
    };

    result.log_likelihood.push_back(e_step(theta));
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        double n1 = 0.0, n2 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& b = histogram.bins[i];
            const double w2 = b.weight * resp[i];
            const double w1 = b.weight - w2;
            n1 += w1;
            n2 += w2;
            s1 += w1 * b.center;
            s2 += w2 * b.center;
        }
        GaussPair next = theta;
        next.first.weight = n1 / total;
        next.second.weight = n2 / total;
        if (n1 > 0.0) next.first.mu = s1 / n1;
        if (n2 > 0.0) next.second.mu = s2 / n2;
        double v1 = 0.0, v2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& b = histogram.bins[i];
            const double w2 = b.weight * resp[i];
            const double w1 = b.weight - w2;
            v1 += w1 * (b.center - next.first.mu) * (b.center - next.first.mu);
            v2 += w2 * (b.center - next.second.mu) * (b.center - next.second.mu);
        }
        // Maximizing the expected log-likelihood subject to sigma >= floor keeps EM monotone.
        if (n1 > 0.0) next.first.sigma = std::max(std::sqrt(v1 / n1), options.sigma_floor);
        if (n2 > 0.0) next.second.sigma = std::max(std::sqrt(v2 / n2), options.sigma_floor);

        const double change = std::max({std::abs(next.first.mu - theta.first.mu),
                                        std::abs(next.second.mu - theta.second.mu),
                                        std::abs(next.first.sigma - theta.first.sigma),
                                        std::abs(next.second.sigma - theta.second.sigma),
                                        std::abs(next.first.weight - theta.first.weight),
                                        std::abs(next.second.weight - theta.second.weight)});
        theta = next;
        result.iterations = iter + 1;
        result.log_likelihood.push_back(e_step(theta));
        if (change < options.tolerance) break;
    }

    result.fit = theta;
    bool any_first = false, any_second = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = histogram.bins[i].center;
        const bool second = log_density(c, theta.second) > log_density(c, theta.first);
        result.bin_labels[i] = second ? 1 : 0;
        (second ? any_second : any_first) = true;
    }
    result.degenerate = !(any_first && any_second);
    if (result.degenerate) std::fill(result.bin_labels.begin(), result.bin_labels.end(), 0);
    return result;
}

// ---------------------------------------------------------------------------
// Connected components
// ---------------------------------------------------------------------------

namespace {

constexpr std::int64_t kSkip = std::numeric_limits<std::int64_t>::min();

// Labels connected regions of equal keys; pixels keyed kSkip are left at -1. Returns the component count.
int connected_components(int width, int height, std::span<const std::int64_t> keys, Connectivity conn,
                         std::vector<std::int32_t>& out) {
    static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int n_dirs = conn == Connectivity::eight ? 8 : 4;
    out.assign(keys.size(), -1);
    std::vector<std::size_t> stack;
    int next = 0;
    for (std::size_t seed = 0; seed < keys.size(); ++seed) {
        if (out[seed] >= 0 || keys[seed] == kSkip) continue;
        const std::int64_t key = keys[seed];
        out[seed] = next;
        stack.assign(1, seed);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(p % static_cast<std::size_t>(width));
            const int y = static_cast<int>(p / static_cast<std::size_t>(width));
            for (int d = 0; d < n_dirs; ++d) {
                const int nx = x + kDx[d];
                const int ny = y + kDy[d];
                if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
                const std::size_t q = static_cast<std::size_t>(ny) * static_cast<std::size_t>(width) +
                                      static_cast<std::size_t>(nx);
                if (out[q] < 0 && keys[q] == key) {
                    out[q] = next;
                    stack.push_back(q);
                }
            }
        }
        ++next;
    }
    return next;
}

}  // namespace

LabelMap proximity_cluster(const LabelMap& labels, Connectivity connectivity) {
    std::vector<std::int64_t> keys(labels.labels.begin(), labels.labels.end());
    LabelMap out(labels.width, labels.height);
    connected_components(labels.width, labels.height, keys, connectivity, out.labels);
    return out;
}

// ---------------------------------------------------------------------------
// Cluster tree
// ---------------------------------------------------------------------------

void ClusterConfig::validate() const {
    if (max_depth < 2) throw ConfigError("max_depth must be >= 2");
    if (min_cluster < 1) throw ConfigError("min_cluster must be >= 1");
    if (max_cluster <= min_cluster) throw ConfigError("max_cluster must exceed min_cluster");
    if (neighborhood != Connectivity::four && neighborhood != Connectivity::eight) {
        throw ConfigError("neighborhood must be 4 or 8");
    }
    if (!(precision > 0.0)) throw ConfigError("precision must be positive");
    if (!(em_tolerance > 0.0)) throw ConfigError("em_tolerance must be positive");
}

ClusterTree::ClusterTree(std::vector<ClusterNode> nodes, std::vector<LabelMap> levels)
    : nodes_(std::move(nodes)), levels_(std::move(levels)) {
    if (nodes_.empty() || levels_.empty()) throw ConfigError("cluster tree needs a root and a level map");
}

const ClusterNode& ClusterTree::node(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
        throw LookupError("unknown cluster id " + std::to_string(id));
    }
    return nodes_[static_cast<std::size_t>(id)];
}

int ClusterTree::nearest_eligible(int id) const {
    const ClusterNode* n = &node(id);
    while (!n->eligible && n->parent) n = &node(*n->parent);
    return n->id;
}

std::vector<int> ClusterTree::leaves() const {
    std::vector<int> out;
    for (const auto& n : nodes_) {
        if (n.is_leaf()) out.push_back(n.id);
    }
    return out;
}

void ClusterTree::write_dump(std::ostream& out) const {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& n : nodes_) {
        out << n.id << ' ' << n.level << ' ' << (n.parent ? *n.parent : -1) << ' ' << n.size << ' ' << n.mu << ' '
            << n.delta << ' ' << (n.eligible ? 1 : 0) << '\n';
    }
    out.precision(old_precision);
}

ClusterTree build_cluster_tree(const Raster& image, const ClusterConfig& config) {
    config.validate();
    const std::size_t n_pixels = image.size();
    const auto values = image.values();

    std::vector<ClusterNode> nodes;
    auto make_node = [&](int level, std::optional<int> parent, std::span<const std::size_t> pixels) {
        std::vector<double> v(pixels.size());
        for (std::size_t i = 0; i < pixels.size(); ++i) v[i] = values[pixels[i]];
        const Moments m = moments(v);
        ClusterNode node;
        node.id = static_cast<int>(nodes.size());
        node.level = level;
        node.mu = m.mean;
        node.delta = std::max(m.stddev, config.precision);
        node.size = pixels.size();
        node.parent = parent;
        node.eligible = pixels.size() > static_cast<std::size_t>(config.min_cluster);
        if (parent) nodes[static_cast<std::size_t>(*parent)].children.push_back(node.id);
        nodes.push_back(std::move(node));
        return nodes.back().id;
    };

    // Pixel lists of the nodes that may still split.
    std::vector<std::pair<int, std::vector<std::size_t>>> frontier;
    {
        std::vector<std::size_t> all(n_pixels);
        for (std::size_t i = 0; i < n_pixels; ++i) all[i] = i;
        const int root = make_node(0, std::nullopt, all);
        frontier.emplace_back(root, std::move(all));
    }

    std::vector<LabelMap> levels;
    levels.emplace_back(image.width(), image.height(), 0);

    const EmOptions em_options{config.em_tolerance, config.precision, 500};
    std::vector<std::int64_t> keys(n_pixels);
    std::vector<std::int32_t> components;
    std::vector<double> cluster_values;

    for (int t = 1; t <= config.max_depth; ++t) {
        LabelMap current = levels.back();
        std::fill(keys.begin(), keys.end(), kSkip);
        bool any_split = false;

        for (const auto& [id, pixels] : frontier) {
            if (pixels.size() <= static_cast<std::size_t>(config.max_cluster)) continue;
            cluster_values.resize(pixels.size());
            for (std::size_t i = 0; i < pixels.size(); ++i) cluster_values[i] = values[pixels[i]];
            const Histogram hist = build_histogram(cluster_values, config.precision);
            if (hist.bins.size() < 2) continue;
            const auto [lo, hi] = std::minmax_element(cluster_values.begin(), cluster_values.end());
            const EmResult em = em_similarity_cluster(hist, initial_gauss_pair(*lo, *hi), em_options);
            if (em.degenerate) continue;
            for (std::size_t i = 0; i < pixels.size(); ++i) {
                keys[pixels[i]] = static_cast<std::int64_t>(id) * 2 + em.bin_labels[hist.bin_of(cluster_values[i])];
            }
            any_split = true;
        }

        std::vector<std::pair<int, std::vector<std::size_t>>> next_frontier;
        if (any_split) {
            const int count = connected_components(image.width(), image.height(), keys, config.neighborhood,
                                                   components);
            std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(count));
            for (std::size_t p = 0; p < n_pixels; ++p) {
                if (components[p] >= 0) members[static_cast<std::size_t>(components[p])].push_back(p);
            }
            for (auto& pixels : members) {
                const int parent = static_cast<int>(keys[pixels.front()] / 2);
                const int id = make_node(t, parent, pixels);
                for (std::size_t p : pixels) current.labels[p] = id;
                next_frontier.emplace_back(id, std::move(pixels));
            }
        }
        levels.push_back(std::move(current));
        frontier = std::move(next_frontier);
    }
    return ClusterTree(std::move(nodes), std::move(levels));
}

ClusterContext context_of(const ClusterTree& tree, int leaf_id) {
    const ClusterNode& source = tree.node(tree.nearest_eligible(leaf_id));
    ClusterContext ctx;
    ctx.source_id = source.id;
    ctx.level = source.level;
    ctx.delta = source.delta;
    if (source.parent) {
        const ClusterNode& parent = tree.node(*source.parent);
        ctx.delta_parent = parent.delta;
        if (source.level > 2 && parent.parent) ctx.delta_grandparent = tree.node(*parent.parent).delta;
    }
    return ctx;
}

}  // namespace mkf

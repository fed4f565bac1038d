#pragma once

#include "mkf/raster.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace mkf {

// ---------------------------------------------------------------------------
// Intensity histogram
// ---------------------------------------------------------------------------

struct HistogramBin {
    std::int64_t key = 0;  // bin index relative to the anchor
    double center = 0.0;
    double weight = 0.0;
};

/// Histogram with fixed-width bins anchored at floor(min / width) * width. Only non-empty bins are kept,
/// sorted by key.
struct Histogram {
    double anchor = 0.0;
    double bin_width = 1.0;
    std::vector<HistogramBin> bins;

    std::int64_t key_of(double value) const;
    /// Position of the bin holding `value` in `bins`. The value must belong to the histogram's input.
    std::size_t bin_of(double value) const;
    double total_weight() const;
};

Histogram build_histogram(std::span<const double> pixels, double bin_width);

// ---------------------------------------------------------------------------
// Similarity clustering: two-component EM over a weighted histogram
// ---------------------------------------------------------------------------

struct GaussComponent {
    double mu = 0.0;
    double sigma = 1.0;
    double weight = 0.5;
};

struct GaussPair {
    GaussComponent first;
    GaussComponent second;
};

/// Starting point for a split: means at 1/3 and 2/3 of the maximum intensity, both deviations equal to it.
/// When the maximum is not positive the same rule is applied to the range [min, max].
GaussPair initial_gauss_pair(double min_intensity, double max_intensity);

struct EmOptions {
    double tolerance = 1e-4;
    double sigma_floor = 1.0;
    int max_iterations = 500;
};

struct EmResult {
    GaussPair fit;
    /// Hard label per histogram bin: 0 for the first component, 1 for the second.
    std::vector<std::uint8_t> bin_labels;
    /// True when the input cannot be split in two (single bin or one component absorbed everything).
    bool degenerate = false;
    int iterations = 0;
    /// Weighted log-likelihood after each parameter update, starting with the initial parameters.
    std::vector<double> log_likelihood;
};

EmResult em_similarity_cluster(const Histogram& histogram, const GaussPair& init, const EmOptions& options = {});

/// Weighted log-likelihood of the histogram under the two-component mixture.
double mixture_log_likelihood(const Histogram& histogram, const GaussPair& params);

// ---------------------------------------------------------------------------
// Proximity clustering: connected components of equal labels
// ---------------------------------------------------------------------------

enum class Connectivity { four = 4, eight = 8 };

/// Assigns a fresh label (0, 1, ...) to every maximal connected region of equal input labels, in raster
/// scan order of each region's first pixel.
LabelMap proximity_cluster(const LabelMap& labels, Connectivity connectivity);

// ---------------------------------------------------------------------------
// Cluster tree
// ---------------------------------------------------------------------------

struct ClusterConfig {
    int max_depth = 2;          // deepest level that may be created
    int max_cluster = 20;       // clusters larger than this are split
    int min_cluster = 9;        // clusters of at most this size are ineligible
    Connectivity neighborhood = Connectivity::eight;
    double precision = 1.0;     // histogram bin width, also the deviation floor
    double em_tolerance = 1e-4;

    /// Throws ConfigError on invalid settings.
    void validate() const;
};

struct ClusterNode {
    int id = 0;
    int level = 0;
    double mu = 0.0;
    double delta = 0.0;  // population stddev of the node's pixels, floored at the precision
    std::size_t size = 0;
    std::optional<int> parent;
    std::vector<int> children;
    bool eligible = true;

    bool is_leaf() const { return children.empty(); }
};

class ClusterTree {
public:
    ClusterTree() = default;
    ClusterTree(std::vector<ClusterNode> nodes, std::vector<LabelMap> levels);

    const std::vector<ClusterNode>& nodes() const { return nodes_; }
    const ClusterNode& node(int id) const;
    const ClusterNode& root() const { return nodes_.front(); }

    /// Label maps for levels 0..depth. Label values are node ids; a leaf created at level t keeps its id in
    /// the maps of all deeper levels.
    const std::vector<LabelMap>& levels() const { return levels_; }
    const LabelMap& level(int t) const { return levels_.at(static_cast<std::size_t>(t)); }
    int depth() const { return static_cast<int>(levels_.size()) - 1; }
    int width() const { return levels_.front().width; }
    int height() const { return levels_.front().height; }

    /// Leaf node holding pixel `index`.
    int leaf_of(std::size_t index) const { return levels_.back().labels[index]; }

    /// `id` itself when eligible, otherwise its closest eligible ancestor (the root if none is eligible).
    int nearest_eligible(int id) const;

    std::vector<int> leaves() const;

    /// Text dump, one node per line: `id level parent size mu delta eligible` (parent -1 for the root).
    void write_dump(std::ostream& out) const;

private:
    std::vector<ClusterNode> nodes_;
    std::vector<LabelMap> levels_;
};

ClusterTree build_cluster_tree(const Raster& image, const ClusterConfig& config);

/// Deviations along a leaf's ancestry, after substituting the nearest eligible ancestor for an ineligible
/// leaf. The grandparent is omitted at level <= 2, where the gain falls back to (delta / delta_parent)^2;
/// both are omitted for the root.
struct ClusterContext {
    int source_id = 0;  // node whose statistics are used
    int level = 0;
    double delta = 0.0;
    std::optional<double> delta_parent;
    std::optional<double> delta_grandparent;
};

ClusterContext context_of(const ClusterTree& tree, int leaf_id);

}  // namespace mkf

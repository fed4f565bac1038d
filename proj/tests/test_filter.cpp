#include "mkf/errors.hpp"
#include "mkf/filter.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace mkf;

namespace {

double max_abs_diff(const Raster& a, const Raster& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("weight functions") {
    const BfParams p{3.0, 57.0, 5};
    CHECK(bf_weight({2, 2}, 10, {2, 2}, 10, p) == 1.0);
    CHECK(bf_weight({0, 0}, 0, {0, 0}, 57, p) == doctest::Approx(0.60653).epsilon(1e-5));
    CHECK(bf_weight({0, 0}, 0, {3, 0}, 0, p) == doctest::Approx(std::exp(-0.5)));
    CHECK(mkf_weight({1, 1}, 4, {1, 1}, 4, 3.0, 7.0, 0.5) == 1.0);
    CHECK(mkf_weight({0, 0}, 0, {0, 0}, 7, 3.0, 7.0, 1.0) == doctest::Approx(std::exp(-0.5)));
    CHECK(mkf_weight({0, 0}, 0, {0, 0}, 7, 3.0, 7.0, 0.25) == doctest::Approx(0.88250).epsilon(1e-5));
}

TEST_CASE("contextual gain") {
    CHECK(contextual_gain(10, 20) == 0.25);
    CHECK(contextual_gain(13.5, 13.5) == 1.0);
    CHECK(contextual_gain(20, 10) == 4.0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(BfParams({0.0, 57, 5}).validate(), ConfigError);
    CHECK_THROWS_AS(BfParams({3, -1, 5}).validate(), ConfigError);
    CHECK_THROWS_AS(BfParams({3, 57, -1}).validate(), ConfigError);
    MkfParams m;
    m.radius = -2;
    CHECK_THROWS_AS(mkf_denoise(Raster(4, 4), m), ConfigError);
    CHECK_THROWS_AS(KernelField(2, 2, {{0, 0, 0.0, 1.0}}, {0, 0, 0, 0}), ConfigError);
}

TEST_CASE("three-pixel window with mirrored edges") {
    const Raster img(3, 1, std::vector<double>{0, 255, 0});
    const Raster out = bilateral_filter(img, {1e6, 1e9, 1});
    for (std::size_t i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(85.0).epsilon(1e-9));
}

TEST_CASE("constant images are fixed points") {
    const Raster img(9, 7, 85.0);
    CHECK(max_abs_diff(bilateral_filter(img, {}), img) < 1e-9);
    MkfParams p;
    CHECK(max_abs_diff(mkf_denoise(img, p).output, img) < 1e-9);
}

TEST_CASE("direct and residual forms agree") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const Raster img = oracle::random_raster(rng, 13, 11);
        const BfParams p{2.0, 30.0, 3};
        CHECK(max_abs_diff(bilateral_filter(img, p, FilterForm::direct), bilateral_filter(img, p, FilterForm::residual)) <
              1e-12);
        const MkfResult r = mkf_denoise(img, {});
        const WeightRule rule = WeightRule::multi_kernel(3.0, r.kernels);
        CHECK(max_abs_diff(weighted_mean_filter(img, rule, 5, FilterForm::residual), r.output) < 1e-12);
    }
}

TEST_CASE("engine matches a brute-force direct sum") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> dim(1, 12), rad(1, 6);
    for (int trial = 0; trial < 20; ++trial) {
        const Raster img = oracle::random_raster(rng, dim(rng), dim(rng));
        const int radius = rad(rng);
        CHECK(max_abs_diff(bilateral_filter(img, {2.5, 40.0, radius}), oracle::bilateral(img, 2.5, 40.0, radius)) < 1e-10);

        MkfParams p;
        p.radius = radius;
        p.cluster.max_cluster = 8;
        p.cluster.min_cluster = 3;
        const MkfResult r = mkf_denoise(img, p);
        std::vector<double> delta(img.size()), psi(img.size());
        for (std::size_t i = 0; i < img.size(); ++i) {
            delta[i] = r.kernels.at(i).delta;
            psi[i] = r.kernels.at(i).psi;
        }
        CHECK(max_abs_diff(r.output, oracle::multi_kernel(img, p.h_x, radius, delta, psi)) < 1e-10);
    }
}

TEST_CASE("kernel field follows the tree") {
    std::mt19937_64 rng(4);
    const Raster img = oracle::blocky_raster(rng, 20, 20, 6);
    MkfParams p;
    p.cluster.max_depth = 3;
    const MkfResult r = mkf_denoise(img, p);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const KernelRecord& rec = r.kernels.at(i);
        CHECK(rec.cluster_id == r.tree.leaf_of(i));
        const ClusterContext ctx = context_of(r.tree, rec.cluster_id);
        CHECK(rec.source_id == ctx.source_id);
        CHECK(rec.delta == ctx.delta);
        double psi = 1.0;
        if (ctx.delta_grandparent) {
            psi = std::pow(*ctx.delta_parent / *ctx.delta_grandparent, 2);
        } else if (ctx.delta_parent) {
            psi = std::pow(ctx.delta / *ctx.delta_parent, 2);
        }
        CHECK(rec.psi == doctest::Approx(psi).epsilon(1e-15));
    }
    std::ostringstream csv;
    r.kernels.write_csv(csv);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,cluster_id,delta,psi");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 400);
}

TEST_CASE("weights lie in (0, 1] and outputs stay within the window range") {
    std::mt19937_64 rng(6);
    const Raster img = oracle::random_raster(rng, 15, 12);
    const BfParams p{2.0, 20.0, 2};
    const Raster out = bilateral_filter(img, p);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double lo = 1e300, hi = -1e300;
            for (int dy = -2; dy <= 2; ++dy) {
                for (int dx = -2; dx <= 2; ++dx) {
                    const double v = img(oracle::reflect(x + dx, 15), oracle::reflect(y + dy, 12));
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                    const double w = bf_weight({x, y}, img(x, y), {x + dx, y + dy}, v, p);
                    CHECK(w > 0.0);
                    CHECK(w <= 1.0);
                }
            }
            CHECK(out(x, y) >= lo - 1e-9);
            CHECK(out(x, y) <= hi + 1e-9);
        }
    }
}

TEST_CASE("bilateral equivariance") {
    std::mt19937_64 rng(8);
    const Raster img = oracle::random_raster(rng, 24, 20);
    const BfParams p{2.0, 40.0, 2};
    const Raster out = bilateral_filter(img, p);

    Raster shifted_offset = img;
    for (std::size_t i = 0; i < img.size(); ++i) shifted_offset[i] += 1000.0;
    const Raster out_offset = bilateral_filter(shifted_offset, p);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(out_offset[i] - 1000.0 == doctest::Approx(out[i]).epsilon(1e-12));

    // Translate by (3, 2); compare away from the borders.
    Raster moved(24, 20);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 24; ++x) moved(x, y) = img(std::clamp(x - 3, 0, 23), std::clamp(y - 2, 0, 19));
    const Raster out_moved = bilateral_filter(moved, p);
    for (int y = 2 + 2 * 2; y < 20 - 2; ++y)
        for (int x = 3 + 2 * 2; x < 24 - 2; ++x) CHECK(out_moved(x, y) == doctest::Approx(out(x - 3, y - 2)).epsilon(1e-12));
}

TEST_CASE("single-leaf MKF reproduces BF with the effective bandwidth") {
    std::mt19937_64 rng(9);
    const Raster img = oracle::random_raster(rng, 14, 14);
    for (double psi : {1.0, 0.25, 2.5}) {
        const double delta = 30.0;
        const KernelField field = KernelField::uniform(14, 14, delta, psi);
        const Raster mkf = weighted_mean_filter(img, WeightRule::multi_kernel(3.0, field), 4);
        const Raster bf = bilateral_filter(img, {3.0, delta / std::sqrt(psi), 4});
        CHECK(max_abs_diff(mkf, bf) < 1e-12);
    }
    // A depth-limited tree on a constant context has one leaf: the root.
    MkfParams p;
    p.cluster.max_cluster = 1000;
    const MkfResult r = mkf_denoise(img, p);
    REQUIRE(r.tree.nodes().size() == 1);
    CHECK(max_abs_diff(r.output, bilateral_filter(img, {3.0, r.tree.root().delta, 5})) < 1e-12);
}

TEST_CASE("edges between flat regions survive") {
    // 8x8: left half 40, right half 180. Columns 3 and 4 touch the boundary and stay noise-free; the rest
    // carries a small perturbation.
    Raster img(8, 8);
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            img(x, y) = x < 4 ? 40 : 180;
            if (x != 3 && x != 4) img(x, y) += n(rng);
        }
    }
    MkfParams p;
    p.cluster.max_cluster = 4;
    p.cluster.min_cluster = 3;
    const MkfResult r = mkf_denoise(img, p);
    std::vector<double> delta(img.size()), psi(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        delta[i] = r.kernels.at(i).delta;
        psi[i] = r.kernels.at(i).psi;
    }
    const Raster ref = oracle::multi_kernel(img, p.h_x, p.radius, delta, psi);
    CHECK(max_abs_diff(ref, r.output) < 1e-10);
    double boundary = 0, interior = 0;
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            const double change = std::abs(ref(x, y) - img(x, y));
            (x == 3 || x == 4 ? boundary : interior) += change;
        }
    }
    CHECK(boundary / 16 < interior / 48);
}

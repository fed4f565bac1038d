// Acceptance suite: one line per criterion, `PASS` or `FAIL`, followed by the measured quantities.
// Usage: mkf_acceptance [criterion numbers...]   (default: all)

#include "mkf/bench.hpp"
#include "mkf/parallel.hpp"
#include "mkf/raster_io.hpp"
#include "mkf/synthetic.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mkf;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double max_abs_diff(const Raster& a, const Raster& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> dim(1, 16), rad(1, 5), depth(2, 4), size(10, 40);
    std::uniform_real_distribution<double> hx(0.5, 4.0), hi(5.0, 80.0);
    double worst_bf = 0.0, worst_mkf = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Raster img = trial % 2 ? oracle::random_raster(rng, dim(rng), dim(rng))
                                     : oracle::blocky_raster(rng, dim(rng), dim(rng), 4);
        const int radius = rad(rng);
        const BfParams bp{hx(rng), hi(rng), radius};
        worst_bf = std::max(worst_bf, max_abs_diff(bilateral_filter(img, bp), oracle::bilateral(img, bp.h_x, bp.h_I, radius)));

        MkfParams mp;
        mp.h_x = hx(rng);
        mp.radius = radius;
        mp.cluster.max_depth = depth(rng);
        mp.cluster.max_cluster = size(rng);
        mp.cluster.min_cluster = std::min(mp.cluster.min_cluster, mp.cluster.max_cluster - 1);
        const MkfResult r = mkf_denoise(img, mp);
        std::vector<double> delta(img.size()), psi(img.size());
        for (std::size_t i = 0; i < img.size(); ++i) {
            // Rebuild each pixel's kernel from the tree rather than from the kernel field.
            const ClusterContext ctx = context_of(r.tree, r.tree.leaf_of(i));
            delta[i] = ctx.delta;
            psi[i] = ctx.delta_grandparent ? std::pow(*ctx.delta_parent / *ctx.delta_grandparent, 2)
                     : ctx.delta_parent    ? std::pow(ctx.delta / *ctx.delta_parent, 2)
                                           : 1.0;
        }
        worst_mkf = std::max(worst_mkf, max_abs_diff(r.output, oracle::multi_kernel(img, mp.h_x, radius, delta, psi)));
    }
    return {worst_bf <= 1e-10 && worst_mkf <= 1e-10,
            fmt("50 rasters, max|engine-oracle| BF %.2e, MKF %.2e (tol 1e-10)", worst_bf, worst_mkf)};
}

Outcome identity_suite() {
    double worst_const = 0.0, worst_ramp = 0.0;
    for (double c : {0.0, 85.0, 255.0, -1234.5}) {
        for (auto [w, h] : {std::pair{1, 1}, std::pair{7, 5}, std::pair{32, 24}}) {
            const Raster img(w, h, c);
            worst_const = std::max(worst_const, max_abs_diff(bilateral_filter(img, {}), img));
            worst_const = std::max(worst_const, max_abs_diff(mkf_denoise(img, {}).output, img));
            worst_const = std::max(worst_const, max_abs_diff(tv_denoise(img).output, img));
            worst_const = std::max(worst_const, max_abs_diff(cf_gaussian_denoise(img), img));
        }
    }
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> coef(-5.0, 5.0), offset(-100.0, 100.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = coef(rng), b = coef(rng), c = offset(rng);
        Raster img(17 + trial, 13 + trial % 5);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) img(x, y) = a * x + b * y + c;
        worst_ramp = std::max(worst_ramp, max_abs_diff(cf_gaussian_denoise(img), img));
    }
    return {worst_const <= 1e-9 && worst_ramp <= 1e-9,
            fmt("constants under BF/MKF/TV/CF max|d| %.2e, CF on 20 ramps max|d| %.2e (tol 1e-9)", worst_const,
                worst_ramp)};
}

Outcome clustering_invariants() {
    std::mt19937_64 rng(303);
    std::size_t partition_bad = 0, refine_bad = 0, connect_bad = 0, em_bad = 0, em_runs = 0, nodes_checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Raster img = trial % 2 ? oracle::random_raster(rng, 32, 32) : oracle::blocky_raster(rng, 32, 32, 8);
        if (trial % 2 == 0) {
            std::normal_distribution<double> n(0.0, 8.0);
            for (std::size_t i = 0; i < img.size(); ++i) img[i] += n(rng);
        }
        ClusterConfig cfg;
        cfg.max_depth = 4;
        cfg.neighborhood = trial % 3 == 0 ? Connectivity::four : Connectivity::eight;
        const ClusterTree tree = build_cluster_tree(img, cfg);
        const int ne = static_cast<int>(cfg.neighborhood);

        for (int t = 0; t <= tree.depth(); ++t) {
            const LabelMap& m = tree.level(t);
            std::map<int, std::size_t> count;
            for (auto id : m.labels) ++count[id];
            for (const auto& [id, n] : count) {
                const ClusterNode& node = tree.node(id);
                // Every label is a node of this level or a leaf that stopped splitting earlier.
                if (node.size != n || node.level > t || (node.level < t && !node.is_leaf())) ++partition_bad;
                if (t > 0 && node.level == t) {
                    ++nodes_checked;
                    if (!oracle::label_connected(m, id, ne)) ++connect_bad;
                }
            }
            if (t > 0) {
                const LabelMap& prev = tree.level(t - 1);
                for (std::size_t i = 0; i < m.labels.size(); ++i) {
                    const ClusterNode& node = tree.node(m.labels[i]);
                    const bool same = m.labels[i] == prev.labels[i];
                    if (!same && node.parent != prev.labels[i]) ++refine_bad;
                }
            }
        }
        // Re-run the similarity split of every node that has children and audit its likelihood trace.
        for (const auto& node : tree.nodes()) {
            if (node.is_leaf()) continue;
            const LabelMap& m = tree.level(node.level);
            std::vector<double> v;
            for (std::size_t i = 0; i < m.labels.size(); ++i)
                if (m.labels[i] == node.id) v.push_back(img[i]);
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            const EmResult em = em_similarity_cluster(build_histogram(v, cfg.precision), initial_gauss_pair(*lo, *hi),
                                                      {cfg.em_tolerance, cfg.precision, 500});
            ++em_runs;
            for (std::size_t k = 1; k < em.log_likelihood.size(); ++k) {
                if (em.log_likelihood[k] < em.log_likelihood[k - 1] - 1e-9) {
                    ++em_bad;
                    break;
                }
            }
        }
    }
    return {partition_bad + refine_bad + connect_bad + em_bad == 0,
            fmt("100 rasters: partition violations %zu, refinement violations %zu, disconnected clusters %zu/%zu, "
                "EM traces decreasing %zu/%zu",
                partition_bad, refine_bad, connect_bad, nodes_checked, em_bad, em_runs)};
}

Outcome bf_reduction() {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> dim(4, 40), rad(1, 6);
    std::uniform_real_distribution<double> hx(0.5, 5.0), hi(2.0, 100.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Raster img = oracle::random_raster(rng, dim(rng), dim(rng));
        const BfParams p{hx(rng), hi(rng), rad(rng)};
        const KernelField field = KernelField::uniform(img.width(), img.height(), p.h_I, 1.0);
        const Raster mkf = weighted_mean_filter(img, WeightRule::multi_kernel(p.h_x, field), p.radius);
        worst = std::max(worst, max_abs_diff(mkf, bilateral_filter(img, p)));
    }
    return {worst <= 1e-12, fmt("20 rasters, psi=1 and delta=h_I: max|MKF-BF| %.2e (tol 1e-12)", worst)};
}

Outcome depth_ordering() {
    SweepOptions opt;
    opt.depths = {2, 7};
    opt.sizes = {20};
    opt.levels = {10.0, 1000.0};
    std::map<std::pair<double, int>, std::vector<double>> mae;
    for (int i = 0; i < 10; ++i) {
        const Raster clean = synthetic::piecewise_constant(128, 128, derive_seed(42, static_cast<std::uint64_t>(i)));
        opt.seed = derive_seed(7, static_cast<std::uint64_t>(i));
        for (const auto& row : sweep_depth(clean, "pc" + std::to_string(i), opt)) {
            const auto spec = FilterSpec::parse(row.filter + ":" + row.params);
            mae[{noise_level_of(row), spec.mkf.cluster.max_depth}].push_back(row.mae);
        }
    }
    const double d2_10 = mean(mae[{10.0, 2}]), d7_10 = mean(mae[{10.0, 7}]);
    const double d2_1000 = mean(mae[{1000.0, 2}]), d7_1000 = mean(mae[{1000.0, 7}]);
    return {d7_10 < d2_10 && d7_1000 > d2_1000,
            fmt("10 fixtures 128x128, M_xc=20: level 10 MAE D7 %.3f vs D2 %.3f; level 1000 MAE D7 %.3f vs D2 %.3f",
                d7_10, d2_10, d7_1000, d2_1000)};
}

Outcome headline_comparison() {
    const std::filesystem::path dir = std::filesystem::path(MKF_FIXTURE_DIR) / "mri";
    std::vector<NamedRaster> slices;
    bool fixtures_match = true;
    for (int i = 0; i < 10; ++i) {
        const std::string id = fmt("slice%02d", i);
        const auto path = dir / (id + ".pgm");
        if (!std::filesystem::exists(path)) return {false, "missing fixture " + path.string()};
        Raster r = io::load_pgm(path);
        fixtures_match = fixtures_match && max_abs_diff(r, synthetic::brain_phantom(r.width(), r.height(), i, 10)) == 0.0;
        slices.push_back({id, std::move(r)});
    }
    const BrainwebOptions opt;
    const auto rows = bench_brainweb(slices, opt);
    std::map<std::pair<std::string, std::string>, std::vector<double>> mae, ssim;
    for (const auto& r : rows) {
        mae[{r.component, r.filter}].push_back(r.mae);
        ssim[{r.component, r.filter}].push_back(r.ssim);
    }
    bool pass = fixtures_match;
    std::string detail = fixtures_match ? "" : "fixtures differ from the generator; ";
    for (const std::string component : {"real", "imag"}) {
        const double m_mae = mean(mae[{component, "mkf"}]), m_ssim = mean(ssim[{component, "mkf"}]);
        detail += component + ": MKF " + fmt("%.2f/%.4f", m_mae, m_ssim);
        for (const std::string base : {"bf", "tv", "cf"}) {
            const double b_mae = mean(mae[{component, base}]), b_ssim = mean(ssim[{component, base}]);
            pass = pass && m_mae < b_mae && m_ssim > b_ssim;
            detail += ", " + base + " " + fmt("%.2f/%.4f", b_mae, b_ssim);
        }
        detail += component == "real" ? "; " : "";
    }
    return {pass, "mean MAE/SSIM over 10 slices, " + detail};
}

// sqrt(1 - R^2) of the least-squares line through (x, y).
double normalized_residual(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = mean(x), my = mean(y);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (my + slope * (x[i] - mx));
        ss_res += r * r;
    }
    return std::sqrt(ss_res / syy);
}

Outcome flatness() {
    std::vector<NamedRaster> images;
    for (int i = 0; i < 5; ++i) {
        images.push_back({"scene" + std::to_string(i),
                          synthetic::natural_scene(192, 128, derive_seed(42, static_cast<std::uint64_t>(i)))});
    }
    BsdOptions opt;
    opt.levels.clear();
    for (int l = 10; l <= 1000; l += 50) opt.levels.push_back(l);
    MkfParams shallow;
    shallow.cluster.max_depth = 2;
    shallow.cluster.max_cluster = 20;
    opt.filters = {FilterSpec::multi_kernel(shallow), FilterSpec::bilateral({3.0, 57.0, 5})};
    const auto summary = summarize_over_images(bench_bsd(images, opt));
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> curves;
    for (const auto& r : summary) {
        curves[r.filter].first.push_back(noise_level_of(r));
        curves[r.filter].second.push_back(r.mae);
    }
    const double mkf = normalized_residual(curves["mkf"].first, curves["mkf"].second);
    const double bf = normalized_residual(curves["bf"].first, curves["bf"].second);
    return {mkf < bf, fmt("5 images, 20 levels: residual from best-fit line MKF(D_p=2) %.4f vs BF(h_I=57) %.4f", mkf, bf)};
}

Outcome metric_sanity() {
    std::mt19937_64 rng(808);
    std::uniform_int_distribution<int> dim(4, 24);
    std::size_t bad_mae = 0, bad_ssim = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = dim(rng), h = dim(rng);
        const Raster a = oracle::random_raster(rng, w, h), b = oracle::random_raster(rng, w, h),
                     c = oracle::random_raster(rng, w, h);
        const double ab = mae(a, b), ba = mae(b, a), ac = mae(a, c), bc = mae(b, c);
        if (ab < 0 || ab != ba || mae(a, a) != 0.0 || ab == 0.0 || ac > ab + bc + 1e-12) ++bad_mae;
    }
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = dim(rng), h = dim(rng);
        const Raster a = oracle::random_raster(rng, w, h), b = oracle::random_raster(rng, w, h);
        const double s = ssim(a, b, 255.0);
        if (ssim(a, a, 255.0) != 1.0 || std::abs(s) > 1.0) ++bad_ssim;
    }
    return {bad_mae == 0 && bad_ssim == 0,
            fmt("mae axiom violations %zu/1000 triples, ssim violations %zu/1000 pairs", bad_mae, bad_ssim)};
}

Outcome noise_calibration() {
    const Raster clean(256, 256, 100.0);
    double worst = 0.0;
    std::string detail;
    for (double level : {10.0, 100.0, 1000.0}) {
        const Raster noisy = add_integral_noise(clean, level, 42);
        double s = 0, ss = 0;
        for (std::size_t i = 0; i < clean.size(); ++i) {
            const double d = noisy[i] - clean[i];
            s += d;
            ss += d * d;
        }
        const double n = static_cast<double>(clean.size());
        const double var = ss / n - (s / n) * (s / n);
        worst = std::max(worst, std::abs(var - level) / level);
        detail += fmt("level %g -> %.2f; ", level, var);
    }
    bool peak_ok = true;
    for (auto [w, h] : {std::pair{256, 256}, std::pair{181, 217}, std::pair{64, 33}}) {
        const Raster f = make_noise_field(w, h);
        double hi = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) hi = std::max(hi, f[i]);
        peak_ok = peak_ok && f(w / 2, h / 2) == 500.0 && hi == 500.0;
    }
    return {worst <= 0.05 && peak_ok,
            detail + fmt("max relative error %.4f (tol 0.05); field peak == 500 at center: %s", worst,
                         peak_ok ? "yes" : "no")};
}

Outcome determinism() {
    set_thread_count(3);
    std::map<std::string, Raster> clean;
    std::vector<ResultRow> rows;

    std::vector<NamedRaster> images;
    for (int i = 0; i < 2; ++i) {
        images.push_back({"scene" + std::to_string(i), synthetic::natural_scene(64, 48, static_cast<std::uint64_t>(i))});
        clean[images.back().id] = images.back().raster;
    }
    BsdOptions bsd;
    bsd.levels = {10, 370, 1000};
    for (auto& r : bench_bsd(images, bsd)) rows.push_back(std::move(r));

    const Raster pc = synthetic::piecewise_constant(48, 48, 9);
    clean["pc"] = pc;
    SweepOptions sweep;
    sweep.depths = {2, 5};
    sweep.sizes = {10, 60};
    for (auto& r : sweep_depth(pc, "pc", sweep)) rows.push_back(std::move(r));

    const BrainwebOptions bw;
    std::vector<NamedRaster> slices;
    for (int i = 0; i < 2; ++i) slices.push_back({"mri" + std::to_string(i), synthetic::brain_phantom(56, 64, i, 2)});
    std::vector<ResultRow> bw_rows = bench_brainweb(slices, bw);

    // Round-trip through CSV so that only recorded provenance is used.
    std::stringstream csv;
    write_csv(csv, rows);
    std::stringstream csv_bw;
    write_csv(csv_bw, bw_rows);
    auto parsed = read_csv(csv);
    const auto parsed_bw = read_csv(csv_bw);

    set_thread_count(1);
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& r : parsed) {
        const ScorePair s = reproduce_row(r, clean.at(r.image), 255.0);
        worst = std::max({worst, std::abs(s.mae - r.mae), std::abs(s.ssim - r.ssim)});
        ++checked;
    }
    for (const auto& r : parsed_bw) {
        const int index = r.image == "mri0" ? 0 : 1;
        const ComplexRaster c = brainweb_slice(slices[static_cast<std::size_t>(index)].raster, index, bw);
        const ScorePair s = reproduce_row(r, r.component == "real" ? c.real : c.imag, bw.dynamic_range);
        worst = std::max({worst, std::abs(s.mae - r.mae), std::abs(s.ssim - r.ssim)});
        ++checked;
    }
    set_thread_count(0);
    return {worst <= 1e-12 && checked == rows.size() + bw_rows.size(),
            fmt("%zu CSV rows re-executed (3 threads vs 1), max|d metric| %.2e (tol 1e-12)", checked, worst)};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double time_limit_s;  // 0: none
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", oracle_equivalence, 10.0},
        {2, "identity suite", identity_suite, 0.0},
        {3, "clustering invariants", clustering_invariants, 0.0},
        {4, "MKF-to-BF reduction", bf_reduction, 0.0},
        {5, "depth-vs-noise ordering", depth_ordering, 300.0},
        {6, "headline comparison", headline_comparison, 600.0},
        {7, "robustness/flatness", flatness, 0.0},
        {8, "metric sanity", metric_sanity, 5.0},
        {9, "noise calibration", noise_calibration, 0.0},
        {10, "determinism", determinism, 0.0},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
            o.pass = false;
            o.detail += fmt("; exceeded the %.0f s limit", c.time_limit_s);
        }
        std::printf("[%s] %2d %-24s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

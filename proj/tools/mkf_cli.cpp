// mkf: command-line front end for the multi-kernel filter, its baselines and the benchmark harness.
//
// Exit codes: 0 success, 1 I/O or file-format failure, 2 bad arguments. Failures print a single line
// `error: <kind>: <message>` on stderr, where kind is one of usage, io, format.

#include "mkf/bench.hpp"
#include "mkf/errors.hpp"
#include "mkf/parallel.hpp"
#include "mkf/raster_io.hpp"
#include "mkf/synthetic.hpp"
#include "mkf/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::uint64_t seed = 42;
    unsigned threads = 0;
    fs::path out_dir = ".";
};

// Filter options shared by `denoise` and `cluster`; only the ones given on the command line are forwarded.
struct FilterOptions {
    std::string filter = "mkf";
    std::string spec;
    std::map<std::string, std::string> values;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--filter", filter, "Filter id: bf, mkf, tv or cf")->check(CLI::IsMember({"bf", "mkf", "tv", "cf"}));
        cmd->add_option("--spec", spec, "Full filter spec, e.g. mkf:depth=2,max-cluster=20 (overrides --filter)");
        const std::pair<const char*, const char*> keys[] = {
            {"depth", "Maximum tree depth D_p (mkf)"},
            {"max-cluster", "Maximum cluster size M_xc (mkf)"},
            {"min-cluster", "Minimum eligible cluster size M_nc (mkf)"},
            {"ne", "Proximity neighborhood, 4 or 8 (mkf)"},
            {"precision", "Histogram bin width P (mkf)"},
            {"em-tol", "EM convergence threshold T (mkf)"},
            {"hx", "Spatial bandwidth h_x (bf, mkf)"},
            {"hi", "Range bandwidth h_I (bf)"},
            {"radius", "Window radius (bf, mkf)"},
            {"lambda", "Fidelity weight (tv)"},
            {"iters", "Iteration count (tv, cf)"},
            {"step", "Descent step (tv)"},
            {"eps", "TV smoothing epsilon (tv)"},
        };
        for (const auto& [key, help] : keys) {
            cmd->add_option_function<std::string>(std::string("--") + key,
                                                  [this, k = std::string(key)](const std::string& v) { values[k] = v; },
                                                  help);
        }
    }

    mkf::FilterSpec build() const {
        if (!spec.empty()) return mkf::FilterSpec::parse(spec);
        std::string text = filter + ":";
        for (const auto& [k, v] : values) text += k + "=" + v + ",";
        return mkf::FilterSpec::parse(text);
    }
};

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw mkf::IoError("cannot write " + path.string());
    out << content;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw mkf::IoError("cannot write " + path.string());
    return out;
}

fs::path in_out_dir(const Globals& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return g.out_dir / name;
}

std::vector<fs::path> list_images(const fs::path& dir, std::initializer_list<const char*> extensions) {
    if (!fs::is_directory(dir)) throw mkf::ConfigError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw mkf::ConfigError("no input images in " + dir.string());
    return files;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : mkf::text::split(text, ',')) {
        if (!item.empty()) out.push_back(mkf::text::parse_double(item, "list item"));
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_denoise(const Globals& g, const std::string& input, const std::string& output, const FilterOptions& fo,
                const std::string& dump_tree, const std::string& dump_kernels, const std::string& dump_energy) {
    const mkf::FilterSpec spec = fo.build();
    const mkf::Raster image = mkf::io::load_raster(input);
    mkf::Raster result;
    if (spec.kind == mkf::FilterKind::mkf) {
        auto r = mkf::mkf_denoise(image, spec.mkf);
        if (!dump_tree.empty()) {
            auto out = open_out(dump_tree);
            r.tree.write_dump(out);
        }
        if (!dump_kernels.empty()) {
            auto out = open_out(dump_kernels);
            r.kernels.write_csv(out);
        }
        result = std::move(r.output);
    } else if (spec.kind == mkf::FilterKind::tv && !dump_energy.empty()) {
        auto r = mkf::tv_denoise(image, spec.tv);
        auto out = open_out(dump_energy);
        mkf::write_energy_csv(out, r.energy);
        result = std::move(r.output);
    } else {
        if (!dump_tree.empty() || !dump_kernels.empty()) {
            throw mkf::ConfigError("--dump-tree/--dump-kernels need --filter mkf");
        }
        result = spec.apply(image);
    }
    (void)g;
    mkf::io::save_raster(result, output);
    std::cout << spec.label() << '\n';
    return 0;
}

int cmd_cluster(const Globals& g, const std::string& input, const FilterOptions& fo, const std::string& tree_path,
                const std::string& labels_dir) {
    mkf::FilterSpec spec = fo.build();
    if (spec.kind != mkf::FilterKind::mkf) throw mkf::ConfigError("cluster takes mkf parameters only");
    const mkf::Raster image = mkf::io::load_raster(input);
    const mkf::ClusterTree tree = mkf::build_cluster_tree(image, spec.mkf.cluster);
    const fs::path tree_file = tree_path.empty() ? in_out_dir(g, "tree.txt") : fs::path(tree_path);
    auto out = open_out(tree_file);
    tree.write_dump(out);
    if (!labels_dir.empty()) {
        fs::create_directories(labels_dir);
        for (int t = 0; t <= tree.depth(); ++t) {
            mkf::io::save_f64_raster(tree.level(t).to_raster(), fs::path(labels_dir) / ("level_" + std::to_string(t) + ".mkfr"));
        }
    }
    std::cout << "nodes=" << tree.nodes().size() << " leaves=" << tree.leaves().size() << " depth=" << tree.depth()
              << '\n';
    return 0;
}

int cmd_noise(const Globals& g, const std::string& input, const std::string& output, const std::string& noise_text,
              const std::string& field_out) {
    mkf::NoiseSpec spec = mkf::NoiseSpec::parse(noise_text);
    if (noise_text.find("seed=") == std::string::npos) spec.seed = g.seed;
    const mkf::Raster image = mkf::io::load_raster(input);
    mkf::io::save_raster(mkf::apply_noise(image, spec), output);
    if (!field_out.empty()) {
        if (spec.kind != mkf::NoiseSpec::Kind::field) throw mkf::ConfigError("--field-out needs field noise");
        mkf::io::save_f64_raster(mkf::make_noise_field(image.width(), image.height(), {spec.center, spec.spread, spec.level}),
                                 field_out);
    }
    std::cout << spec.descriptor() << ";seed=" << spec.seed;
    if (spec.kind == mkf::NoiseSpec::Kind::integral) {
        std::cout << ";normalized=" << mkf::text::format_double(mkf::normalized_noise_level(spec.level));
    }
    std::cout << '\n';
    return 0;
}

int cmd_metrics(const std::string& a, const std::string& b, double range) {
    const mkf::ScorePair s = mkf::score(mkf::io::load_raster(a), mkf::io::load_raster(b), range);
    std::cout << "mae,ssim\n" << mkf::text::format_double(s.mae) << ',' << mkf::text::format_double(s.ssim) << '\n';
    return 0;
}

int cmd_sweep_depth(const Globals& g, const std::string& input, const std::string& depths, const std::string& sizes,
                    const std::string& levels, const FilterOptions& fo) {
    mkf::SweepOptions opt;
    opt.seed = g.seed;
    if (!fo.values.empty() || !fo.spec.empty()) opt.base = fo.build().mkf;
    if (!depths.empty()) {
        opt.depths.clear();
        for (double d : parse_list(depths)) opt.depths.push_back(static_cast<int>(d));
    }
    if (!sizes.empty()) {
        opt.sizes.clear();
        for (double s : parse_list(sizes)) opt.sizes.push_back(static_cast<int>(s));
    }
    if (!levels.empty()) opt.levels = parse_list(levels);
    const mkf::Raster image = mkf::io::load_raster(input);
    const auto rows = mkf::sweep_depth(image, fs::path(input).stem().string(), opt);
    {
        auto out = open_out(in_out_dir(g, "sweep_depth.csv"));
        mkf::write_csv(out, rows);
    }
    // One chart per noise level and metric: cluster size on x, one curve per depth.
    for (double level : opt.levels) {
        for (const char* metric : {"mae", "ssim"}) {
            std::map<int, mkf::Series> by_depth;
            for (const auto& r : rows) {
                if (mkf::noise_level_of(r) != level) continue;
                const auto spec = mkf::FilterSpec::parse(r.filter + ":" + r.params);
                auto& s = by_depth[spec.mkf.cluster.max_depth];
                s.label = "depth " + std::to_string(spec.mkf.cluster.max_depth);
                s.points.emplace_back(spec.mkf.cluster.max_cluster, std::string(metric) == "mae" ? r.mae : r.ssim);
            }
            std::vector<mkf::Series> series;
            for (auto& [_, s] : by_depth) series.push_back(std::move(s));
            const std::string name = std::string("sweep_") + metric + "_level" + mkf::text::format_double(level) + ".svg";
            write_text(in_out_dir(g, name),
                       mkf::render_svg(series, std::string(metric) + " vs cluster size, noise level " + mkf::text::format_double(level),
                                       "maximum cluster size", metric));
        }
    }
    std::cout << rows.size() << " rows\n";
    return 0;
}

int cmd_bench_bsd(const Globals& g, const std::string& dir, const std::string& levels,
                  const std::vector<std::string>& filters) {
    mkf::BsdOptions opt;
    opt.seed = g.seed;
    if (!levels.empty()) opt.levels = parse_list(levels);
    if (!filters.empty()) {
        opt.filters.clear();
        for (const auto& f : filters) opt.filters.push_back(mkf::FilterSpec::parse(f));
    }
    std::vector<mkf::NamedRaster> images;
    for (const auto& p : list_images(dir, {".pgm"})) images.push_back({p.stem().string(), mkf::io::load_pgm(p)});
    const auto rows = mkf::bench_bsd(images, opt);
    const auto summary = mkf::summarize_over_images(rows);
    {
        auto out = open_out(in_out_dir(g, "bsd_rows.csv"));
        mkf::write_csv(out, rows);
    }
    {
        auto out = open_out(in_out_dir(g, "bsd_summary.csv"));
        mkf::write_csv(out, summary);
    }
    for (const char* metric : {"mae", "ssim"}) {
        const auto series = mkf::series_from_rows(summary, metric, mkf::noise_level_of);
        write_text(in_out_dir(g, std::string("bsd_") + metric + ".svg"),
                   mkf::render_svg(series, std::string("mean ") + metric + " over " + std::to_string(images.size()) + " images",
                                   "noise level (variance)", metric));
    }
    std::cout << rows.size() << " rows, " << summary.size() << " summary rows\n";
    return 0;
}

int cmd_bench_brainweb(const Globals& g, const std::string& dir, int max_slices, const std::string& noise_text,
                       const std::vector<std::string>& filters) {
    mkf::BrainwebOptions opt;
    opt.seed = g.seed;
    if (!noise_text.empty()) {
        opt.field = mkf::NoiseSpec::parse(noise_text);
        if (opt.field.kind != mkf::NoiseSpec::Kind::field) throw mkf::ConfigError("bench-brainweb needs field noise");
    }
    if (!filters.empty()) {
        opt.filters.clear();
        for (const auto& f : filters) opt.filters.push_back(mkf::FilterSpec::parse(f));
    }
    std::vector<mkf::NamedRaster> slices;
    for (const auto& p : list_images(dir, {".mkfr", ".pgm"})) {
        if (max_slices > 0 && static_cast<int>(slices.size()) >= max_slices) break;
        slices.push_back({p.stem().string(), mkf::io::load_raster(p)});
    }
    const auto rows = mkf::bench_brainweb(slices, opt);
    {
        auto out = open_out(in_out_dir(g, "brainweb.csv"));
        mkf::write_csv(out, rows);
    }
    std::map<std::string, double> slice_index;
    for (std::size_t i = 0; i < slices.size(); ++i) slice_index[slices[i].id] = static_cast<double>(i);
    for (const char* component : {"real", "imag"}) {
        std::vector<mkf::ResultRow> part;
        std::copy_if(rows.begin(), rows.end(), std::back_inserter(part),
                     [&](const mkf::ResultRow& r) { return r.component == component; });
        for (const char* metric : {"mae", "ssim"}) {
            const auto series = mkf::series_from_rows(part, metric, [&](const mkf::ResultRow& r) { return slice_index.at(r.image); });
            write_text(in_out_dir(g, std::string("brainweb_") + metric + "_" + component + ".svg"),
                       mkf::render_svg(series, std::string(metric) + " of the " + component + " component", "slice", metric));
        }
    }
    std::cout << rows.size() << " rows\n";
    return 0;
}

int cmd_synth(const Globals& g, const std::string& kind, int count, int width, int height) {
    if (count < 1) throw mkf::ConfigError("--count must be >= 1");
    if (height <= 0) height = width;
    fs::create_directories(g.out_dir);
    for (int i = 0; i < count; ++i) {
        char name[32];
        if (kind == "phantom") {
            std::snprintf(name, sizeof name, "slice%02d.pgm", i);
            mkf::io::save_pgm(mkf::synthetic::brain_phantom(width, height, i, count), g.out_dir / name, 4095);
        } else {
            std::snprintf(name, sizeof name, "%s%02d.pgm", kind.c_str(), i);
            const auto seed = mkf::derive_seed(g.seed, static_cast<std::uint64_t>(i));
            const auto img = kind == "scene" ? mkf::synthetic::natural_scene(width, height, seed)
                                             : mkf::synthetic::piecewise_constant(width, height, seed);
            mkf::io::save_pgm(img, g.out_dir / name);
        }
    }
    std::cout << count << " " << kind << " images written to " << g.out_dir.string() << '\n';
    return 0;
}

int cmd_convert(const std::string& input, const std::string& output) {
    const auto rgb = mkf::io::load_ppm(input);
    mkf::io::save_pgm(mkf::io::to_grayscale(rgb.rgb, rgb.width, rgb.height), output);
    return 0;
}

int fail(const char* kind, const std::string& message, int code) {
    std::string line = message;
    std::replace(line.begin(), line.end(), '\n', ' ');
    std::cerr << "error: " << kind << ": " << line << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-kernel filtering, baselines and denoising benchmarks"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    std::string out_dir = ".";
    app.add_option("--seed", g.seed, "Base seed for noise generation");
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)");
    app.add_option("--out-dir", out_dir, "Directory for generated outputs");

    std::function<int()> action;

    // denoise
    auto* denoise = app.add_subcommand("denoise", "Filter one image");
    std::string d_in, d_out, d_tree, d_kernels, d_energy;
    FilterOptions d_filter;
    denoise->add_option("input", d_in, "Input raster (.pgm or .mkfr)")->required();
    denoise->add_option("output", d_out, "Output raster (.pgm or .mkfr)")->required();
    d_filter.add_to(denoise);
    denoise->add_option("--dump-tree", d_tree, "Write the cluster tree (mkf)");
    denoise->add_option("--dump-kernels", d_kernels, "Write per-pixel kernel CSV x,y,cluster_id,delta,psi (mkf)");
    denoise->add_option("--dump-energy", d_energy, "Write the TV energy trace CSV iter,energy (tv)");
    denoise->callback([&] { action = [&] { return cmd_denoise(g, d_in, d_out, d_filter, d_tree, d_kernels, d_energy); }; });

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Build and dump the cluster tree of one image");
    std::string c_in, c_tree, c_labels;
    FilterOptions c_filter;
    cluster->add_option("input", c_in, "Input raster")->required();
    c_filter.add_to(cluster);
    cluster->add_option("--dump-tree", c_tree, "Tree dump path (default <out-dir>/tree.txt)");
    cluster->add_option("--labels-dir", c_labels, "Directory for per-level label maps (MKFR)");
    cluster->callback([&] { action = [&] { return cmd_cluster(g, c_in, c_filter, c_tree, c_labels); }; });

    // noise
    auto* noise = app.add_subcommand("noise", "Add synthetic noise to one image");
    std::string n_in, n_out, n_spec = "integral:level=100", n_field;
    noise->add_option("input", n_in, "Input raster")->required();
    noise->add_option("output", n_out, "Output raster (.mkfr keeps unclamped values)")->required();
    noise->add_option("--noise", n_spec, "integral:level=V[,seed=S] or field:peak=P,spread=auto|S[,cx=X,cy=Y][,seed=S]");
    noise->add_option("--field-out", n_field, "Write the per-pixel sigma field (field noise)");
    noise->callback([&] { action = [&] { return cmd_noise(g, n_in, n_out, n_spec, n_field); }; });

    // metrics
    auto* metrics = app.add_subcommand("metrics", "MAE and SSIM between two rasters");
    std::string m_a, m_b;
    double m_range = 255.0;
    metrics->add_option("reference", m_a)->required();
    metrics->add_option("estimate", m_b)->required();
    metrics->add_option("--range", m_range, "Dynamic range L for SSIM");
    metrics->callback([&] { action = [&] { return cmd_metrics(m_a, m_b, m_range); }; });

    // sweep-depth
    auto* sweep = app.add_subcommand("sweep-depth", "Tree depth x cluster size x noise level study on one image");
    std::string s_in, s_depths, s_sizes, s_levels;
    FilterOptions s_filter;
    sweep->add_option("image", s_in, "Clean 8-bit image")->required();
    sweep->add_option("--depths", s_depths, "Comma-separated depths (default 2..7)");
    sweep->add_option("--sizes", s_sizes, "Comma-separated cluster sizes (default 10..200 step 10)");
    sweep->add_option("--levels", s_levels, "Comma-separated noise variances (default 10,1000)");
    s_filter.add_to(sweep);
    sweep->callback([&] { action = [&] { return cmd_sweep_depth(g, s_in, s_depths, s_sizes, s_levels, s_filter); }; });

    // bench-bsd
    auto* bsd = app.add_subcommand("bench-bsd", "Integral-noise benchmark over a directory of grayscale PGMs");
    std::string b_dir, b_levels;
    std::vector<std::string> b_filters;
    bsd->add_option("dir", b_dir, "Directory of .pgm images")->required();
    bsd->add_option("--levels", b_levels, "Comma-separated noise variances (default 10..1000 step 10)");
    bsd->add_option("--filter", b_filters, "Filter spec, repeatable (default bf h_I 57/5, mkf depth 2/7)");
    bsd->callback([&] { action = [&] { return cmd_bench_bsd(g, b_dir, b_levels, b_filters); }; });

    // bench-brainweb
    auto* brain = app.add_subcommand("bench-brainweb", "Spatially varying noise benchmark on complex MRI slices");
    std::string w_dir, w_noise;
    int w_slices = 0;
    std::vector<std::string> w_filters;
    brain->add_option("volume", w_dir, "Directory of magnitude slices (.mkfr or .pgm)")->required();
    brain->add_option("--slices", w_slices, "Use at most this many slices");
    brain->add_option("--noise", w_noise, "Field noise spec (default field:peak=500,spread=auto)");
    brain->add_option("--filter", w_filters, "Filter spec, repeatable (default bf, tv, cf, mkf)");
    brain->callback([&] { action = [&] { return cmd_bench_brainweb(g, w_dir, w_slices, w_noise, w_filters); }; });

    // synth
    auto* synth = app.add_subcommand("synth", "Write synthetic fixtures (phantom slices, scenes or piecewise images)");
    std::string y_kind = "phantom";
    int y_count = 10, y_width = 128, y_height = 0;
    synth->add_option("--kind", y_kind)->check(CLI::IsMember({"phantom", "scene", "piecewise"}));
    synth->add_option("--count", y_count);
    synth->add_option("--width", y_width);
    synth->add_option("--height", y_height);
    synth->callback([&] { action = [&] { return cmd_synth(g, y_kind, y_count, y_width, y_height); }; });

    // convert
    auto* convert = app.add_subcommand("convert", "Convert a binary PPM to a grayscale PGM (BT.601 luma)");
    std::string v_in, v_out;
    convert->add_option("input", v_in)->required();
    convert->add_option("output", v_out)->required();
    convert->callback([&] { action = [&] { return cmd_convert(v_in, v_out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        g.out_dir = out_dir;
        mkf::set_thread_count(g.threads);
        return action();
    } catch (const mkf::ConfigError& e) {
        return fail("usage", e.what(), 2);
    } catch (const mkf::FormatError& e) {
        return fail("format", e.what(), 1);
    } catch (const mkf::IoError& e) {
        return fail("io", e.what(), 1);
    } catch (const fs::filesystem_error& e) {
        return fail("io", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}

#include "mkf/bench.hpp"

#include "mkf/errors.hpp"
#include "mkf/parallel.hpp"
#include "mkf/text.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

namespace mkf {

// ---------------------------------------------------------------------------
// FilterSpec
// ---------------------------------------------------------------------------

namespace {

int as_int(const std::string& value, const std::string& key) {
    return static_cast<int>(text::parse_int(value, key));
}

}  // namespace

FilterSpec FilterSpec::parse(std::string_view spec_text) {
    const auto [head, pairs] = text::split_spec(spec_text);
    FilterSpec spec;
    if (head == "bf") {
        spec.kind = FilterKind::bf;
    } else if (head == "mkf") {
        spec.kind = FilterKind::mkf;
    } else if (head == "tv") {
        spec.kind = FilterKind::tv;
    } else if (head == "cf") {
        spec.kind = FilterKind::cf;
    } else {
        throw ConfigError("unknown filter '" + head + "' (expected bf, mkf, tv or cf)");
    }
    for (const auto& [key, value] : pairs) {
        bool known = true;
        switch (spec.kind) {
            case FilterKind::bf:
                if (key == "hi") spec.bf.h_I = text::parse_double(value, key);
                else if (key == "hx") spec.bf.h_x = text::parse_double(value, key);
                else if (key == "radius") spec.bf.radius = as_int(value, key);
                else known = false;
                break;
            case FilterKind::mkf: {
                auto& c = spec.mkf.cluster;
                if (key == "depth") c.max_depth = as_int(value, key);
                else if (key == "max-cluster") c.max_cluster = as_int(value, key);
                else if (key == "min-cluster") c.min_cluster = as_int(value, key);
                else if (key == "ne") {
                    const int ne = as_int(value, key);
                    if (ne != 4 && ne != 8) throw ConfigError("ne must be 4 or 8");
                    c.neighborhood = ne == 4 ? Connectivity::four : Connectivity::eight;
                }
                else if (key == "precision") c.precision = text::parse_double(value, key);
                else if (key == "em-tol") c.em_tolerance = text::parse_double(value, key);
                else if (key == "hx") spec.mkf.h_x = text::parse_double(value, key);
                else if (key == "radius") spec.mkf.radius = as_int(value, key);
                else known = false;
                break;
            }
            case FilterKind::tv:
                if (key == "lambda") spec.tv.lambda = text::parse_double(value, key);
                else if (key == "iters") spec.tv.iters = as_int(value, key);
                else if (key == "step") spec.tv.step = text::parse_double(value, key);
                else if (key == "eps") spec.tv.epsilon = text::parse_double(value, key);
                else known = false;
                break;
            case FilterKind::cf:
                if (key == "iters") spec.cf.iters = as_int(value, key);
                else if (key == "mode") {
                    if (value != "gaussian") throw ConfigError("only the gaussian curvature mode is available");
                }
                else known = false;
                break;
        }
        if (!known) throw ConfigError("unknown parameter '" + key + "' for filter " + head);
    }
    spec.validate();
    return spec;
}

FilterSpec FilterSpec::bilateral(const BfParams& p) {
    FilterSpec s;
    s.kind = FilterKind::bf;
    s.bf = p;
    return s;
}

FilterSpec FilterSpec::multi_kernel(const MkfParams& p) {
    FilterSpec s;
    s.kind = FilterKind::mkf;
    s.mkf = p;
    return s;
}

FilterSpec FilterSpec::total_variation(const TvParams& p) {
    FilterSpec s;
    s.kind = FilterKind::tv;
    s.tv = p;
    return s;
}

FilterSpec FilterSpec::curvature(const CfParams& p) {
    FilterSpec s;
    s.kind = FilterKind::cf;
    s.cf = p;
    return s;
}

std::string FilterSpec::id() const {
    switch (kind) {
        case FilterKind::bf: return "bf";
        case FilterKind::mkf: return "mkf";
        case FilterKind::tv: return "tv";
        case FilterKind::cf: return "cf";
    }
    return "?";
}

std::string FilterSpec::digest() const {
    using text::format_double;
    switch (kind) {
        case FilterKind::bf:
            return "hi=" + format_double(bf.h_I) + ";hx=" + format_double(bf.h_x) + ";radius=" + std::to_string(bf.radius);
        case FilterKind::mkf: {
            const auto& c = mkf.cluster;
            return "depth=" + std::to_string(c.max_depth) + ";max-cluster=" + std::to_string(c.max_cluster) +
                   ";min-cluster=" + std::to_string(c.min_cluster) +
                   ";ne=" + std::to_string(static_cast<int>(c.neighborhood)) + ";precision=" + format_double(c.precision) +
                   ";em-tol=" + format_double(c.em_tolerance) + ";hx=" + format_double(mkf.h_x) +
                   ";radius=" + std::to_string(mkf.radius);
        }
        case FilterKind::tv:
            return "lambda=" + format_double(tv.lambda) + ";iters=" + std::to_string(tv.iters) +
                   ";step=" + format_double(tv.step) + ";eps=" + format_double(tv.epsilon);
        case FilterKind::cf:
            return "mode=gaussian;iters=" + std::to_string(cf.iters);
    }
    return {};
}

void FilterSpec::validate() const {
    switch (kind) {
        case FilterKind::bf: bf.validate(); break;
        case FilterKind::mkf: mkf.validate(); break;
        case FilterKind::tv: tv.validate(); break;
        case FilterKind::cf: cf.validate(); break;
    }
}

Raster FilterSpec::apply(const Raster& image) const {
    switch (kind) {
        case FilterKind::bf: return bf_denoise(image, bf);
        case FilterKind::mkf: return mkf_denoise(image, mkf).output;
        case FilterKind::tv: return tv_denoise(image, tv).output;
        case FilterKind::cf: return cf_gaussian_denoise(image, cf);
    }
    throw ConfigError("unknown filter kind");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) throw ConfigError("unterminated quote in CSV row: " + line);
    return fields;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << csv_field(r.image) << ',' << csv_field(r.filter) << ',' << csv_field(r.params) << ','
            << csv_field(r.noise) << ',' << r.seed << ',' << csv_field(r.component) << ',' << text::format_double(r.mae)
            << ',' << text::format_double(r.ssim) << ',' << text::format_double(std::round(r.ms * 1000.0) / 1000.0)
            << '\n';
    }
}

std::vector<ResultRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("CSV header mismatch");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csv_split(line);
        if (f.size() != 9) throw ConfigError("CSV row has " + std::to_string(f.size()) + " fields: " + line);
        ResultRow r;
        r.image = f[0];
        r.filter = f[1];
        r.params = f[2];
        r.noise = f[3];
        r.seed = text::parse_u64(f[4], "seed");
        r.component = f[5];
        r.mae = text::parse_double(f[6], "mae");
        r.ssim = text::parse_double(f[7], "ssim");
        r.ms = text::parse_double(f[8], "ms");
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Cases
// ---------------------------------------------------------------------------

namespace {

ResultRow make_row(const std::string& image, const FilterSpec& filter, const NoiseSpec& noise,
                   const std::string& component, const ScorePair& score, double ms) {
    return {image, filter.id(), filter.digest(), noise.descriptor(), noise.seed, component, score.mae, score.ssim, ms};
}

// Filters an already-noised image and scores it.
std::pair<ScorePair, double> filter_and_score(const Raster& clean, const Raster& noisy, const FilterSpec& filter,
                                              double dynamic_range, Raster* output = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    Raster out = filter.apply(noisy);
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    const ScorePair s = score(clean, out, dynamic_range);
    if (output) *output = std::move(out);
    return {s, ms};
}

}  // namespace

CaseResult run_case(const Raster& clean, const FilterSpec& filter, const NoiseSpec& noise, double dynamic_range) {
    CaseResult result;
    result.noisy = apply_noise(clean, noise);
    std::tie(result.score, result.ms) = filter_and_score(clean, result.noisy, filter, dynamic_range, &result.output);
    return result;
}

ScorePair reproduce_row(const ResultRow& row, const Raster& clean, double dynamic_range) {
    const FilterSpec filter = FilterSpec::parse(row.filter + ":" + row.params);
    NoiseSpec noise = NoiseSpec::parse(row.noise);
    noise.seed = row.seed;
    return run_case(clean, filter, noise, dynamic_range).score;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

SweepOptions::SweepOptions() {
    for (int s = 10; s <= 200; s += 10) sizes.push_back(s);
}

std::vector<ResultRow> sweep_depth(const Raster& clean, const std::string& image_id, const SweepOptions& options) {
    struct Item {
        std::size_t level;
        int depth;
        int size;
    };
    std::vector<Item> items;
    for (std::size_t l = 0; l < options.levels.size(); ++l) {
        for (int d : options.depths) {
            for (int s : options.sizes) items.push_back({l, d, s});
        }
    }
    std::vector<NoiseSpec> noises;
    std::vector<Raster> noisy;
    for (std::size_t l = 0; l < options.levels.size(); ++l) {
        NoiseSpec n;
        n.kind = NoiseSpec::Kind::integral;
        n.level = options.levels[l];
        n.seed = derive_seed(options.seed, static_cast<std::uint64_t>(options.levels[l]));
        noisy.push_back(apply_noise(clean, n));
        noises.push_back(n);
    }
    std::vector<ResultRow> rows(items.size());
    parallel_for(items.size(), [&](std::size_t i) {
        const Item& it = items[i];
        MkfParams p = options.base;
        p.cluster.max_depth = it.depth;
        p.cluster.max_cluster = it.size;
        p.cluster.min_cluster = std::min(p.cluster.min_cluster, it.size - 1);
        const FilterSpec filter = FilterSpec::multi_kernel(p);
        const auto [s, ms] = filter_and_score(clean, noisy[it.level], filter, 255.0);
        rows[i] = make_row(image_id, filter, noises[it.level], "gray", s, ms);
    });
    return rows;
}

BsdOptions::BsdOptions() {
    for (int l = 10; l <= 1000; l += 10) levels.push_back(l);
    filters.push_back(FilterSpec::bilateral({3.0, 57.0, 5}));
    filters.push_back(FilterSpec::bilateral({3.0, 5.0, 5}));
    MkfParams shallow;
    shallow.cluster.max_depth = 2;
    shallow.cluster.max_cluster = 20;
    MkfParams deep = shallow;
    deep.cluster.max_depth = 7;
    filters.push_back(FilterSpec::multi_kernel(shallow));
    filters.push_back(FilterSpec::multi_kernel(deep));
}

std::vector<ResultRow> bench_bsd(const std::vector<NamedRaster>& images, const BsdOptions& options) {
    if (images.empty()) throw ConfigError("no images to benchmark");
    const std::size_t per_image = options.levels.size();
    const std::size_t n_filters = options.filters.size();
    std::vector<ResultRow> rows(images.size() * per_image * n_filters);
    parallel_for(images.size() * per_image, [&](std::size_t item) {
        const std::size_t img = item / per_image;
        const std::size_t lvl = item % per_image;
        NoiseSpec noise;
        noise.kind = NoiseSpec::Kind::integral;
        noise.level = options.levels[lvl];
        noise.seed = derive_seed(derive_seed(options.seed, img), static_cast<std::uint64_t>(options.levels[lvl]));
        const Raster& clean = images[img].raster;
        const Raster noisy = apply_noise(clean, noise);
        for (std::size_t f = 0; f < n_filters; ++f) {
            const auto [s, ms] = filter_and_score(clean, noisy, options.filters[f], options.dynamic_range);
            rows[item * n_filters + f] = make_row(images[img].id, options.filters[f], noise, "gray", s, ms);
        }
    });
    return rows;
}

std::vector<ResultRow> summarize_over_images(const std::vector<ResultRow>& rows) {
    using Key = std::tuple<std::string, std::string, std::string, std::string>;
    struct Acc {
        std::size_t first = 0;
        std::size_t count = 0;
        double mae = 0.0, ssim = 0.0, ms = 0.0;
    };
    std::map<Key, Acc> groups;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto [it, inserted] = groups.try_emplace(Key{r.filter, r.params, r.noise, r.component});
        if (inserted) it->second.first = i;
        it->second.count++;
        it->second.mae += r.mae;
        it->second.ssim += r.ssim;
        it->second.ms += r.ms;
    }
    // Keep the order in which groups first appear.
    std::vector<std::pair<std::size_t, ResultRow>> ordered;
    for (const auto& [key, acc] : groups) {
        ResultRow r = rows[acc.first];
        r.image = "mean";
        r.seed = 0;
        const double n = static_cast<double>(acc.count);
        r.mae = acc.mae / n;
        r.ssim = acc.ssim / n;
        r.ms = acc.ms / n;
        ordered.emplace_back(acc.first, std::move(r));
    }
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<ResultRow> out;
    for (auto& [_, r] : ordered) out.push_back(std::move(r));
    return out;
}

BrainwebOptions::BrainwebOptions() {
    filters.push_back(FilterSpec::bilateral({3.0, 57.0, 2}));
    filters.push_back(FilterSpec::total_variation({1.25, 100, 0.1, 1e-6}));
    filters.push_back(FilterSpec::curvature({10, CurvatureMode::gaussian}));
    MkfParams p;
    p.cluster.max_depth = 2;
    p.cluster.max_cluster = 20;
    p.radius = 2;
    filters.push_back(FilterSpec::multi_kernel(p));
    field.kind = NoiseSpec::Kind::field;
    field.level = 500.0;
}

ComplexRaster brainweb_slice(const Raster& magnitude, int index, const BrainwebOptions& options) {
    PhaseSpec phase = options.phase;
    phase.slice_index = index;
    return synthesize_complex_slice(magnitude, phase);
}

std::vector<ResultRow> bench_brainweb(const std::vector<NamedRaster>& magnitudes, const BrainwebOptions& options) {
    if (magnitudes.empty()) throw ConfigError("no slices to benchmark");
    const std::size_t n_filters = options.filters.size();
    std::vector<ResultRow> rows(magnitudes.size() * 2 * n_filters);
    parallel_for(magnitudes.size() * 2, [&](std::size_t item) {
        const std::size_t slice = item / 2;
        const bool imag = item % 2 == 1;
        const ComplexRaster clean = brainweb_slice(magnitudes[slice].raster, static_cast<int>(slice), options);
        const Raster& component = imag ? clean.imag : clean.real;
        NoiseSpec noise = options.field;
        noise.seed = derive_seed(derive_seed(options.seed, slice), imag ? 1 : 0);
        const Raster noisy = apply_noise(component, noise);
        for (std::size_t f = 0; f < n_filters; ++f) {
            const auto [s, ms] = filter_and_score(component, noisy, options.filters[f], options.dynamic_range);
            rows[item * n_filters + f] =
                make_row(magnitudes[slice].id, options.filters[f], noise, imag ? "imag" : "real", s, ms);
        }
    });
    return rows;
}

double noise_level_of(const ResultRow& row) {
    const auto [head, pairs] = text::split_spec(row.noise);
    for (const auto& [key, value] : pairs) {
        if (key == "level" || key == "peak") return text::parse_double(value, key);
    }
    throw ConfigError("noise descriptor without a level: " + row.noise);
}

}  // namespace mkf

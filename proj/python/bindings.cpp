#include "mkf/bench.hpp"
#include "mkf/errors.hpp"
#include "mkf/parallel.hpp"
#include "mkf/raster_io.hpp"
#include "mkf/synthetic.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

mkf::Raster to_raster(const Array& a) {
    if (a.ndim() != 2) throw mkf::ConfigError("expected a 2-D array");
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    std::vector<double> values(a.data(), a.data() + a.size());
    return mkf::Raster(w, h, std::move(values));
}

Array to_array(const mkf::Raster& r) {
    Array out({r.height(), r.width()});
    std::copy(r.values().begin(), r.values().end(), out.mutable_data());
    return out;
}

py::array_t<std::int32_t> to_array(const mkf::LabelMap& m) {
    py::array_t<std::int32_t> out({m.height, m.width});
    std::copy(m.labels.begin(), m.labels.end(), out.mutable_data());
    return out;
}

mkf::MkfParams mkf_params(int depth, int max_cluster, int min_cluster, int ne, double precision, double em_tol,
                          double h_x, int radius) {
    mkf::MkfParams p;
    p.cluster.max_depth = depth;
    p.cluster.max_cluster = max_cluster;
    p.cluster.min_cluster = min_cluster;
    if (ne != 4 && ne != 8) throw mkf::ConfigError("ne must be 4 or 8");
    p.cluster.neighborhood = ne == 4 ? mkf::Connectivity::four : mkf::Connectivity::eight;
    p.cluster.precision = precision;
    p.cluster.em_tolerance = em_tol;
    p.h_x = h_x;
    p.radius = radius;
    p.validate();
    return p;
}

py::dict tree_dict(const mkf::ClusterTree& tree) {
    py::list nodes;
    for (const auto& n : tree.nodes()) {
        py::dict d;
        d["id"] = n.id;
        d["level"] = n.level;
        d["parent"] = n.parent ? py::int_(*n.parent) : py::object(py::none());
        d["children"] = n.children;
        d["size"] = n.size;
        d["mu"] = n.mu;
        d["delta"] = n.delta;
        d["eligible"] = n.eligible;
        nodes.append(d);
    }
    py::list levels;
    for (const auto& m : tree.levels()) levels.append(to_array(m));
    py::dict out;
    out["nodes"] = nodes;
    out["levels"] = levels;
    return out;
}

#define MKF_ARGS                                                                                          \
    py::arg("depth") = 2, py::arg("max_cluster") = 20, py::arg("min_cluster") = 9, py::arg("ne") = 8,     \
        py::arg("precision") = 1.0, py::arg("em_tol") = 1e-4, py::arg("h_x") = 3.0, py::arg("radius") = 5

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-kernel filtering, baselines, noise models and metrics";

    py::register_exception<mkf::FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<mkf::IoError>(m, "IoError", PyExc_OSError);

    m.attr("RNG_ALGORITHM") = std::string(mkf::kRngAlgorithm);
    m.def("set_threads", &mkf::set_thread_count, py::arg("count"));

    m.def("load_raster", [](const std::string& path) { return to_array(mkf::io::load_raster(path)); }, py::arg("path"));
    m.def(
        "save_raster", [](const Array& a, const std::string& path) { mkf::io::save_raster(to_raster(a), path); },
        py::arg("image"), py::arg("path"));

    m.def(
        "bilateral",
        [](const Array& img, double h_x, double h_i, int radius) {
            return to_array(mkf::bf_denoise(to_raster(img), {h_x, h_i, radius}));
        },
        py::arg("image"), py::arg("h_x") = 3.0, py::arg("h_i") = 57.0, py::arg("radius") = 5);

    m.def(
        "mkf_denoise",
        [](const Array& img, int depth, int max_cluster, int min_cluster, int ne, double precision, double em_tol,
           double h_x, int radius) {
            const auto params = mkf_params(depth, max_cluster, min_cluster, ne, precision, em_tol, h_x, radius);
            const mkf::Raster input = to_raster(img);
            mkf::MkfResult r;
            {
                py::gil_scoped_release release;
                r = mkf::mkf_denoise(input, params);
            }
            const std::size_t n = r.kernels.pixel_records().size();
            Array delta({r.output.height(), r.output.width()}), psi({r.output.height(), r.output.width()});
            for (std::size_t i = 0; i < n; ++i) {
                delta.mutable_data()[i] = r.kernels.at(i).delta;
                psi.mutable_data()[i] = r.kernels.at(i).psi;
            }
            py::dict out = tree_dict(r.tree);
            out["output"] = to_array(r.output);
            out["delta"] = delta;
            out["psi"] = psi;
            return out;
        },
        py::arg("image"), MKF_ARGS);

    m.def(
        "cluster_tree",
        [](const Array& img, int depth, int max_cluster, int min_cluster, int ne, double precision, double em_tol,
           double h_x, int radius) {
            const auto params = mkf_params(depth, max_cluster, min_cluster, ne, precision, em_tol, h_x, radius);
            return tree_dict(mkf::build_cluster_tree(to_raster(img), params.cluster));
        },
        py::arg("image"), MKF_ARGS);

    m.def(
        "tv_denoise",
        [](const Array& img, double lam, int iterations, double step, double epsilon) {
            mkf::TvParams p{lam, iterations, step, epsilon};
            auto r = mkf::tv_denoise(to_raster(img), p);
            return py::make_tuple(to_array(r.output), r.energy);
        },
        py::arg("image"), py::arg("lam") = 1.25, py::arg("iterations") = 100, py::arg("step") = 0.1,
        py::arg("epsilon") = 1e-6);

    m.def(
        "cf_denoise",
        [](const Array& img, int iterations) {
            mkf::CfParams p;
            p.iters = iterations;
            return to_array(mkf::cf_gaussian_denoise(to_raster(img), p));
        },
        py::arg("image"), py::arg("iterations") = 10);

    m.def(
        "apply_filter", [](const Array& img, const std::string& spec) {
            return to_array(mkf::FilterSpec::parse(spec).apply(to_raster(img)));
        },
        py::arg("image"), py::arg("spec"));

    m.def(
        "add_noise",
        [](const Array& img, const std::string& spec, std::uint64_t seed) {
            auto s = mkf::NoiseSpec::parse(spec);
            s.seed = seed;
            return to_array(mkf::apply_noise(to_raster(img), s));
        },
        py::arg("image"), py::arg("spec"), py::arg("seed") = 42);

    m.def(
        "noise_field",
        [](int width, int height, double peak, std::optional<double> spread) {
            return to_array(mkf::make_noise_field(width, height, {std::nullopt, spread, peak}));
        },
        py::arg("width"), py::arg("height"), py::arg("peak") = 500.0, py::arg("spread") = py::none());

    m.def(
        "mae", [](const Array& a, const Array& b) { return mkf::mae(to_raster(a), to_raster(b)); }, py::arg("a"),
        py::arg("b"));
    m.def(
        "ssim",
        [](const Array& a, const Array& b, double dynamic_range) {
            return mkf::ssim(to_raster(a), to_raster(b), dynamic_range);
        },
        py::arg("a"), py::arg("b"), py::arg("dynamic_range") = 255.0);

    m.def(
        "phantom", [](int width, int height, int slice, int count) {
            return to_array(mkf::synthetic::brain_phantom(width, height, slice, count));
        },
        py::arg("width"), py::arg("height"), py::arg("slice") = 0, py::arg("count") = 1);
    m.def(
        "natural_scene",
        [](int width, int height, std::uint64_t seed) { return to_array(mkf::synthetic::natural_scene(width, height, seed)); },
        py::arg("width"), py::arg("height"), py::arg("seed") = 0);
}

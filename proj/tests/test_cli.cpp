#include "mkf/raster_io.hpp"
#include "mkf/synthetic.hpp"
#include "temp_dir.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const TempDir& dir, const std::string& args) {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string(MKF_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    auto slurp = [](const std::filesystem::path& p) {
        const auto bytes = read_bytes(p);
        return std::string(bytes.begin(), bytes.end());
    };
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("denoise with the reference configurations") {
    TempDir dir;
    mkf::io::save_pgm(mkf::synthetic::natural_scene(32, 32, 1), dir / "in.pgm");
    const std::string in = (dir / "in.pgm").string();

    Run r = run(dir, "denoise " + in + " --filter mkf --depth 2 --max-cluster 20 --hx 3 --radius 5 " +
                         (dir / "out.pgm").string() + " --dump-tree " + (dir / "tree.txt").string() +
                         " --dump-kernels " + (dir / "k.csv").string());
    CHECK(r.code == 0);
    CHECK(mkf::io::load_pgm(dir / "out.pgm").width() == 32);
    CHECK(std::filesystem::file_size(dir / "tree.txt") > 0);
    const auto k = read_bytes(dir / "k.csv");
    CHECK(count_lines(std::string(k.begin(), k.end())) == 1 + 32 * 32);

    r = run(dir, "denoise " + in + " " + (dir / "bf.mkfr").string() + " --filter bf --hi 57 --hx 3 --radius 5");
    CHECK(r.code == 0);
    CHECK(r.out.find("bf:hi=57;hx=3;radius=5") != std::string::npos);

    r = run(dir, "denoise " + in + " " + (dir / "tv.pgm").string() + " --filter tv --dump-energy " +
                     (dir / "e.csv").string());
    CHECK(r.code == 0);
    const auto e = read_bytes(dir / "e.csv");
    CHECK(count_lines(std::string(e.begin(), e.end())) == 102);
}

TEST_CASE("argument and I/O failures") {
    TempDir dir;
    mkf::io::save_pgm(mkf::synthetic::natural_scene(8, 8, 1), dir / "in.pgm");
    const std::string in = (dir / "in.pgm").string();

    Run r = run(dir, "denoise " + in + " o.pgm --filter median");
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error: usage:", 0) == 0);
    CHECK(count_lines(r.err) == 1);

    r = run(dir, "denoise " + in + " o.pgm --filter bf --depth 2");
    CHECK(r.code == 2);
    r = run(dir, "frobnicate");
    CHECK(r.code == 2);
    r = run(dir, "denoise " + in + " o.pgm --radius abc");
    CHECK(r.code == 2);

    r = run(dir, "denoise " + (dir / "missing.pgm").string() + " " + (dir / "o.pgm").string());
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: io:", 0) == 0);

    write_string(dir / "bad.pgm", "P6 1 1 255 abc");
    r = run(dir, "denoise " + (dir / "bad.pgm").string() + " " + (dir / "o.pgm").string());
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: format:", 0) == 0);

    std::filesystem::create_directories(dir / "empty");
    r = run(dir, "bench-bsd " + (dir / "empty").string());
    CHECK(r.code == 2);
}

TEST_CASE("noise, metrics and cluster subcommands") {
    TempDir dir;
    mkf::io::save_pgm(mkf::synthetic::natural_scene(24, 24, 2), dir / "in.pgm");
    const std::string in = (dir / "in.pgm").string();
    Run r = run(dir, "--seed 9 noise " + in + " " + (dir / "n.mkfr").string() + " --noise integral:level=1000");
    CHECK(r.code == 0);
    CHECK(r.out.find("seed=9") != std::string::npos);
    CHECK(r.out.find("normalized=0.0153787") != std::string::npos);
    r = run(dir, "metrics " + in + " " + in);
    CHECK(r.code == 0);
    CHECK(r.out == "mae,ssim\n0,1\n");
    r = run(dir, "--out-dir " + dir.path().string() + " cluster " + in + " --depth 3 --labels-dir " +
                     (dir / "labels").string());
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(dir / "tree.txt"));
    CHECK(std::filesystem::exists(dir / "labels" / "level_3.mkfr"));
}

TEST_CASE("benchmark subcommands write csv and charts") {
    TempDir dir;
    std::filesystem::create_directories(dir / "bsd");
    for (int i = 0; i < 2; ++i) {
        mkf::io::save_pgm(mkf::synthetic::natural_scene(20, 20, i), dir / "bsd" / ("im" + std::to_string(i) + ".pgm"));
    }
    const std::string out = (dir / "out").string();
    Run r = run(dir, "--out-dir " + out + " bench-bsd " + (dir / "bsd").string() + " --levels 10,500");
    CHECK(r.code == 0);
    const auto summary = read_bytes(dir / "out" / "bsd_summary.csv");
    CHECK(count_lines(std::string(summary.begin(), summary.end())) == 1 + 2 * 4);
    CHECK(std::filesystem::exists(dir / "out" / "bsd_mae.svg"));

    r = run(dir, "--out-dir " + (dir / "mri").string() + " synth --kind phantom --count 2 --width 32 --height 36");
    CHECK(r.code == 0);
    r = run(dir, "--out-dir " + out + " bench-brainweb " + (dir / "mri").string());
    CHECK(r.code == 0);
    const auto bw = read_bytes(dir / "out" / "brainweb.csv");
    CHECK(count_lines(std::string(bw.begin(), bw.end())) == 1 + 2 * 2 * 4);
    CHECK(std::filesystem::exists(dir / "out" / "brainweb_ssim_imag.svg"));

    r = run(dir, "--out-dir " + out + " sweep-depth " + (dir / "bsd" / "im0.pgm").string() +
                     " --depths 2,3 --sizes 20,40");
    CHECK(r.code == 0);
    const auto sw = read_bytes(dir / "out" / "sweep_depth.csv");
    CHECK(count_lines(std::string(sw.begin(), sw.end())) == 1 + 2 * 2 * 2);
}

#include "mkf/raster_io.hpp"

#include "mkf/errors.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace mkf::io {

namespace {

constexpr char kMkfrMagic[4] = {'M', 'K', 'F', 'R'};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

// Tokenizer for the Netpbm header and the P2 body.
class PnmCursor {
public:
    PnmCursor(std::span<const std::uint8_t> bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

    std::size_t offset() const { return pos_; }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    unsigned long read_uint(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        unsigned long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 0xFFFFFFFFul) throw FormatError(std::string(what) + " out of range", start);
            ++pos_;
        }
        if (pos_ == start) {
            if (pos_ >= bytes_.size()) throw FormatError(std::string("truncated payload reading ") + what, pos_);
            throw FormatError(std::string("expected ") + what, pos_);
        }
        return value;
    }

    // Exactly one whitespace byte separates the maxval from a binary raster.
    void single_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw FormatError("expected whitespace after maxval", pos_);
        }
        ++pos_;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_;
};

double round_half_away(double v) { return std::round(v); }

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32_le(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
    return v;
}

bool has_extension(const std::filesystem::path& path, std::string_view ext) {
    std::string e = path.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ext;
}

}  // namespace

Raster decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("missing Netpbm magic", 0);
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '2' && kind != '5') {
        throw FormatError(std::string("unsupported magic P") + kind + ", only P2/P5 grayscale is accepted", 0);
    }
    PnmCursor cur(bytes, 2);
    const auto width = cur.read_uint("width");
    const auto height = cur.read_uint("height");
    const std::size_t maxval_at = cur.offset();
    const auto maxval = cur.read_uint("maxval");
    if (width == 0 || height == 0) throw FormatError("zero image dimension", 2);
    if (maxval == 0 || maxval > 65535) throw FormatError("maxval must be in 1..65535", maxval_at);

    const std::size_t count = static_cast<std::size_t>(width) * height;
    std::vector<double> data(count);
    if (kind == '5') {
        cur.single_space();
        const std::size_t start = cur.offset();
        const std::size_t sample = maxval > 255 ? 2 : 1;
        if (bytes.size() < start + count * sample) {
            throw FormatError("truncated payload: expected " + std::to_string(count * sample) + " bytes",
                              bytes.size());
        }
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = start + i * sample;
            data[i] = sample == 1 ? bytes[at] : static_cast<double>((bytes[at] << 8) | bytes[at + 1]);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = cur.offset();
            const auto v = cur.read_uint("sample");
            if (v > maxval) throw FormatError("sample exceeds maxval", at);
            data[i] = static_cast<double>(v);
        }
    }
    return Raster(static_cast<int>(width), static_cast<int>(height), std::move(data),
                  {0.0, static_cast<double>(maxval)});
}

Raster load_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

void save_pgm(const Raster& raster, const std::filesystem::path& path, int maxval) {
    if (maxval < 1 || maxval > 65535) throw ConfigError("PGM maxval must be in [1, 65535]");
    const std::string header = "P5\n" + std::to_string(raster.width()) + " " + std::to_string(raster.height()) + "\n" +
                               std::to_string(maxval) + "\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + raster.size() * (maxval > 255 ? 2 : 1));
    for (double v : raster.values()) {
        const auto q = static_cast<std::uint16_t>(round_half_away(std::clamp(v, 0.0, static_cast<double>(maxval))));
        if (maxval > 255) bytes.push_back(static_cast<std::uint8_t>(q >> 8));
        bytes.push_back(static_cast<std::uint8_t>(q & 0xFF));
    }
    write_file(path, bytes);
}

Raster decode_f64_raster(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(kMkfrMagic, kMkfrMagic + 4, bytes.begin())) {
        throw FormatError("bad magic, expected MKFR", 0);
    }
    if (bytes.size() < 12) throw FormatError("truncated MKFR header", bytes.size());
    const std::uint32_t width = get_u32_le(bytes, 4);
    const std::uint32_t height = get_u32_le(bytes, 8);
    if (width == 0 || height == 0) throw FormatError("zero image dimension", 4);
    const std::size_t count = static_cast<std::size_t>(width) * height;
    const std::size_t payload = bytes.size() - 12;
    if (payload != count * 8) {
        throw FormatError("length mismatch: header declares " + std::to_string(count) + " values, payload holds " +
                              std::to_string(payload) + " bytes",
                          12);
    }
    std::vector<double> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[12 + i * 8 + b]) << (8 * b);
        data[i] = std::bit_cast<double>(bits);
        if (!std::isfinite(data[i])) throw FormatError("non-finite value", 12 + i * 8);
    }
    Raster r(static_cast<int>(width), static_cast<int>(height), std::move(data));
    const Moments m = moments(r.values());
    r.set_range_hint({m.min, m.max});
    return r;
}

Raster load_f64_raster(const std::filesystem::path& path) { return decode_f64_raster(read_file(path)); }

void save_f64_raster(const Raster& raster, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(kMkfrMagic, kMkfrMagic + 4);
    bytes.reserve(12 + raster.size() * 8);
    put_u32_le(bytes, static_cast<std::uint32_t>(raster.width()));
    put_u32_le(bytes, static_cast<std::uint32_t>(raster.height()));
    for (double v : raster.values()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>((bits >> (8 * b)) & 0xFFu));
    }
    write_file(path, bytes);
}

RgbImage load_ppm(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw FormatError("expected P6 magic", 0);
    PnmCursor cur(bytes, 2);
    RgbImage img;
    img.width = static_cast<int>(cur.read_uint("width"));
    img.height = static_cast<int>(cur.read_uint("height"));
    const auto maxval = cur.read_uint("maxval");
    if (maxval != 255) throw FormatError("only 8-bit PPM is supported", cur.offset());
    cur.single_space();
    const std::size_t start = cur.offset();
    const std::size_t count = static_cast<std::size_t>(img.width) * img.height * 3;
    if (bytes.size() < start + count) throw FormatError("truncated payload", bytes.size());
    img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                   bytes.begin() + static_cast<std::ptrdiff_t>(start + count));
    return img;
}

Raster to_grayscale(std::span<const std::uint8_t> rgb8, int width, int height) {
    if (width < 1 || height < 1 || rgb8.size() != 3 * static_cast<std::size_t>(width) * height) {
        throw FormatError("RGB payload length " + std::to_string(rgb8.size()) + " does not match " +
                              std::to_string(width) + "x" + std::to_string(height) + "x3",
                          rgb8.size());
    }
    std::vector<double> gray(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const double luma = 0.299 * rgb8[3 * i] + 0.587 * rgb8[3 * i + 1] + 0.114 * rgb8[3 * i + 2];
        gray[i] = std::clamp(round_half_away(luma), 0.0, 255.0);
    }
    return Raster(width, height, std::move(gray), {0.0, 255.0});
}

Raster load_raster(const std::filesystem::path& path) {
    return has_extension(path, ".mkfr") ? load_f64_raster(path) : load_pgm(path);
}

void save_raster(const Raster& raster, const std::filesystem::path& path) {
    if (has_extension(path, ".mkfr")) {
        save_f64_raster(raster, path);
    } else {
        save_pgm(raster, path);
    }
}

}  // namespace mkf::io

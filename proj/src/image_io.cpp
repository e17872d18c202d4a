#include "ethdr/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace ethdr {

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open file: " + path);
    return std::vector<unsigned char>((std::istreambuf_iterator<char>(f)),
                                      std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open file for writing: " + path);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("failed writing file: " + path);
}

// Netpbm-style token reader: skips whitespace and '#' comments.
struct HeaderReader {
    const unsigned char* p;
    std::size_t n;
    std::size_t pos = 0;

    std::string token(const std::string& path) {
        while (pos < n) {
            if (std::isspace(p[pos])) {
                ++pos;
            } else if (p[pos] == '#') {
                while (pos < n && p[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        std::size_t start = pos;
        while (pos < n && !std::isspace(p[pos])) ++pos;
        if (start == pos) throw IoError("unexpected end of header in " + path);
        return std::string(reinterpret_cast<const char*>(p + start), pos - start);
    }

    // exactly one whitespace byte separates the header from pixel data
    void skip_single_ws(const std::string& path) {
        if (pos >= n || !std::isspace(p[pos])) throw IoError("malformed header in " + path);
        ++pos;
    }
};

std::size_t parse_dim(const std::string& tok, const std::string& path) {
    std::size_t v = 0;
    for (char ch : tok) {
        if (ch < '0' || ch > '9') throw IoError("bad dimension '" + tok + "' in " + path);
        v = v * 10 + static_cast<std::size_t>(ch - '0');
    }
    if (v == 0) throw IoError("zero dimension in " + path);
    return v;
}

}  // namespace

Tensor read_ppm(const std::string& path) {
    const std::vector<unsigned char> raw = read_file(path);
    HeaderReader hr{raw.data(), raw.size()};
    if (hr.token(path) != "P6") throw IoError("not a P6 PPM file: " + path);
    const std::size_t w = parse_dim(hr.token(path), path);
    const std::size_t h = parse_dim(hr.token(path), path);
    const std::size_t maxval = parse_dim(hr.token(path), path);
    if (maxval > 255) throw IoError("only 8-bit PPM supported (maxval <= 255): " + path);
    hr.skip_single_ws(path);
    const std::size_t need = w * h * 3;
    if (raw.size() - hr.pos < need) throw IoError("PPM pixel data truncated: " + path);

    Tensor img({1, 3, h, w});
    const unsigned char* px = raw.data() + hr.pos;
    const float scale = 1.0f / static_cast<float>(maxval);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < 3; ++c)
                img.at(0, c, y, x) = static_cast<float>(px[(y * w + x) * 3 + c]) * scale;
    return img;
}

void write_ppm(const std::string& path, const Tensor& img) {
    if (img.rank() != 4 || img.extent(0) != 1 || img.extent(1) != 3) {
        throw IoError("write_ppm expects a 1x3xHxW tensor, got " + img.shape_str());
    }
    const std::size_t h = img.extent(2), w = img.extent(3);
    std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    out.reserve(out.size() + w * h * 3);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < 3; ++c) {
                const float v = std::clamp(img.at(0, c, y, x), 0.0f, 1.0f);
                out.push_back(static_cast<char>(std::lround(v * 255.0f)));
            }
    write_file(path, out);
}

Tensor read_pfm(const std::string& path) {
    const std::vector<unsigned char> raw = read_file(path);
    HeaderReader hr{raw.data(), raw.size()};
    const std::string magic = hr.token(path);
    if (magic == "Pf") throw IoError("grayscale PFM not supported: " + path);
    if (magic != "PF") throw IoError("not a PFM file: " + path);
    const std::size_t w = parse_dim(hr.token(path), path);
    const std::size_t h = parse_dim(hr.token(path), path);
    const double scale = std::strtod(hr.token(path).c_str(), nullptr);
    if (scale >= 0.0) throw IoError("big-endian PFM not supported: " + path);
    hr.skip_single_ws(path);
    const std::size_t need = w * h * 3 * 4;
    if (raw.size() - hr.pos < need) throw IoError("PFM pixel data truncated: " + path);

    Tensor img({1, 3, h, w});
    const unsigned char* px = raw.data() + hr.pos;
    for (std::size_t row = 0; row < h; ++row) {
        const std::size_t y = h - 1 - row;  // bottom-to-top storage
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < 3; ++c) {
                const std::size_t o = ((row * w + x) * 3 + c) * 4;
                std::uint32_t bits = static_cast<std::uint32_t>(px[o]) |
                                     (static_cast<std::uint32_t>(px[o + 1]) << 8) |
                                     (static_cast<std::uint32_t>(px[o + 2]) << 16) |
                                     (static_cast<std::uint32_t>(px[o + 3]) << 24);
                img.at(0, c, y, x) = std::bit_cast<float>(bits);
            }
    }
    return img;
}

void write_pfm(const std::string& path, const Tensor& img) {
    if (img.rank() != 4 || img.extent(0) != 1 || img.extent(1) != 3) {
        throw IoError("write_pfm expects a 1x3xHxW tensor, got " + img.shape_str());
    }
    const std::size_t h = img.extent(2), w = img.extent(3);
    std::string out = "PF\n" + std::to_string(w) + " " + std::to_string(h) + "\n-1.0\n";
    out.reserve(out.size() + w * h * 12);
    for (std::size_t row = 0; row < h; ++row) {
        const std::size_t y = h - 1 - row;
        for (std::size_t x = 0; x < w; ++x)
            for (std::size_t c = 0; c < 3; ++c) {
                const std::uint32_t bits = std::bit_cast<std::uint32_t>(img.at(0, c, y, x));
                out.push_back(static_cast<char>(bits & 0xFF));
                out.push_back(static_cast<char>((bits >> 8) & 0xFF));
                out.push_back(static_cast<char>((bits >> 16) & 0xFF));
                out.push_back(static_cast<char>((bits >> 24) & 0xFF));
            }
    }
    write_file(path, out);
}

Tensor read_image(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open file: " + path);
    char magic[2] = {0, 0};
    f.read(magic, 2);
    f.close();
    if (magic[0] == 'P' && magic[1] == '6') return read_ppm(path);
    if (magic[0] == 'P' && magic[1] == 'F') return read_pfm(path);
    throw IoError("unrecognized image format (want PPM P6 or PFM PF): " + path);
}

}  // namespace ethdr

#ifndef KWSFCM_IMAGE_HPP
#define KWSFCM_IMAGE_HPP

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace kwsfcm {

struct MalformedHeader : std::runtime_error {
    explicit MalformedHeader(const std::string& what) : std::runtime_error("malformed header: " + what) {}
};
struct UnsupportedMaxVal : std::runtime_error {
    explicit UnsupportedMaxVal(int maxval)
        : std::runtime_error("unsupported maxval " + std::to_string(maxval) + " (only 255)") {}
};
struct TruncatedData : std::runtime_error {
    explicit TruncatedData(const std::string& what) : std::runtime_error("truncated data: " + what) {}
};

/// Row-major 8-bit grayscale raster. All numeric work happens on
/// double-valued copies; this type is storage only.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t size() const { return pixels.size(); }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    /// Clamped access; out-of-range coordinates replicate the nearest edge pixel.
    std::uint8_t at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width) x = width - 1;
        if (y < 0) y = 0;
        if (y >= height) y = height - 1;
        return at(x, y);
    }

    bool operator==(const GrayImage&) const = default;
};

struct ColorImage {
    GrayImage red, green, blue;
    int width() const { return red.width; }
    int height() const { return red.height; }
    bool operator==(const ColorImage&) const = default;
};

/// Hard cluster assignment per pixel, labels in [0, clusters).
struct SegmentationMap {
    int width = 0;
    int height = 0;
    int clusters = 0;
    std::vector<int> labels;

    SegmentationMap() = default;
    SegmentationMap(int w, int h, int c)
        : width(w), height(h), clusters(c), labels(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t size() const { return labels.size(); }
    int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    int& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
};

using LoadedImage = std::variant<GrayImage, ColorImage>;

namespace detail {

// Skips whitespace and '#' comments between PNM header tokens.
inline bool next_header_token(std::istream& in, std::string& tok) {
    tok.clear();
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (!std::isspace(ch)) break;
    }
    if (ch == EOF) return false;
    do {
        tok.push_back(static_cast<char>(ch));
        ch = in.get();
    } while (ch != EOF && !std::isspace(ch) && ch != '#');
    if (ch == '#') in.unget();
    return true;
}

inline int parse_header_int(std::istream& in, const char* what) {
    std::string tok;
    if (!next_header_token(in, tok)) throw MalformedHeader(std::string("missing ") + what);
    try {
        std::size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw MalformedHeader(std::string("bad ") + what + " '" + tok + "'");
    }
}

inline std::vector<std::uint8_t> read_samples(std::istream& in, std::size_t count, bool binary) {
    std::vector<std::uint8_t> out(count);
    if (binary) {
        in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count)
            throw TruncatedData("expected " + std::to_string(count) + " raster bytes");
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            long v;
            if (!(in >> v)) throw TruncatedData("expected " + std::to_string(count) + " ASCII samples");
            if (v < 0 || v > 255) throw TruncatedData("sample " + std::to_string(v) + " out of range");
            out[i] = static_cast<std::uint8_t>(v);
        }
    }
    return out;
}

}  // namespace detail

/// Reads a PGM (P2/P5) or PPM (P3/P6) file with maxval 255.
inline LoadedImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedHeader("cannot open '" + path + "'");

    std::string magic;
    if (!detail::next_header_token(in, magic)) throw MalformedHeader("empty file");
    const bool gray = (magic == "P2" || magic == "P5");
    const bool color = (magic == "P3" || magic == "P6");
    if (!gray && !color) throw MalformedHeader("magic '" + magic + "'");
    const bool binary = (magic == "P5" || magic == "P6");

    const int width = detail::parse_header_int(in, "width");
    const int height = detail::parse_header_int(in, "height");
    if (width <= 0 || height <= 0) throw MalformedHeader("non-positive dimensions");
    const int maxval = detail::parse_header_int(in, "maxval");
    if (maxval != 255) throw UnsupportedMaxVal(maxval);
    // Exactly one whitespace byte separates maxval from a binary raster;
    // next_header_token already consumed it for the ASCII variants.

    const std::size_t npix = static_cast<std::size_t>(width) * height;
    const std::size_t nsamples = color ? npix * 3 : npix;
    std::vector<std::uint8_t> samples = detail::read_samples(in, nsamples, binary);

    if (gray) {
        GrayImage img(width, height);
        img.pixels = std::move(samples);
        return img;
    }
    ColorImage img{GrayImage(width, height), GrayImage(width, height), GrayImage(width, height)};
    for (std::size_t i = 0; i < npix; ++i) {
        img.red.pixels[i] = samples[3 * i];
        img.green.pixels[i] = samples[3 * i + 1];
        img.blue.pixels[i] = samples[3 * i + 2];
    }
    return img;
}

inline GrayImage load_gray(const std::string& path) {
    LoadedImage any = load_image(path);
    if (auto* g = std::get_if<GrayImage>(&any)) return std::move(*g);
    throw MalformedHeader("'" + path + "' is a color image, grayscale expected");
}

inline ColorImage load_color(const std::string& path) {
    LoadedImage any = load_image(path);
    if (auto* c = std::get_if<ColorImage>(&any)) return std::move(*c);
    throw MalformedHeader("'" + path + "' is a grayscale image, color expected");
}

/// Writes binary P5. Byte layout is fully determined by the pixels, so
/// save/load round-trips bit-exactly.
inline void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// Writes binary P6.
inline void save_ppm(const ColorImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<std::uint8_t> interleaved(img.red.size() * 3);
    for (std::size_t i = 0; i < img.red.size(); ++i) {
        interleaved[3 * i] = img.red.pixels[i];
        interleaved[3 * i + 1] = img.green.pixels[i];
        interleaved[3 * i + 2] = img.blue.pixels[i];
    }
    out.write(reinterpret_cast<const char*>(interleaved.data()), static_cast<std::streamsize>(interleaved.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// Grows the raster by `radius` on each side, replicating edge pixels.
inline GrayImage pad_replicate(const GrayImage& img, int radius) {
    if (radius < 0) throw std::invalid_argument("pad_replicate: negative radius");
    if (radius == 0) return img;
    GrayImage out(img.width + 2 * radius, img.height + 2 * radius);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = img.at_clamped(x - radius, y - radius);
    return out;
}

}  // namespace kwsfcm

#endif

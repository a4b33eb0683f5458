#include "rcbind/render.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rcbind {

const std::vector<Rgb>& default_palette() {
    static const std::vector<Rgb> palette = {
        {230, 25, 75},   // red
        {60, 180, 75},   // green
        {255, 225, 25},  // yellow
        {0, 130, 200},   // blue
        {245, 130, 48},  // orange
        {145, 30, 180},  // purple
        {70, 240, 240},  // cyan
        {240, 50, 230},  // magenta
        {210, 245, 60},  // lime
        {250, 190, 212}, // pink
        {0, 128, 128},   // teal
        {220, 190, 255}, // lavender
    };
    return palette;
}

void write_ppm(const std::string& path, int width, int height, std::span<const Rgb> pixels) {
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("write_ppm: pixel count does not match geometry");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
    out << "P6\n" << width << " " << height << "\n255\n";
    for (const Rgb& p : pixels) {
        out.put(static_cast<char>(p.r));
        out.put(static_cast<char>(p.g));
        out.put(static_cast<char>(p.b));
    }
    if (!out) throw std::runtime_error("write_ppm: write failed for " + path);
}

void write_pgm(const std::string& path, int width, int height,
               std::span<const std::uint8_t> pixels) {
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("write_pgm: pixel count does not match geometry");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

namespace {

// Skips whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in, const std::string& path) {
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value = 0;
    if (!(in >> value)) throw std::runtime_error("image header parse error in " + path);
    return value;
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2")
        throw std::runtime_error("read_pgm: " + path + " is not a PGM file");
    PgmImage img;
    img.width = next_header_int(in, path);
    img.height = next_header_int(in, path);
    const int maxval = next_header_int(in, path);
    if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 255)
        throw std::runtime_error("read_pgm: unsupported header in " + path);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(n);
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw std::runtime_error("read_pgm: truncated payload in " + path);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            int v;
            if (!(in >> v)) throw std::runtime_error("read_pgm: truncated payload in " + path);
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

PpmImage read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_ppm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P6") throw std::runtime_error("read_ppm: " + path + " is not a P6 file");
    PpmImage img;
    img.width = next_header_int(in, path);
    img.height = next_header_int(in, path);
    const int maxval = next_header_int(in, path);
    if (img.width <= 0 || img.height <= 0 || maxval != 255)
        throw std::runtime_error("read_ppm: unsupported header in " + path);
    in.get();
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    std::vector<char> raw(n * 3);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw std::runtime_error("read_ppm: truncated payload in " + path);
    img.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        img.pixels[i] = {static_cast<std::uint8_t>(raw[3 * i]),
                         static_cast<std::uint8_t>(raw[3 * i + 1]),
                         static_cast<std::uint8_t>(raw[3 * i + 2])};
    return img;
}

namespace {

std::uint8_t blend(std::uint8_t fg, std::uint8_t bg, double w) {
    return static_cast<std::uint8_t>(std::lround(w * fg + (1.0 - w) * bg));
}

}  // namespace

void render_assignment(const Matrix& gamma, int width, int height,
                       const std::vector<Rgb>& palette, Rgb background,
                       const std::string& path) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (gamma.rows != n)
        throw std::invalid_argument("render_assignment: gamma rows do not match geometry");
    if (palette.size() < gamma.cols)
        throw std::invalid_argument("render_assignment: palette has " +
                                    std::to_string(palette.size()) + " colors for " +
                                    std::to_string(gamma.cols) + " clusters");
    std::vector<Rgb> pixels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = gamma.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < gamma.cols; ++c)
            if (row[c] > row[best]) best = c;
        const double w = row[best];
        const Rgb& fg = palette[best];
        pixels[i] = {blend(fg.r, background.r, w), blend(fg.g, background.g, w),
                     blend(fg.b, background.b, w)};
    }
    write_ppm(path, width, height, pixels);
}

void render_image(const BinaryImage& image, const std::string& path) {
    std::vector<std::uint8_t> gray(image.pixels.size());
    for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = static_cast<std::uint8_t>(std::lround(image.pixels[i] * 255.0));
    write_pgm(path, image.width, image.height, gray);
}

void render_truth(const GroundTruth& truth, int width, int height,
                  const std::vector<Rgb>& palette, const std::string& path) {
    if (palette.size() < truth.object_masks.size())
        throw std::invalid_argument("render_truth: palette too small");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<Rgb> pixels(n, kBackground);
    const auto labels = true_labels(truth);
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i] >= 0) pixels[i] = palette[labels[i]];
    write_ppm(path, width, height, pixels);
}

BinaryImage binary_image_from_pgm(const PgmImage& img, double threshold) {
    BinaryImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = (img.pixels[i] / 255.0 > threshold) ? 1.0 : 0.0;
    return out;
}

}  // namespace rcbind

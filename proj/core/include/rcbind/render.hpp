#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcbind/image.hpp"
#include "rcbind/rc.hpp"

namespace rcbind {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

// 12 visually distinct colors; enough clusters for every dataset here.
const std::vector<Rgb>& default_palette();
constexpr Rgb kBackground{0, 0, 0};

void write_ppm(const std::string& path, int width, int height, std::span<const Rgb> pixels);
void write_pgm(const std::string& path, int width, int height,
               std::span<const std::uint8_t> pixels);

struct PgmImage {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;
};
struct PpmImage {
    int width = 0, height = 0;
    std::vector<Rgb> pixels;
};

PgmImage read_pgm(const std::string& path);  // P5 or P2
PpmImage read_ppm(const std::string& path);  // P6

// Pixel color = palette[argmax_k gamma_ik], faded toward the background by
// (1 - max_k gamma_ik) so low-confidence pixels wash out.
void render_assignment(const Matrix& gamma, int width, int height,
                       const std::vector<Rgb>& palette, Rgb background,
                       const std::string& path);

// Input image as an 8-bit grayscale file.
void render_image(const BinaryImage& image, const std::string& path);

// Ground truth as saturated palette colors (background stays background).
void render_truth(const GroundTruth& truth, int width, int height,
                  const std::vector<Rgb>& palette, const std::string& path);

BinaryImage binary_image_from_pgm(const PgmImage& img, double threshold = 0.5);

}  // namespace rcbind

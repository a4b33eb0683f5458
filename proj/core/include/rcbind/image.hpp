#pragma once

#include <cstdint>
#include <vector>

namespace rcbind {

// Flat binary image. Freshly generated images hold exact 0/1 values; soft
// values in [0,1] only appear downstream of masking or corruption.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // width * height

    BinaryImage() = default;
    BinaryImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0.0) {}

    int size() const { return width * height; }
};

using Mask = std::vector<std::uint8_t>;  // 0/1 per pixel

// Per-object masks plus the derived evaluation mask: a pixel is evaluated
// iff exactly one object owns it. Background (zero owners) and overlap
// (two or more) are both excluded.
struct GroundTruth {
    std::vector<Mask> object_masks;
    Mask eval_mask;
};

struct LabeledExample {
    BinaryImage image;
    GroundTruth truth;
};

// Derives eval_mask from the object masks.
GroundTruth make_ground_truth(std::vector<Mask> object_masks);

// Pixelwise OR of the object masks.
BinaryImage compose(int width, int height, const std::vector<Mask>& object_masks);

LabeledExample make_example(int width, int height, std::vector<Mask> object_masks);

// Owning object index per pixel; -1 where the pixel is not evaluated.
std::vector<int> true_labels(const GroundTruth& truth);

int count_lit(const Mask& m);

}  // namespace rcbind

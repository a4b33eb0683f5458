#include "rcbind/image.hpp"

#include <stdexcept>

namespace rcbind {

GroundTruth make_ground_truth(std::vector<Mask> object_masks) {
    GroundTruth truth;
    truth.object_masks = std::move(object_masks);
    if (truth.object_masks.empty()) return truth;
    const std::size_t n = truth.object_masks.front().size();
    truth.eval_mask.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        int owners = 0;
        for (const Mask& m : truth.object_masks) {
            if (m.size() != n)
                throw std::invalid_argument("make_ground_truth: mask length mismatch");
            owners += m[i] ? 1 : 0;
        }
        truth.eval_mask[i] = (owners == 1) ? 1 : 0;
    }
    return truth;
}

BinaryImage compose(int width, int height, const std::vector<Mask>& object_masks) {
    BinaryImage img(width, height);
    const std::size_t n = img.pixels.size();
    for (const Mask& m : object_masks) {
        if (m.size() != n)
            throw std::invalid_argument("compose: mask length does not match geometry");
        for (std::size_t i = 0; i < n; ++i)
            if (m[i]) img.pixels[i] = 1.0;
    }
    return img;
}

LabeledExample make_example(int width, int height, std::vector<Mask> object_masks) {
    LabeledExample ex;
    ex.image = compose(width, height, object_masks);
    ex.truth = make_ground_truth(std::move(object_masks));
    return ex;
}

std::vector<int> true_labels(const GroundTruth& truth) {
    if (truth.object_masks.empty()) return {};
    const std::size_t n = truth.object_masks.front().size();
    std::vector<int> labels(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!truth.eval_mask[i]) continue;
        for (std::size_t k = 0; k < truth.object_masks.size(); ++k) {
            if (truth.object_masks[k][i]) {
                labels[i] = static_cast<int>(k);
                break;
            }
        }
    }
    return labels;
}

int count_lit(const Mask& m) {
    int n = 0;
    for (auto v : m) n += v ? 1 : 0;
    return n;
}

}  // namespace rcbind

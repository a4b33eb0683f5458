#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rcbind {

// IDX tensor of unsigned bytes (the MNIST container format: big-endian
// dimension sizes, magic 0x00000803 for images / 0x00000801 for labels).
struct IdxTensor {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> data;

    std::size_t element_count() const {
        std::size_t n = 1;
        for (auto d : dims) n *= d;
        return dims.empty() ? 0 : n;
    }
};

IdxTensor load_idx(const std::string& path);
void write_idx(const IdxTensor& tensor, const std::string& path);

// pixel = 1 iff gray/255 > threshold; threshold must be in (0,1).
std::vector<double> binarize(std::span<const std::uint8_t> gray, double threshold);

}  // namespace rcbind

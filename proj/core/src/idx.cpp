#include "rcbind/idx.hpp"

#include <fstream>
#include <stdexcept>

namespace rcbind {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t offset, const std::string& what) {
    throw std::runtime_error("load_idx: " + path + ": " + what + " (byte offset " +
                             std::to_string(offset) + ")");
}

}  // namespace

IdxTensor load_idx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_idx: cannot open " + path);

    unsigned char magic[4];
    in.read(reinterpret_cast<char*>(magic), 4);
    if (in.gcount() != 4) parse_fail(path, static_cast<std::size_t>(in.gcount()), "truncated magic");
    if (magic[0] != 0 || magic[1] != 0) parse_fail(path, 0, "bad magic prefix");
    if (magic[2] != 0x08) parse_fail(path, 2, "unsupported element type (only unsigned byte)");
    const unsigned ndims = magic[3];
    if (ndims == 0 || ndims > 4) parse_fail(path, 3, "unsupported rank " + std::to_string(ndims));

    IdxTensor t;
    t.dims.resize(ndims);
    for (unsigned d = 0; d < ndims; ++d) {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (in.gcount() != 4) parse_fail(path, 4 + 4 * d, "truncated dimension size");
        t.dims[d] = (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
                    (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
    }

    const std::size_t expected = t.element_count();
    t.data.resize(expected);
    in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(expected));
    if (static_cast<std::size_t>(in.gcount()) != expected)
        parse_fail(path, 4 + 4 * ndims + static_cast<std::size_t>(in.gcount()),
                   "truncated payload, expected " + std::to_string(expected) + " bytes");
    return t;
}

void write_idx(const IdxTensor& tensor, const std::string& path) {
    if (tensor.dims.empty() || tensor.dims.size() > 4)
        throw std::invalid_argument("write_idx: rank must be 1..4");
    if (tensor.element_count() != tensor.data.size())
        throw std::invalid_argument("write_idx: data length does not match dims");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_idx: cannot open " + path);
    const unsigned char magic[4] = {0, 0, 0x08, static_cast<unsigned char>(tensor.dims.size())};
    out.write(reinterpret_cast<const char*>(magic), 4);
    for (auto d : tensor.dims) {
        const unsigned char b[4] = {static_cast<unsigned char>(d >> 24),
                                    static_cast<unsigned char>(d >> 16),
                                    static_cast<unsigned char>(d >> 8),
                                    static_cast<unsigned char>(d)};
        out.write(reinterpret_cast<const char*>(b), 4);
    }
    out.write(reinterpret_cast<const char*>(tensor.data.data()),
              static_cast<std::streamsize>(tensor.data.size()));
    if (!out) throw std::runtime_error("write_idx: write failed for " + path);
}

std::vector<double> binarize(std::span<const std::uint8_t> gray, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("binarize: threshold must lie in (0,1)");
    std::vector<double> out(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i)
        out[i] = (gray[i] / 255.0 > threshold) ? 1.0 : 0.0;
    return out;
}

}  // namespace rcbind

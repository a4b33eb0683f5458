#include "rcbind/datasets.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rcbind/idx.hpp"
#include "rcbind/rng.hpp"

namespace rcbind {

namespace {

constexpr double kMnistThreshold = 0.5;

// ---- glyph stencils ----

struct Stencil {
    int h = 0, w = 0;
    std::vector<std::uint8_t> px;  // h*w

    bool at(int r, int c) const { return px[static_cast<std::size_t>(r) * w + c] != 0; }
};

Stencil square_outline() {
    Stencil s{11, 11, std::vector<std::uint8_t>(121, 0)};
    for (int i = 0; i < 11; ++i) {
        s.px[0 * 11 + i] = 1;
        s.px[10 * 11 + i] = 1;
        s.px[i * 11 + 0] = 1;
        s.px[i * 11 + 10] = 1;
    }
    return s;
}

Stencil triangle_up() {
    Stencil s{6, 11, std::vector<std::uint8_t>(66, 0)};
    for (int r = 0; r < 6; ++r) {
        s.px[r * 11 + (5 - r)] = 1;
        s.px[r * 11 + (5 + r)] = 1;
    }
    for (int c = 0; c < 11; ++c) s.px[5 * 11 + c] = 1;
    return s;
}

Stencil triangle_down() {
    Stencil up = triangle_up();
    Stencil s{6, 11, std::vector<std::uint8_t>(66, 0)};
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 11; ++c) s.px[r * 11 + c] = up.px[(5 - r) * 11 + c];
    return s;
}

const std::array<Stencil, 3>& shape_stencils() {
    static const std::array<Stencil, 3> stencils = {square_outline(), triangle_up(),
                                                    triangle_down()};
    return stencils;
}

// 5x5 corner glyph. Orientation 0 opens right-down (arms along top and left
// edge), then clockwise: 1 top-right, 2 bottom-right, 3 bottom-left.
Stencil corner_glyph(int orient) {
    Stencil s{5, 5, std::vector<std::uint8_t>(25, 0)};
    const int row = (orient == 0 || orient == 1) ? 0 : 4;
    const int col = (orient == 0 || orient == 3) ? 0 : 4;
    for (int i = 0; i < 5; ++i) {
        s.px[row * 5 + i] = 1;
        s.px[i * 5 + col] = 1;
    }
    return s;
}

void stamp(Mask& mask, int canvas_w, const Stencil& st, int r0, int c0) {
    for (int r = 0; r < st.h; ++r)
        for (int c = 0; c < st.w; ++c)
            if (st.at(r, c)) mask[static_cast<std::size_t>(r0 + r) * canvas_w + (c0 + c)] = 1;
}

Mask stamped(int canvas_w, int canvas_h, const Stencil& st, int r0, int c0) {
    Mask m(static_cast<std::size_t>(canvas_w) * canvas_h, 0);
    stamp(m, canvas_w, st, r0, c0);
    return m;
}

// ---- per-dataset example generators ----

std::vector<Mask> gen_superposition(const std::vector<Mask>& bank, bool single, Rng& rng) {
    const std::size_t i = rng.below(bank.size());
    if (single) return {bank[i]};
    std::size_t j = rng.below(bank.size() - 1);
    if (j >= i) ++j;  // distinct pair, uniform
    return {bank[i], bank[j]};
}

std::vector<Mask> gen_shapes(bool single, Rng& rng) {
    const int n_objects = single ? 1 : 3;
    std::vector<Mask> masks;
    for (int o = 0; o < n_objects; ++o) {
        const Stencil& st = shape_stencils()[rng.below(3)];
        const int r0 = static_cast<int>(rng.below(28 - st.h + 1));
        const int c0 = static_cast<int>(rng.below(28 - st.w + 1));
        masks.push_back(stamped(28, 28, st, r0, c0));
    }
    return masks;
}

Mask bar_mask(int candidate) {
    // 12 candidates on a 20x20 canvas: 6 full-width rows then 6 full-height
    // columns, both at indices 2, 5, 8, 11, 14, 17.
    Mask m(400, 0);
    const int idx = 2 + 3 * (candidate % 6);
    if (candidate < 6) {
        for (int c = 0; c < 20; ++c) m[static_cast<std::size_t>(idx) * 20 + c] = 1;
    } else {
        for (int r = 0; r < 20; ++r) m[static_cast<std::size_t>(r) * 20 + idx] = 1;
    }
    return m;
}

std::vector<Mask> gen_bars(bool single, double bar_prob, Rng& rng) {
    if (single) return {bar_mask(static_cast<int>(rng.below(12)))};
    std::vector<Mask> masks;
    while (masks.empty()) {
        for (int c = 0; c < 12; ++c)
            if (rng.uniform01() < bar_prob) masks.push_back(bar_mask(c));
    }
    return masks;
}

Mask corner_square_object(int side, int r0, int c0) {
    Mask m(784, 0);
    stamp(m, 28, corner_glyph(0), r0, c0);
    stamp(m, 28, corner_glyph(1), r0, c0 + side - 5);
    stamp(m, 28, corner_glyph(2), r0 + side - 5, c0 + side - 5);
    stamp(m, 28, corner_glyph(3), r0 + side - 5, c0);
    return m;
}

std::vector<Mask> gen_corners(bool single, Rng& rng) {
    auto draw_square = [&rng]() {
        const int side = 12 + static_cast<int>(rng.below(5));  // 12..16
        const int r0 = static_cast<int>(rng.below(28 - side + 1));
        const int c0 = static_cast<int>(rng.below(28 - side + 1));
        return corner_square_object(side, r0, c0);
    };
    auto draw_free = [&rng]() {
        const Stencil st = corner_glyph(static_cast<int>(rng.below(4)));
        return stamped(28, 28, st, static_cast<int>(rng.below(24)),
                       static_cast<int>(rng.below(24)));
    };
    if (single) {
        // object type uniform: the square pattern carries most of the
        // structure worth learning, so it gets equal billing with the
        // free glyphs
        if (rng.below(2) == 0) return {draw_square()};
        return {draw_free()};
    }
    std::vector<Mask> masks;
    masks.push_back(draw_square());
    for (int i = 0; i < 4; ++i) masks.push_back(draw_free());
    return masks;
}

struct MnistPool {
    const IdxTensor* images = nullptr;
    std::size_t begin = 0, end = 0;  // index range within the tensor
};

Mask mnist_digit_mask(const MnistPool& pool, int canvas_w, int canvas_h, int r0, int c0,
                      Rng& rng) {
    const std::size_t rows = pool.images->dims[1];
    const std::size_t cols = pool.images->dims[2];
    Mask m(static_cast<std::size_t>(canvas_w) * canvas_h, 0);
    // resample on the (unobserved in practice) chance a digit binarizes blank
    for (;;) {
        const std::size_t idx = pool.begin + rng.below(pool.end - pool.begin);
        const std::uint8_t* raw = pool.images->data.data() + idx * rows * cols;
        auto bits = binarize(std::span<const std::uint8_t>(raw, rows * cols), kMnistThreshold);
        bool any = false;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (bits[r * cols + c] != 0.0) {
                    m[(r0 + r) * canvas_w + (c0 + c)] = 1;
                    any = true;
                }
        if (any) return m;
    }
}

std::vector<Mask> gen_mnist_shape(const MnistPool& pool, bool single, Rng& rng) {
    auto draw_shape = [&rng]() {
        const Stencil& st = shape_stencils()[rng.below(3)];
        return stamped(28, 28, st, static_cast<int>(rng.below(28 - st.h + 1)),
                       static_cast<int>(rng.below(28 - st.w + 1)));
    };
    if (single) {
        if (rng.below(2) == 0) return {mnist_digit_mask(pool, 28, 28, 0, 0, rng)};
        return {draw_shape()};
    }
    std::vector<Mask> masks;
    masks.push_back(mnist_digit_mask(pool, 28, 28, 0, 0, rng));
    masks.push_back(draw_shape());
    return masks;
}

std::vector<Mask> gen_multi_mnist(const MnistPool& pool, bool single, Rng& rng) {
    const int n_objects = single ? 1 : 3;
    std::vector<Mask> masks;
    for (int o = 0; o < n_objects; ++o) {
        const int r0 = static_cast<int>(rng.below(21));  // 48 - 28 + 1 placements
        const int c0 = static_cast<int>(rng.below(21));
        masks.push_back(mnist_digit_mask(pool, 48, 48, r0, c0, rng));
    }
    return masks;
}

std::string find_mnist_file(const std::string& dir, const std::string& stem) {
    namespace fs = std::filesystem;
    for (const char* sep : {"-", "."}) {
        const std::string candidate = dir + "/" + stem + sep + "idx3-ubyte";
        if (fs::exists(candidate)) return candidate;
    }
    throw std::runtime_error("generate: missing MNIST source file " + dir + "/" + stem +
                             "-idx3-ubyte");
}

// ---- little-endian container I/O ----

void put_u16(std::ostream& out, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
    out.write(b, 4);
}

std::uint16_t get_u16(std::istream& in, const std::string& path) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    if (in.gcount() != 2) throw std::runtime_error("load_dataset: truncated file " + path);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) throw std::runtime_error("load_dataset: truncated file " + path);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void pack_bits(std::ostream& out, const std::vector<std::uint8_t>& bits) {
    // LSB-first within each byte
    std::vector<char> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) bytes[i / 8] |= static_cast<char>(1 << (i % 8));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> unpack_bits(std::istream& in, std::size_t n, const std::string& path) {
    std::vector<char> bytes((n + 7) / 8);
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size())
        throw std::runtime_error("load_dataset: truncated file " + path);
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = (bytes[i / 8] >> (i % 8)) & 1;
    return bits;
}

constexpr std::uint16_t kContainerVersion = 1;

}  // namespace

std::pair<int, int> geometry(DatasetName name) {
    switch (name) {
        case DatasetName::simple_superposition: return {10, 10};
        case DatasetName::shapes: return {28, 28};
        case DatasetName::bars: return {20, 20};
        case DatasetName::corners: return {28, 28};
        case DatasetName::mnist_shape: return {28, 28};
        case DatasetName::multi_mnist: return {48, 48};
    }
    throw std::invalid_argument("geometry: unknown dataset");
}

int optimal_k(DatasetName name) {
    switch (name) {
        case DatasetName::simple_superposition: return 2;
        case DatasetName::shapes: return 3;
        case DatasetName::bars: return 12;
        case DatasetName::corners: return 5;
        case DatasetName::mnist_shape: return 2;
        case DatasetName::multi_mnist: return 3;
    }
    throw std::invalid_argument("optimal_k: unknown dataset");
}

bool needs_mnist(DatasetName name) {
    return name == DatasetName::mnist_shape || name == DatasetName::multi_mnist;
}

bool is_single_object(Split split) {
    return split == Split::train_single || split == Split::validation;
}

std::string to_string(DatasetName name) {
    switch (name) {
        case DatasetName::simple_superposition: return "simple_superposition";
        case DatasetName::shapes: return "shapes";
        case DatasetName::bars: return "bars";
        case DatasetName::corners: return "corners";
        case DatasetName::mnist_shape: return "mnist_shape";
        case DatasetName::multi_mnist: return "multi_mnist";
    }
    throw std::invalid_argument("to_string: unknown dataset");
}

std::string to_string(Split split) {
    switch (split) {
        case Split::train_single: return "train_single";
        case Split::train_multi: return "train_multi";
        case Split::validation: return "validation";
        case Split::test_multi: return "test_multi";
    }
    throw std::invalid_argument("to_string: unknown split");
}

DatasetName dataset_from_string(const std::string& s) {
    for (auto name : {DatasetName::simple_superposition, DatasetName::shapes, DatasetName::bars,
                      DatasetName::corners, DatasetName::mnist_shape, DatasetName::multi_mnist})
        if (to_string(name) == s) return name;
    throw std::invalid_argument("unknown dataset name '" + s + "'");
}

Split split_from_string(const std::string& s) {
    for (auto split : {Split::train_single, Split::train_multi, Split::validation,
                       Split::test_multi})
        if (to_string(split) == s) return split;
    throw std::invalid_argument("unknown split '" + s + "'");
}

std::vector<Mask> parse_superposition_bank(const std::string& text) {
    std::vector<Mask> bank;
    Mask current;
    int rows = 0;
    std::istringstream in(text);
    std::string line;
    auto flush = [&]() {
        if (rows == 0) return;
        if (rows != 10)
            throw std::runtime_error("superposition bank: pattern has " + std::to_string(rows) +
                                     " rows, expected 10");
        bank.push_back(current);
        current.clear();
        rows = 0;
    };
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line.size() != 10)
            throw std::runtime_error("superposition bank: row width " +
                                     std::to_string(line.size()) + ", expected 10");
        for (char ch : line) {
            if (ch == '#' || ch == '1') current.push_back(1);
            else if (ch == '.' || ch == '0') current.push_back(0);
            else throw std::runtime_error(std::string("superposition bank: bad character '") +
                                          ch + "'");
        }
        ++rows;
    }
    flush();
    if (bank.size() < 2) throw std::runtime_error("superposition bank: need at least 2 patterns");
    for (const Mask& m : bank)
        if (count_lit(m) == 0) throw std::runtime_error("superposition bank: empty pattern");
    return bank;
}

std::vector<Mask> builtin_superposition_bank() {
    static const char* kBankText = R"(##########
..........
##########
..........
##########
..........
##########
..........
##########
..........

..........
##########
..........
##########
..........
##########
..........
##########
..........
##########

#.#.#.#.#.
#.#.#.#.#.
#.#.#.#.#.
#.#.#.#.#.
#.#.#.#.#.
#.#.#.#.#.
#.#.#.#.#.
#.#.#.#.#.
#.#.#.#.#.
#.#.#.#.#.

.#.#.#.#.#
.#.#.#.#.#
.#.#.#.#.#
.#.#.#.#.#
.#.#.#.#.#
.#.#.#.#.#
.#.#.#.#.#
.#.#.#.#.#
.#.#.#.#.#
.#.#.#.#.#

##........
###.......
.###......
..###.....
...###....
....###...
.....###..
......###.
.......###
........##

........##
.......###
......###.
.....###..
....###...
...###....
..###.....
.###......
###.......
##........

##########
##########
##########
##########
##########
..........
..........
..........
..........
..........

#####.....
#####.....
#####.....
#####.....
#####.....
#####.....
#####.....
#####.....
#####.....
#####.....

##########
#........#
#........#
#........#
#........#
#........#
#........#
#........#
#........#
##########

..........
..........
..........
...####...
...####...
...####...
...####...
..........
..........
..........
)";
    return parse_superposition_bank(kBankText);
}

std::vector<Mask> load_superposition_bank(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("superposition bank: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_superposition_bank(buf.str());
}

Dataset generate(const DatasetSpec& spec) {
    if (spec.count <= 0) throw std::invalid_argument("generate: count must be positive");
    const auto [width, height] = geometry(spec.name);
    const bool single = is_single_object(spec.split);

    std::vector<Mask> bank;
    if (spec.name == DatasetName::simple_superposition)
        bank = spec.bank_path.empty() ? builtin_superposition_bank()
                                      : load_superposition_bank(spec.bank_path);

    IdxTensor mnist_images;
    MnistPool pool;
    if (needs_mnist(spec.name)) {
        const std::string dir = spec.mnist_dir.empty() ? "." : spec.mnist_dir;
        const bool test = spec.split == Split::test_multi;
        mnist_images = load_idx(find_mnist_file(dir, test ? "t10k-images" : "train-images"));
        if (mnist_images.dims.size() != 3 || mnist_images.dims[1] != 28 ||
            mnist_images.dims[2] != 28)
            throw std::runtime_error("generate: unexpected MNIST image tensor shape");
        pool.images = &mnist_images;
        if (test) {
            pool.begin = 0;
            pool.end = mnist_images.dims[0];
        } else if (spec.split == Split::validation) {
            // last sixth of the train file is held out for validation
            pool.begin = mnist_images.dims[0] - mnist_images.dims[0] / 6;
            pool.end = mnist_images.dims[0];
        } else {
            pool.begin = 0;
            pool.end = mnist_images.dims[0] - mnist_images.dims[0] / 6;
        }
    }

    const std::uint64_t split_key = (static_cast<std::uint64_t>(spec.name) << 8) |
                                    static_cast<std::uint64_t>(spec.split);
    Rng base = Rng(spec.seed).substream(stream::dataset_gen).substream(split_key);

    Dataset ds;
    ds.name = spec.name;
    ds.width = width;
    ds.height = height;
    ds.examples.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        Rng rng = base.substream(static_cast<std::uint64_t>(i));
        std::vector<Mask> masks;
        switch (spec.name) {
            case DatasetName::simple_superposition:
                masks = gen_superposition(bank, single, rng);
                break;
            case DatasetName::shapes: masks = gen_shapes(single, rng); break;
            case DatasetName::bars: masks = gen_bars(single, spec.bar_prob, rng); break;
            case DatasetName::corners: masks = gen_corners(single, rng); break;
            case DatasetName::mnist_shape: masks = gen_mnist_shape(pool, single, rng); break;
            case DatasetName::multi_mnist: masks = gen_multi_mnist(pool, single, rng); break;
        }
        ds.examples.push_back(make_example(width, height, std::move(masks)));
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
    out.write("RCDS", 4);
    put_u16(out, kContainerVersion);
    const std::string name = to_string(ds.name);
    put_u16(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u16(out, static_cast<std::uint16_t>(ds.width));
    put_u16(out, static_cast<std::uint16_t>(ds.height));
    put_u32(out, static_cast<std::uint32_t>(ds.examples.size()));

    const std::size_t n = static_cast<std::size_t>(ds.width) * ds.height;
    std::vector<std::uint8_t> bits(n);
    for (const LabeledExample& ex : ds.examples) {
        if (ex.image.pixels.size() != n)
            throw std::invalid_argument("save_dataset: example geometry mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            const double p = ex.image.pixels[i];
            if (p != 0.0 && p != 1.0)
                throw std::invalid_argument("save_dataset: container stores binary images only");
            bits[i] = p == 1.0 ? 1 : 0;
        }
        pack_bits(out, bits);
        if (ex.truth.object_masks.size() > 255)
            throw std::invalid_argument("save_dataset: too many objects");
        out.put(static_cast<char>(ex.truth.object_masks.size()));
        for (const Mask& m : ex.truth.object_masks) pack_bits(out, m);
    }
    if (!out) throw std::runtime_error("save_dataset: write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string(magic, 4) != "RCDS")
        throw std::runtime_error("load_dataset: " + path + " is not a dataset container");
    const std::uint16_t version = get_u16(in, path);
    if (version != kContainerVersion)
        throw std::runtime_error("load_dataset: unsupported container version " +
                                 std::to_string(version));
    const std::uint16_t name_len = get_u16(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (in.gcount() != name_len) throw std::runtime_error("load_dataset: truncated file " + path);

    Dataset ds;
    ds.name = dataset_from_string(name);
    ds.width = get_u16(in, path);
    ds.height = get_u16(in, path);
    const std::uint32_t count = get_u32(in, path);
    const std::size_t n = static_cast<std::size_t>(ds.width) * ds.height;

    ds.examples.reserve(count);
    for (std::uint32_t e = 0; e < count; ++e) {
        LabeledExample ex;
        ex.image.width = ds.width;
        ex.image.height = ds.height;
        auto bits = unpack_bits(in, n, path);
        ex.image.pixels.assign(bits.begin(), bits.end());
        const int n_objects = in.get();
        if (n_objects < 0) throw std::runtime_error("load_dataset: truncated file " + path);
        std::vector<Mask> masks;
        masks.reserve(n_objects);
        for (int o = 0; o < n_objects; ++o) masks.push_back(unpack_bits(in, n, path));
        ex.truth = make_ground_truth(std::move(masks));
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

}  // namespace rcbind

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rcbind/image.hpp"

namespace rcbind {

enum class DatasetName {
    simple_superposition,
    shapes,
    bars,
    corners,
    mnist_shape,
    multi_mnist,
};

enum class Split { train_single, train_multi, validation, test_multi };

// Everything that determines a generated dataset. Generation is a pure
// function of this struct: same spec, same examples, bit for bit.
struct DatasetSpec {
    DatasetName name = DatasetName::shapes;
    Split split = Split::train_single;
    int count = 0;
    std::uint64_t seed = 0;

    double bar_prob = 0.25;   // bars: per-candidate inclusion probability
    std::string bank_path;    // simple_superposition: pattern bank override (empty = built-in)
    std::string mnist_dir;    // mnist_shape / multi_mnist: directory holding the IDX files
};

struct Dataset {
    DatasetName name = DatasetName::shapes;
    int width = 0;
    int height = 0;
    std::vector<LabeledExample> examples;
};

Dataset generate(const DatasetSpec& spec);

// Container file, magic "RCDS". Images and masks are bit-packed; all
// multi-byte integers little-endian.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

std::pair<int, int> geometry(DatasetName name);  // width, height
int optimal_k(DatasetName name);                 // cluster count matching the object structure
bool needs_mnist(DatasetName name);
bool is_single_object(Split split);

std::string to_string(DatasetName name);
std::string to_string(Split split);
DatasetName dataset_from_string(const std::string& s);
Split split_from_string(const std::string& s);

// Superposition pattern bank: fixed 10x10 binary patterns. The built-in bank
// ships as both code and a data file so it can be swapped without rebuilding.
std::vector<Mask> builtin_superposition_bank();
std::vector<Mask> load_superposition_bank(const std::string& path);
std::vector<Mask> parse_superposition_bank(const std::string& text);

}  // namespace rcbind

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rcbind {

// Dense row-major matrix of doubles. Values are immutable by convention once
// a matrix leaves its producer; nothing here locks, so sharing across threads
// is read-only sharing.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows * cols, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    std::string shape_str() const;
};

// c = a * b, a is (m x k), b is (k x n).
Matrix matmul(const Matrix& a, const Matrix& b);

// c = a * b^T, a is (m x k), b is (n x k). Inner loops run over contiguous rows.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// c = a^T * b, a is (k x m), b is (k x n).
Matrix matmul_tn(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& m);

}  // namespace rcbind

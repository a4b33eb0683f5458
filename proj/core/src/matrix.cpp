#include "rcbind/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace rcbind {

std::string Matrix::shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

static void check_inner(const Matrix& a, const Matrix& b, std::size_t a_inner,
                        std::size_t b_inner, const char* op) {
    if (a_inner != b_inner)
        throw std::invalid_argument(std::string(op) + ": dimension mismatch, " +
                                    a.shape_str() + " vs " + b.shape_str());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_inner(a, b, a.cols, b.rows, "matmul");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ar = a.row(i);
        double* cr = c.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = ar[k];
            if (aik == 0.0) continue;
            const double* br = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) cr[j] += aik * br[j];
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    check_inner(a, b, a.cols, b.cols, "matmul_nt");
    Matrix c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ar = a.row(i);
        double* cr = c.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* br = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s += ar[k] * br[k];
            cr[j] = s;
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    check_inner(a, b, a.rows, b.rows, "matmul_tn");
    Matrix c(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* ar = a.row(k);
        const double* br = b.row(k);
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = ar[i];
            if (aki == 0.0) continue;
            double* cr = c.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) cr[j] += aki * br[j];
        }
    }
    return c;
}

bool all_finite(const Matrix& m) {
    for (double v : m.data)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace rcbind

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace haartv {

// Dense row-major matrix of doubles. Small sizes only; no view machinery.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// Symmetric matrix with a single stored copy of each entry (packed lower
// triangle), so at(i,j) == at(j,i) holds exactly by construction.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(int order)
        : order_(order), data_(static_cast<std::size_t>(order) * (order + 1) / 2, 0.0) {
        if (order <= 0) throw std::invalid_argument("SymmetricMatrix: order must be positive");
    }

    int order() const noexcept { return order_; }

    double& at(int i, int j) { return data_[index(i, j)]; }
    double at(int i, int j) const { return data_[index(i, j)]; }

private:
    std::size_t index(int i, int j) const {
        if (j > i) std::swap(i, j);
        return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
    }

    int order_;
    std::vector<double> data_;
};

// Eigenvalues in descending order.
struct Spectrum {
    std::vector<double> values;
};

}  // namespace haartv

#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "simenh/common/error.hpp"

namespace simenh::nn {

// Row-major 2-D array of doubles. Rows are batch entries, columns features.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw ValidationError("matrix dimensions must be non-negative");
    }
    Matrix(int r, int c, std::initializer_list<double> values) : Matrix(r, c) {
        if (values.size() != data.size())
            throw ValidationError("matrix initializer size does not match dimensions");
        std::size_t i = 0;
        for (double v : values) data[i++] = v;
    }

    bool empty() const { return data.empty(); }
    std::size_t size() const { return data.size(); }

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

    std::span<const double> row_span(int r) const { return {row(r), static_cast<std::size_t>(cols)}; }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

}  // namespace simenh::nn

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bodyfat {

// Dense row-major matrix of doubles. Desk-scale problems only; no view
// machinery, just enough surface for the regression and neural modules.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) {
        return {data_.data() + r * cols_, cols_};
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows);
std::vector<double> take(std::span<const double> v, std::span<const std::size_t> idx);

// Minimum-residual solution of A x ~= y via Householder QR (never forms
// the normal matrix). Requires rows >= cols. Throws singular_error when
// the R-diagonal condition estimate exceeds cond_limit, naming the
// offending columns via col_names when provided.
std::vector<double> solve_least_squares(const Matrix& a, std::span<const double> y,
                                        double cond_limit = 1e12,
                                        const std::vector<std::string>* col_names = nullptr);

}  // namespace bodyfat

#pragma once

#include <string>
#include <vector>

#include "bodyfat/linalg.hpp"

namespace bodyfat {

// Per-feature z-score parameters, fitted on training data only.
struct Standardization {
    std::vector<double> means;
    std::vector<double> sds;  // sample convention (n-1), all > 0

    bool operator==(const Standardization&) const = default;
};

// Throws singular_error on zero-variance columns, naming them.
Standardization fit_standardization(const Matrix& x, const std::vector<std::string>& names);

Matrix apply_standardization(const Matrix& x, const Standardization& st);

}  // namespace bodyfat

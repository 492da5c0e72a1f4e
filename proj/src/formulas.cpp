#include "bodyfat/formulas.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bodyfat/errors.hpp"

namespace bodyfat::formulas {

namespace {

double apply_clamp(double bf, Clamp clamp) {
    return clamp == Clamp::on ? std::clamp(bf, 0.0, 75.0) : bf;
}

}  // namespace

double bmi(double weight_kg, double height_m) {
    if (!(weight_kg > 0.0))
        throw domain_error("bmi: weight must be positive, got " + std::to_string(weight_kg));
    if (!(height_m > 0.0))
        throw domain_error("bmi: height must be positive, got " + std::to_string(height_m));
    return weight_kg / (height_m * height_m);
}

BfPercent siri_bf(BodyDensity density, Clamp clamp) {
    if (!(density.value > 0.8 && density.value < 1.2))
        throw domain_error("siri_bf: density " + std::to_string(density.value) +
                           " g/cm^3 outside physiological range (0.8, 1.2)");
    return {apply_clamp(495.0 / density.value - 450.0, clamp)};
}

BfPercent navy_bf_male(double waist_cm, double neck_cm, double height_cm, Clamp clamp) {
    if (!(neck_cm > 0.0))
        throw domain_error("navy_bf_male: neck must be positive, got " +
                           std::to_string(neck_cm));
    if (!(waist_cm > neck_cm))
        throw domain_error("navy_bf_male: waist (" + std::to_string(waist_cm) +
                           ") must exceed neck (" + std::to_string(neck_cm) + ")");
    if (!(height_cm > 0.0))
        throw domain_error("navy_bf_male: height must be positive, got " +
                           std::to_string(height_cm));
    double denom = 1.0324 - 0.19077 * std::log10(waist_cm - neck_cm) +
                   0.15456 * std::log10(height_cm);
    return {apply_clamp(495.0 / denom - 450.0, clamp)};
}

}  // namespace bodyfat::formulas

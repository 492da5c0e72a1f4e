#pragma once

namespace bodyfat::formulas {

// Body density in g/cm^3; Siri's equation accepts (0.8, 1.2) as
// physiological input.
struct BodyDensity {
    double value;
};

// Body fat as percent of total mass.
struct BfPercent {
    double value;
};

enum class Clamp { off, on };

// weight/height^2 in kg/m^2. Throws domain_error on non-positive input.
double bmi(double weight_kg, double height_m);

// Siri: 495/rho - 450. Strictly decreasing in rho.
BfPercent siri_bf(BodyDensity density, Clamp clamp = Clamp::off);

// U.S. Navy male estimator, standard metric form (cm inputs, base-10 logs):
//   495 / (1.0324 - 0.19077 log10(waist - neck) + 0.15456 log10(height)) - 450
// Requires waist > neck > 0 and height > 0.
BfPercent navy_bf_male(double waist_cm, double neck_cm, double height_cm,
                       Clamp clamp = Clamp::off);

}  // namespace bodyfat::formulas

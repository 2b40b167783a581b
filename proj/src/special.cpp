#include "haartv/special.hpp"

#include <cmath>
#include <stdexcept>

namespace haartv {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // ln sqrt(2*pi)

// Lanczos coefficients for g = 7.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double log_gamma_lanczos(double x) {
    // Valid for x >= 0.5.
    const double z = x - 1.0;
    double series = kLanczos[0];
    for (int i = 1; i < 9; ++i) series += kLanczos[i] / (z + i);
    const double base = z + 7.5;
    return kLogSqrt2Pi + (z + 0.5) * std::log(base) - base + std::log(series);
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
    if (x >= 0.5) return log_gamma_lanczos(x);
    // Reflection: ln Gamma(x) = ln(pi / sin(pi x)) - ln Gamma(1 - x).
    return std::log(kPi / std::sin(kPi * x)) - log_gamma_lanczos(1.0 - x);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

}  // namespace haartv

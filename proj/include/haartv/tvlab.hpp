#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "haartv/density.hpp"

namespace haartv::tvlab {

struct TvEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;
    long long samples = 0;
    std::uint64_t seed = 0;
    double normalization_mean = 0.0;    // MC average of K_n L_n, should be 1
    double normalization_stderr = 0.0;
};

// Monte Carlo estimate of d_TV(sqrt(n) W_n, X_n) = E|K_n L_n - 1| under the
// Gaussian measure. Per-sample stream index equals the sample index and the
// reduction is chunked in fixed index order, so the result is a pure function
// of (spec, samples, seed) regardless of the worker count.
TvEstimate tv_estimate(const density::BlockSpec& spec, long long samples, std::uint64_t seed,
                       int workers = 0);

// Diaconis-Freedman bound 2(k+3)/(n-k-3) for the first k coordinates of a
// uniform point on sqrt(n) S^{n-1}; needs n >= 5 and 1 <= k <= n-4.
double df_bound(long long n, long long k);

// phi(x, y) = E|exp(-x^2 y^2 / 8 + (x y / 4) xi) - 1|, xi standard normal,
// by adaptive quadrature split at the integrand's kink. Depends on x y only.
double phi_profile(double x, double y);

struct EigMaxReport {
    int p = 0;
    int q = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    double max_ratio = 0.0;   // max over samples of lambda_max / p
    double mean_ratio = 0.0;  // sample mean of lambda_max / p
    std::vector<std::pair<double, double>> quantiles;  // (probability, value)
};

// Samples lambda_max(X^T X)/p for Gaussian p x q blocks; reference values are
// the crude bound 4 and the Bai-Silverstein limit (1 + sqrt(q/p))^2.
EigMaxReport eigmax_experiment(int p, int q, int samples, std::uint64_t seed);

// Kolmogorov-Smirnov distance between sqrt(n) X_1 (X uniform on S^{n-1},
// sampled by normalizing a Gaussian vector) and the standard normal CDF.
double sphere_coordinate_experiment(long long n, int samples, std::uint64_t seed);

}  // namespace haartv::tvlab

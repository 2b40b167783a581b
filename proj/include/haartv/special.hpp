#pragma once

namespace haartv {

// ln Gamma(x) for x > 0 via the Lanczos approximation (g = 7), with the
// reflection formula below 0.5. Throws std::domain_error for x <= 0.
double log_gamma(double x);

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace haartv

#include "haartv/formulas.hpp"

#include <cmath>
#include <stdexcept>

namespace haartv::formulas {

BigInt falling_factorial(BigInt x, int a) {
    if (a < 0) throw std::invalid_argument("falling_factorial: a must be >= 0");
    BigInt r = 1;
    for (int i = 0; i < a; ++i) r *= (x - i);
    return r;
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;  // exact at every step
    }
    return r;
}

BigInt narayana(int h, int r) {
    if (h < 1 || r < 0 || r > h - 1) throw std::invalid_argument("narayana: need 0 <= r <= h-1");
    BigInt num = binomial(h, r) * binomial(h - 1, r);
    BigInt quot = num / (r + 1);
    return quot;
}

BigInt catalan(int h) {
    if (h < 0) throw std::invalid_argument("catalan: h must be >= 0");
    return binomial(2 * h, h) / (h + 1);
}

namespace {

// sum_{r=0}^{h-1} (p)_{h-r} (q)_{r+1} N(h, r)  -- the mean main sum
BigInt mean_main_sum(int p, int q, int h) {
    BigInt s = 0;
    for (int r = 0; r <= h - 1; ++r)
        s += falling_factorial(p, h - r) * falling_factorial(q, r + 1) * narayana(h, r);
    return s;
}

// sum_{s=0}^{k-1} (p)_{k-1-s} (q)_s N(k, s)  -- the second factor of term 1
BigInt cov_partner_sum(int p, int q, int k) {
    BigInt s = 0;
    for (int t = 0; t <= k - 1; ++t)
        s += falling_factorial(p, k - 1 - t) * falling_factorial(q, t) * narayana(k, t);
    return s;
}

// sum_{r=0}^{m} (p)_{m-r} (q)_r N(m+1, r)  -- the cycle-attachment sum
BigInt cycle_tail_sum(int p, int q, int m) {
    BigInt s = 0;
    for (int r = 0; r <= m; ++r)
        s += falling_factorial(p, m - r) * falling_factorial(q, r) * narayana(m + 1, r);
    return s;
}

}  // namespace

LeadingEstimate mean_trace_leading(int p, int q, int h) {
    if (q < 1 || p < q) throw std::invalid_argument("mean_trace_leading: need p >= q >= 1");
    if (h < 1) throw std::invalid_argument("mean_trace_leading: need h >= 1");
    if (p <= h) throw std::domain_error("mean_trace_leading: envelope undefined for p <= h");
    LeadingEstimate est;
    est.main_term = mean_main_sum(p, q, h);
    est.relative_error_envelope = static_cast<double>(h) / (p - h);
    return est;
}

CovarianceBreakdown covariance_breakdown(int p, int q, int h, int k) {
    if (q < 1 || p < q) throw std::invalid_argument("covariance_breakdown: need p >= q >= 1");
    if (h < 1 || k < h) throw std::invalid_argument("covariance_breakdown: need 1 <= h <= k");
    if (p <= k) throw std::domain_error("covariance_breakdown: envelope undefined for p <= k");

    CovarianceBreakdown out;

    out.term1 = 2 * BigInt(h) * k * mean_main_sum(p, q, h) * cov_partner_sum(p, q, k);

    // A cycle of 2h single entries needs h >= 2 (two parallel entries coincide
    // for h = 1), and the factor 2(k-h) kills h == k.
    out.term2 = 0;
    if (h >= 2 && k > h) {
        out.term2 = 2 * BigInt(k - h) * falling_factorial(p, h) * falling_factorial(q, h) *
                    cycle_tail_sum(p, q, k - h);
    }

    out.term3 = 0;
    for (int l = 2; l <= h - 1; ++l) {
        out.term3 += 2 * BigInt(h - l) * (k - l) * falling_factorial(p, l) *
                     falling_factorial(q, l) * cycle_tail_sum(p, q, h - l) *
                     cycle_tail_sum(p, q, k - l);
    }

    out.simplified_main = 2 * BigInt(h) * k *
                          (falling_factorial(p, h) * q * falling_factorial(p, k - 1) +
                           p * falling_factorial(q, h) * falling_factorial(q, k - 1));
    // At h = k = 1 the two simplified summands are the same graph count, so the
    // simplified form reports 4pq where the exact variance is 2pq.
    out.simplified_degenerate = (k == 1);

    const double pk = std::pow(static_cast<double>(p), h + k - 2);
    const double q2 = static_cast<double>(q) * q;
    const double four = std::pow(4.0, h + k);
    out.e_envelope = k * pk * q2 * four;
    out.f_envelope = std::pow(static_cast<double>(k), 8) * pk * q2 * four;
    return out;
}

double variance_hi_main(int p, int q, double n, int i) {
    if (i < 1) throw std::invalid_argument("variance_hi_main: need i >= 1");
    if (p <= i + 1) throw std::domain_error("variance_hi_main: need p > i + 1");
    const BigInt qq(q), pp(p);
    const BigInt left = falling_factorial(p, i - 1) * falling_factorial(p, i) * qq *
                        (qq * qq - pp + BigInt(i) * i + i + 2 * qq * i - 1);
    const BigInt right = pp * falling_factorial(q, i - 1) * falling_factorial(q, i) *
                         (pp * pp - qq + BigInt(i) * i + i + 2 * pp * i - 1);
    const double numer = BigInt(left + right).convert_to<double>();
    return numer / (2.0 * std::pow(n, 2 * i));
}

StirlingBounds stirling_bounds(int m) {
    if (m < 1) throw std::invalid_argument("stirling_bounds: m must be >= 1");
    const double md = m;
    const double core = std::pow(md, md + 0.5) * std::exp(-md);
    return {std::sqrt(2.0 * 3.14159265358979323846) * core, std::exp(1.0) * core};
}

BigInt factorial(int m) {
    BigInt r = 1;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
}

}  // namespace haartv::formulas

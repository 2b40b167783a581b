#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace haartv::formulas {

using BigInt = boost::multiprecision::cpp_int;

// (x)_a = x (x-1) ... (x-a+1); (x)_0 = 1.
BigInt falling_factorial(BigInt x, int a);

BigInt binomial(int n, int k);

// N(h, r) = C(h,r) C(h-1,r) / (r+1): Narayana count of the index-graph classes
// with r+1 column labels. Exact; rows sum to Catalan numbers.
BigInt narayana(int h, int r);

BigInt catalan(int h);

// Leading-order mean of tr(X^T X)^h: the exact Narayana-weighted sum of
// falling factorials, with its relative error envelope h / (p - h).
struct LeadingEstimate {
    BigInt main_term;
    double relative_error_envelope;
};

LeadingEstimate mean_trace_leading(int p, int q, int h);

// The three exact summands of the covariance decomposition, the simplified
// main term 2hk((p)_h q (p)_{k-1} + p (q)_h (q)_{k-1}), and the envelope
// expressions e = k p^{h+k-2} q^2 4^{h+k}, f = k^8 p^{h+k-2} q^2 4^{h+k}.
//
// term2 counts pairs whose smaller graph is a cycle of 2h distinct entries,
// which exists only for 2 <= h < k; term3 needs an inner cycle of length
// 2l with 2 <= l <= h-1. Both are zero outside those ranges.
struct CovarianceBreakdown {
    BigInt term1;
    BigInt term2;
    BigInt term3;
    BigInt simplified_main;
    bool simplified_degenerate = false;  // k == 1: simplified_main double-counts; use total
    double e_envelope = 0.0;
    double f_envelope = 0.0;

    BigInt total() const { return term1 + term2 + term3; }
};

CovarianceBreakdown covariance_breakdown(int p, int q, int h, int k);

// Main term of Var[h_i] from the variance display:
// [ (p)_{i-1}(p)_i q (q^2 - p + i^2 + i + 2qi - 1)
//   + p (q)_{i-1}(q)_i (p^2 - q + i^2 + i + 2pi - 1) ] / (2 n^{2i}).
double variance_hi_main(int p, int q, double n, int i);

// sqrt(2 pi) m^{m+1/2} e^{-m} <= m! <= e m^{m+1/2} e^{-m}.
struct StirlingBounds {
    double lower;
    double upper;
};

StirlingBounds stirling_bounds(int m);

BigInt factorial(int m);

}  // namespace haartv::formulas

#pragma once

#include <cstdint>

#include "haartv/matrix.hpp"
#include "haartv/wick.hpp"

namespace haartv::density {

// The (n, p, q) triple: ambient dimension and block shape. Eaton's density
// needs p + q <= n; the asymptotic operations additionally need p q < n.
struct BlockSpec {
    long long n = 0;
    int p = 0;
    int q = 0;

    void validate() const;
    bool asymptotic_ok() const { return static_cast<long long>(p) * q < n; }
};

struct LikelihoodParts {
    double log_k;
    double log_l;      // -inf when an eigenvalue is >= n
    double log_ratio;  // log_k + log_l
};

// Smallest odd integer l with l >= log p / log(n / (p q)).
struct TruncationOrder {
    int l = 1;
};

// log of the Wishart constant omega(r, s):
// -[ s(s-1)/4 ln pi + rs/2 ln 2 + sum_{j=1}^s ln Gamma((r-j+1)/2) ].
double log_wishart_constant(double r, int s);

// log K_n = (pq/2) ln(2/n) + sum_j [ln Gamma((n-j+1)/2) - ln Gamma((n-p-j+1)/2)].
double log_kn(const BlockSpec& spec);

// F(x) = x/2 + (n-p-q-1)/2 * ln(1 - x/n) on [0, n); -inf otherwise.
double f_eval(double x, const BlockSpec& spec);

// log L_n = sum_i F(lambda_i) over the spectrum of z^T z.
double log_l(const Spectrum& spectrum, const BlockSpec& spec);

LikelihoodParts likelihood_parts(const Spectrum& spectrum, const BlockSpec& spec);

// log density of sqrt(n) W_n at z, from the Wishart-constant form of the
// block density. -inf outside the eigenvalue support.
double eaton_log_density(const Matrix& z, const BlockSpec& spec);

TruncationOrder choose_l(const BlockSpec& spec);

// The finite part of the log K_n expansion:
// -pq^2/(4n) - sum_{k=1}^{l-1} p^{k+1} q / (2(k+1)k n^k) - p^{l+1} q / (2l n^l).
// Accepts p = 0 or q = 0, where the expression is identically zero.
double log_kn_expansion(long long n, long long p, long long q, int l);

double log_kn_asymptotic(const BlockSpec& spec, TruncationOrder order);

// Pluggable source for E[tr(X^T X)^h]: closed forms for h <= 2, the Wick
// oracle while the enumeration budget allows, and the leading-order formula
// (flagged approximate) beyond that.
class MomentSource {
public:
    MomentSource(int p, int q, std::uint64_t oracle_budget = wick::kDefaultBudget);

    struct Moment {
        wick::BigInt numerator;  // exact value when exact == true
        double approx_value;     // used when exact == false
        bool exact;
    };

    Moment trace_moment(int h) const;

    int p() const noexcept { return p_; }
    int q() const noexcept { return q_; }

private:
    int p_, q_;
    std::uint64_t budget_;
};

struct EjValue {
    double value;
    bool approximate;
};

// E_j = E[(1/n^j)((p+q+1)/(2j) tr W^j - 1/(2(j+1)) tr W^{j+1})] for j < l;
// the j = l term drops the second summand.
EjValue expected_ej(const BlockSpec& spec, int j, TruncationOrder order, const MomentSource& source);

// The closed expansion of sum_j E_j:
// pq^2/(4n) + sum_{j=1}^{l-1} (p)_j p q / (2j(j+1) n^j) + (p)_l p q / (2l n^l).
double sum_ej_expansion(long long n, long long p, long long q, int l);

struct ResidualValue {
    double value;
    bool approximate;
};

// log K_n + sum_{j=1}^{l} E_j with l from choose_l.
ResidualValue cancellation_residual(const BlockSpec& spec,
                                    std::uint64_t oracle_budget = wick::kDefaultBudget);

}  // namespace haartv::density

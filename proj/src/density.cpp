#include "haartv/density.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "haartv/formulas.hpp"
#include "haartv/linalg.hpp"
#include "haartv/special.hpp"

namespace haartv::density {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2Pi = 1.83787706640934548356;

using BigInt = wick::BigInt;
using BigRat = boost::multiprecision::cpp_rational;

BigInt ipow(long long base, int e) {
    BigInt r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

void BlockSpec::validate() const {
    if (p < 1 || q < 1 || n < 1) throw std::invalid_argument("BlockSpec: n, p, q must be positive");
    if (q > p) throw std::invalid_argument("BlockSpec: requires q <= p");
    if (static_cast<long long>(p) + q > n)
        throw std::invalid_argument("BlockSpec: requires p + q <= n");
}

double log_wishart_constant(double r, int s) {
    if (s < 1) throw std::invalid_argument("log_wishart_constant: s must be a positive integer");
    if (!(r > s - 1)) throw std::domain_error("log_wishart_constant: requires r > s - 1");
    double gsum = 0.0;
    for (int j = 1; j <= s; ++j) gsum += log_gamma((r - j + 1) / 2.0);
    const double log_pi = std::log(3.14159265358979323846);
    return -(s * (s - 1) / 4.0 * log_pi + r * s / 2.0 * std::log(2.0) + gsum);
}

double log_kn(const BlockSpec& spec) {
    spec.validate();
    const double n = static_cast<double>(spec.n);
    double s = spec.p * spec.q / 2.0 * std::log(2.0 / n);
    for (int j = 1; j <= spec.q; ++j)
        s += log_gamma((n - j + 1) / 2.0) - log_gamma((n - spec.p - j + 1) / 2.0);
    return s;
}

double f_eval(double x, const BlockSpec& spec) {
    const double n = static_cast<double>(spec.n);
    if (!(x >= 0.0) || x >= n) return kNegInf;
    return x / 2.0 + (n - spec.p - spec.q - 1) / 2.0 * std::log1p(-x / n);
}

double log_l(const Spectrum& spectrum, const BlockSpec& spec) {
    double s = 0.0;
    for (double lam : spectrum.values) {
        const double f = f_eval(lam, spec);
        if (f == kNegInf) return kNegInf;
        s += f;
    }
    return s;
}

LikelihoodParts likelihood_parts(const Spectrum& spectrum, const BlockSpec& spec) {
    LikelihoodParts parts;
    parts.log_k = log_kn(spec);
    parts.log_l = log_l(spectrum, spec);
    parts.log_ratio = parts.log_l == kNegInf ? kNegInf : parts.log_k + parts.log_l;
    return parts;
}

double eaton_log_density(const Matrix& z, const BlockSpec& spec) {
    spec.validate();
    if (z.rows() != spec.p || z.cols() != spec.q)
        throw std::invalid_argument("eaton_log_density: z must be p x q");
    const double n = static_cast<double>(spec.n);
    const Spectrum lam = symmetric_eigenvalues(gram(z));

    double logdet = 0.0;
    for (double v : lam.values) {
        if (v >= n) return kNegInf;
        logdet += std::log1p(-v / n);
    }
    const double log_c = -spec.p * spec.q / 2.0 * (kLn2Pi + std::log(n)) +
                         log_wishart_constant(n - spec.p, spec.q) - log_wishart_constant(n, spec.q);
    return log_c + (n - spec.p - spec.q - 1) / 2.0 * logdet;
}

TruncationOrder choose_l(const BlockSpec& spec) {
    spec.validate();
    if (!spec.asymptotic_ok()) throw std::domain_error("choose_l: requires p q < n");
    const double ratio =
        std::log(static_cast<double>(spec.p)) /
        std::log(static_cast<double>(spec.n) / (static_cast<double>(spec.p) * spec.q));
    int l = static_cast<int>(std::ceil(ratio));
    if (l < 1) l = 1;
    if (l % 2 == 0) ++l;
    return TruncationOrder{l};
}

double log_kn_expansion(long long n, long long p, long long q, int l) {
    if (l < 1) throw std::invalid_argument("log_kn_expansion: l must be >= 1");
    if (p < 0 || q < 0 || n < 1) throw std::invalid_argument("log_kn_expansion: bad parameters");
    BigRat s = -BigRat(BigInt(p) * q * q, 4 * BigInt(n));
    for (int k = 1; k <= l - 1; ++k)
        s -= BigRat(ipow(p, k + 1) * q, 2 * BigInt(k + 1) * k * ipow(n, k));
    s -= BigRat(ipow(p, l + 1) * q, 2 * BigInt(l) * ipow(n, l));
    return s.convert_to<double>();
}

double log_kn_asymptotic(const BlockSpec& spec, TruncationOrder order) {
    spec.validate();
    if (!spec.asymptotic_ok())
        throw std::domain_error("log_kn_asymptotic: requires p q < n");
    return log_kn_expansion(spec.n, spec.p, spec.q, order.l);
}

MomentSource::MomentSource(int p, int q, std::uint64_t oracle_budget)
    : p_(p), q_(q), budget_(oracle_budget) {
    if (p < 1 || q < 1) throw std::invalid_argument("MomentSource: p, q must be positive");
}

MomentSource::Moment MomentSource::trace_moment(int h) const {
    if (h < 1) throw std::invalid_argument("MomentSource: h must be >= 1");
    const BigInt pp(p_), qq(q_);
    if (h == 1) return {pp * qq, 0.0, true};
    if (h == 2) return {pp * qq * (pp + qq + 1), 0.0, true};
    try {
        return {wick::exact_trace_moment({p_, q_, h}, budget_), 0.0, true};
    } catch (const wick::BudgetExceeded&) {
        const auto leading = formulas::mean_trace_leading(p_, q_, h);
        return {0, leading.main_term.convert_to<double>(), false};
    }
}

EjValue expected_ej(const BlockSpec& spec, int j, TruncationOrder order, const MomentSource& source) {
    spec.validate();
    if (j < 1 || j > order.l) throw std::invalid_argument("expected_ej: need 1 <= j <= l");

    const BigInt pq_sum = BigInt(spec.p) + spec.q + 1;
    const auto mj = source.trace_moment(j);
    bool approximate = !mj.exact;

    // (p+q+1)/(2j) * m_j, minus m_{j+1} / (2(j+1)) except at j == l.
    BigRat exact_part = 0;
    double approx_part = 0.0;
    if (mj.exact)
        exact_part += BigRat(pq_sum * mj.numerator, 2 * BigInt(j));
    else
        approx_part += pq_sum.convert_to<double>() * mj.approx_value / (2.0 * j);

    if (j < order.l) {
        const auto mj1 = source.trace_moment(j + 1);
        approximate = approximate || !mj1.exact;
        if (mj1.exact)
            exact_part -= BigRat(mj1.numerator, 2 * BigInt(j + 1));
        else
            approx_part -= mj1.approx_value / (2.0 * (j + 1));
    }

    const BigRat scale(BigInt(1), ipow(spec.n, j));
    const double value = (exact_part * scale).convert_to<double>() +
                         approx_part / ipow(spec.n, j).convert_to<double>();
    return {value, approximate};
}

double sum_ej_expansion(long long n, long long p, long long q, int l) {
    if (l < 1) throw std::invalid_argument("sum_ej_expansion: l must be >= 1");
    BigRat s(BigInt(p) * q * q, 4 * BigInt(n));
    for (int j = 1; j <= l - 1; ++j)
        s += BigRat(formulas::falling_factorial(p, j) * p * q,
                    2 * BigInt(j) * (j + 1) * ipow(n, j));
    s += BigRat(formulas::falling_factorial(p, l) * p * q, 2 * BigInt(l) * ipow(n, l));
    return s.convert_to<double>();
}

ResidualValue cancellation_residual(const BlockSpec& spec, std::uint64_t oracle_budget) {
    const TruncationOrder order = choose_l(spec);
    const MomentSource source(spec.p, spec.q, oracle_budget);
    double sum = log_kn(spec);
    bool approximate = false;
    for (int j = 1; j <= order.l; ++j) {
        const EjValue ej = expected_ej(spec, j, order, source);
        sum += ej.value;
        approximate = approximate || ej.approximate;
    }
    return {sum, approximate};
}

}  // namespace haartv::density

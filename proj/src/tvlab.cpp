#include "haartv/tvlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "haartv/linalg.hpp"
#include "haartv/parallel.hpp"
#include "haartv/rng.hpp"
#include "haartv/special.hpp"
#include "haartv/summation.hpp"

namespace haartv::tvlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr long long kChunkSamples = 4096;

struct ChunkSums {
    double abs_dev = 0.0;
    double abs_dev_sq = 0.0;
    double ratio = 0.0;
    double ratio_sq = 0.0;
};

}  // namespace

TvEstimate tv_estimate(const density::BlockSpec& spec, long long samples, std::uint64_t seed,
                       int workers) {
    spec.validate();
    if (samples < 100) throw std::invalid_argument("tv_estimate: need samples >= 100");

    const double logk = density::log_kn(spec);
    const std::size_t chunk_count =
        static_cast<std::size_t>((samples + kChunkSamples - 1) / kChunkSamples);
    std::vector<ChunkSums> partial(chunk_count);

    run_chunked(chunk_count, workers, [&](std::size_t c) {
        const long long begin = static_cast<long long>(c) * kChunkSamples;
        const long long end = std::min(samples, begin + kChunkSamples);
        KahanAccumulator abs_dev, abs_dev_sq, ratio, ratio_sq;
        for (long long s = begin; s < end; ++s) {
            RngStream rng(seed, static_cast<std::uint64_t>(s));
            const Matrix x = gaussian_block(spec.p, spec.q, rng);
            const Spectrum lam = symmetric_eigenvalues(gram(x));
            const double log_ratio = logk + density::log_l(lam, spec);
            double dev, kl;
            if (log_ratio == kNegInf) {
                dev = 1.0;
                kl = 0.0;
            } else {
                dev = std::fabs(std::expm1(log_ratio));
                kl = std::exp(log_ratio);
            }
            abs_dev.add(dev);
            abs_dev_sq.add(dev * dev);
            ratio.add(kl);
            ratio_sq.add(kl * kl);
        }
        partial[c] = {abs_dev.value(), abs_dev_sq.value(), ratio.value(), ratio_sq.value()};
    });

    KahanAccumulator abs_dev, abs_dev_sq, ratio, ratio_sq;
    for (const ChunkSums& cs : partial) {
        abs_dev.add(cs.abs_dev);
        abs_dev_sq.add(cs.abs_dev_sq);
        ratio.add(cs.ratio);
        ratio_sq.add(cs.ratio_sq);
    }

    const double nd = static_cast<double>(samples);
    auto stderr_of = [&](double sum_sq, double mean) {
        const double var = std::max(0.0, (sum_sq - nd * mean * mean) / (nd - 1.0));
        return std::sqrt(var / nd);
    };

    TvEstimate est;
    est.samples = samples;
    est.seed = seed;
    est.mean = abs_dev.value() / nd;
    est.stderr_mean = stderr_of(abs_dev_sq.value(), est.mean);
    est.normalization_mean = ratio.value() / nd;
    est.normalization_stderr = stderr_of(ratio_sq.value(), est.normalization_mean);
    return est;
}

double df_bound(long long n, long long k) {
    if (n < 5) throw std::domain_error("df_bound: requires n >= 5");
    if (k < 1 || k > n - 4) throw std::domain_error("df_bound: requires 1 <= k <= n - 4");
    return 2.0 * static_cast<double>(k + 3) / static_cast<double>(n - k - 3);
}

namespace {

// integrand |exp(-t^2/8 + t xi / 4) - 1| phi(xi), t = x y
double phi_integrand(double xi, double t) {
    const double expo = -t * t / 8.0 + t * xi / 4.0;
    const double gauss = std::exp(-xi * xi / 2.0) * 0.39894228040143267794;
    return std::fabs(std::expm1(expo)) * gauss;
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth, double t) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = phi_integrand(lm, t);
    const double frm = phi_integrand(rm, t);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(a, m, fa, flm, fm, left, tol / 2.0, depth - 1, t) +
           adaptive_simpson(m, b, fm, frm, fb, right, tol / 2.0, depth - 1, t);
}

double integrate_segment(double a, double b, double t, double tol) {
    if (!(b > a)) return 0.0;
    // Unit-width panels keep the initial Simpson samples from stepping over
    // the Gaussian bump on long intervals.
    const int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
    const double panel_tol = tol / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + (b - a) * i / panels;
        const double pb = a + (b - a) * (i + 1) / panels;
        const double fa = phi_integrand(pa, t);
        const double fb = phi_integrand(pb, t);
        const double fm = phi_integrand(0.5 * (pa + pb), t);
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += adaptive_simpson(pa, pb, fa, fm, fb, whole, panel_tol, 40, t);
    }
    return total;
}

}  // namespace

double phi_profile(double x, double y) {
    if (x < 0.0 || y < 0.0) throw std::invalid_argument("phi_profile: x, y must be >= 0");
    const double t = x * y;
    if (t == 0.0) return 0.0;
    // The exponent vanishes at xi = t/2; split there and clip the Gaussian tails.
    const double kink = t / 2.0;
    const double lo = std::min(kink, 0.0) - 42.0;
    const double hi = std::max(kink, t / 4.0) + 42.0;
    return integrate_segment(lo, kink, t, 5e-12) + integrate_segment(kink, hi, t, 5e-12);
}

EigMaxReport eigmax_experiment(int p, int q, int samples, std::uint64_t seed) {
    if (q < 1 || p < q) throw std::invalid_argument("eigmax_experiment: need p >= q >= 1");
    if (samples < 1) throw std::invalid_argument("eigmax_experiment: need samples >= 1");

    std::vector<double> ratios(samples);
    const std::size_t chunk_count = static_cast<std::size_t>((samples + 15) / 16);
    run_chunked(chunk_count, 0, [&](std::size_t c) {
        const int begin = static_cast<int>(c) * 16;
        const int end = std::min(samples, begin + 16);
        for (int s = begin; s < end; ++s) {
            RngStream rng(seed, static_cast<std::uint64_t>(s));
            const Matrix x = gaussian_block(p, q, rng);
            const Spectrum lam = symmetric_eigenvalues(gram(x));
            ratios[s] = lam.values.front() / static_cast<double>(p);
        }
    });

    EigMaxReport report;
    report.p = p;
    report.q = q;
    report.samples = samples;
    report.seed = seed;
    KahanAccumulator mean;
    for (double r : ratios) mean.add(r);
    report.mean_ratio = mean.value() / samples;

    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    report.max_ratio = sorted.back();
    for (double prob : {0.5, 0.9}) {
        const auto idx = static_cast<std::size_t>(prob * (samples - 1));
        report.quantiles.emplace_back(prob, sorted[idx]);
    }
    report.quantiles.emplace_back(1.0, sorted.back());
    return report;
}

double sphere_coordinate_experiment(long long n, int samples, std::uint64_t seed) {
    if (n < 5) throw std::invalid_argument("sphere_coordinate_experiment: need n >= 5");
    if (samples < 1) throw std::invalid_argument("sphere_coordinate_experiment: need samples >= 1");

    std::vector<double> values(samples);
    const std::size_t chunk_count = static_cast<std::size_t>((samples + 255) / 256);
    run_chunked(chunk_count, 0, [&](std::size_t c) {
        const int begin = static_cast<int>(c) * 256;
        const int end = std::min(samples, begin + 256);
        for (int s = begin; s < end; ++s) {
            RngStream rng(seed, static_cast<std::uint64_t>(s));
            double first = 0.0;
            double norm_sq = 0.0;
            for (long long i = 0; i < n; ++i) {
                const double g = rng.next_gaussian();
                if (i == 0) first = g;
                norm_sq += g * g;
            }
            values[s] = std::sqrt(static_cast<double>(n)) * first / std::sqrt(norm_sq);
        }
    });

    std::sort(values.begin(), values.end());
    double ks = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double cdf = normal_cdf(values[i]);
        const double hi = static_cast<double>(i + 1) / samples;
        const double lo = static_cast<double>(i) / samples;
        ks = std::max(ks, std::max(std::fabs(cdf - hi), std::fabs(cdf - lo)));
    }
    return ks;
}

}  // namespace haartv::tvlab

// Acceptance suite: one experiment per criterion, one PASS/FAIL line each.
// Exit code is the number of failed criteria. An optional argv[1] selects a
// single criterion by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "haartv/density.hpp"
#include "haartv/formulas.hpp"
#include "haartv/runner.hpp"
#include "haartv/tvlab.hpp"
#include "haartv/wick.hpp"

using namespace haartv;
using density::BlockSpec;
using wick::BigInt;

namespace {

namespace fs = std::filesystem;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v) { return cli::format_double(v); }

void check(Outcome& out, bool cond, const std::string& what) {
    if (!cond) {
        out.pass = false;
        out.detail += (out.detail.empty() ? "" : "; ") + what;
    }
}

// 1. Oracle exactness on the chi-square closed forms.
Outcome criterion_oracle_exactness() {
    Outcome out;
    for (int p = 1; p <= 6; ++p) {
        for (int q = 1; q <= 6; ++q) {
            if (wick::exact_trace_moment({p, q, 1}) != BigInt(p) * q)
                check(out, false, "moment h=1 mismatch at p=" + std::to_string(p));
            if (wick::exact_trace_covariance(p, q, 1, 1) != 2 * BigInt(p) * q)
                check(out, false, "cov h=k=1 mismatch at p=" + std::to_string(p));
        }
    }
    for (int p = 1; p <= 4; ++p)
        for (int q = 1; q <= 4; ++q)
            if (wick::exact_trace_moment({p, q, 2}) != BigInt(p) * q * (p + q + 1))
                check(out, false, "moment h=2 mismatch at p=" + std::to_string(p));
    if (out.pass) out.detail = "chi-square identities hold for all tested (p, q)";
    return out;
}

// 2. Mean leading term within 5 h/(p-h) of the oracle.
Outcome criterion_mean_leading() {
    Outcome out;
    double worst = 0.0;
    for (int h = 1; h <= 3; ++h) {
        for (int p : {20, 40, 60}) {
            const auto lead = formulas::mean_trace_leading(p, 2, h);
            const BigInt exact = wick::exact_trace_moment({p, 2, h}, 10'000'000);
            const double rel = std::fabs(
                lead.main_term.convert_to<double>() / exact.convert_to<double>() - 1.0);
            worst = std::max(worst, rel / (5.0 * lead.relative_error_envelope));
            check(out, rel <= 5.0 * lead.relative_error_envelope,
                  "h=" + std::to_string(h) + " p=" + std::to_string(p) + " rel=" + fmt(rel));
        }
    }
    out.detail += (out.detail.empty() ? "" : "; ") +
                  ("worst rel/(5 h/(p-h)) = " + fmt(worst));
    return out;
}

// 3. Covariance decomposition within 5 k/(p-k) of the oracle.
Outcome criterion_covariance_formula() {
    Outcome out;
    double worst = 0.0;
    for (const auto [h, k] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 2}, {2, 3}}) {
        for (int p : {20, 40}) {
            const auto br = formulas::covariance_breakdown(p, 2, h, k);
            if (h == k && br.term2 != 0)
                check(out, false, "term2 nonzero at h=k=" + std::to_string(h));
            const BigInt exact =
                wick::exact_trace_covariance(p, 2, h, k, 4'000'000'000ULL);
            const double rel = std::fabs(
                br.total().convert_to<double>() / exact.convert_to<double>() - 1.0);
            const double envelope = 5.0 * k / static_cast<double>(p - k);
            worst = std::max(worst, rel / envelope);
            check(out, rel <= envelope, "(h,k)=(" + std::to_string(h) + "," + std::to_string(k) +
                                            ") p=" + std::to_string(p) + " rel=" + fmt(rel));
        }
    }
    out.detail += (out.detail.empty() ? "" : "; ") + ("worst rel/(5 k/(p-k)) = " + fmt(worst));
    return out;
}

// 4. Ballot enumeration equals Narayana; rows sum to Catalan.
Outcome criterion_ballot() {
    Outcome out;
    for (int h = 1; h <= 10; ++h) {
        BigInt row = 0;
        for (int r = 0; r <= h - 1; ++r) {
            const BigInt counted = wick::count_valid_ballot_pairs(h, r);
            if (counted != formulas::narayana(h, r))
                check(out, false, "mismatch at h=" + std::to_string(h) + " r=" + std::to_string(r));
            row += counted;
        }
        if (row != formulas::catalan(h))
            check(out, false, "row sum != Catalan at h=" + std::to_string(h));
    }
    if (out.pass) out.detail = "all h <= 10";
    return out;
}

// 5. Monte Carlo normalization E[K_n L_n] = 1 within 3 stderr.
Outcome criterion_normalization() {
    Outcome out;
    for (const BlockSpec spec : {BlockSpec{200, 3, 2}, BlockSpec{1000, 5, 5}}) {
        const auto est = tvlab::tv_estimate(spec, 100'000, 1001 + spec.n);
        const double dev = std::fabs(est.normalization_mean - 1.0);
        check(out, dev <= 3.0 * est.normalization_stderr,
              "(n=" + std::to_string(spec.n) + ") |norm-1|=" + fmt(dev) + " > 3se");
        out.detail += (out.detail.empty() ? "" : "; ") + ("n=" + std::to_string(spec.n)) +
                      " norm=" + fmt(est.normalization_mean) + " se=" +
                      fmt(est.normalization_stderr);
    }
    return out;
}

// 6. Diaconis-Freedman bound at (1000, 1, 1).
Outcome criterion_df() {
    Outcome out;
    const auto est = tvlab::tv_estimate({1000, 1, 1}, 100'000, 601);
    const double bound = 0.008032;
    check(out, est.mean <= bound + 3.0 * est.stderr_mean, "tv=" + fmt(est.mean));
    out.detail += (out.detail.empty() ? "" : "; ") + ("tv=" + fmt(est.mean)) +
                  " bound=" + fmt(bound);
    return out;
}

// 7. Main-theorem trend at p = q = 2.
Outcome criterion_trend() {
    Outcome out;
    std::vector<tvlab::TvEstimate> ests;
    for (long long n : {200LL, 800LL, 3200LL})
        ests.push_back(tvlab::tv_estimate({n, 2, 2}, 100'000, 7));
    for (std::size_t i = 1; i < ests.size(); ++i) {
        const double lo_prev = ests[i - 1].mean - 3.0 * ests[i - 1].stderr_mean;
        const double hi_curr = ests[i].mean + 3.0 * ests[i].stderr_mean;
        check(out, lo_prev > hi_curr, "no separation between steps");
    }
    check(out, ests.back().mean <= 0.05, "final tv above 0.05");
    out.detail += (out.detail.empty() ? "" : "; ");
    out.detail += "tv = " + fmt(ests[0].mean) + " -> " + fmt(ests[1].mean) + " -> " +
                  fmt(ests[2].mean);
    return out;
}

// 8. Sharpness in the square-root regime.
Outcome criterion_sharpness() {
    Outcome out;
    const double phi = tvlab::phi_profile(0.5, 0.5);
    std::vector<double> means;
    for (long long n : {400LL, 1600LL}) {
        const int p = static_cast<int>(0.5 * std::sqrt(static_cast<double>(n)));
        const auto est = tvlab::tv_estimate({n, p, p}, 40'000, 801);
        means.push_back(est.mean);
        check(out, est.mean >= 0.5 * phi,
              "n=" + std::to_string(n) + " tv=" + fmt(est.mean) + " < phi/2");
    }
    const double ratio = std::max(means[0], means[1]) / std::min(means[0], means[1]);
    check(out, ratio <= 3.0, "means differ by factor " + fmt(ratio));
    out.detail += (out.detail.empty() ? "" : "; ");
    out.detail += "phi/2=" + fmt(0.5 * phi) + " tv(400)=" + fmt(means[0]) +
                  " tv(1600)=" + fmt(means[1]);
    return out;
}

// 9. log K_n against its finite expansion at p = q = 5.
Outcome criterion_kn_expansion() {
    Outcome out;
    double prev = 1e300;
    double final_gap = 0.0;
    for (long long n : {10'000LL, 100'000LL, 1'000'000LL}) {
        const BlockSpec spec{n, 5, 5};
        const auto order = density::choose_l(spec);
        const double gap =
            std::fabs(density::log_kn(spec) - density::log_kn_asymptotic(spec, order));
        check(out, gap < prev, "gap not decreasing at n=" + std::to_string(n));
        prev = gap;
        final_gap = gap;
    }
    const double expansion = density::log_kn_expansion(1'000'000, 5, 5, 1);
    check(out, std::fabs(expansion - (-9.375e-5)) <= 1e-12, "expansion value drifted");
    check(out, final_gap <= 1e-5,
          "|log_Kn - expansion| = " + fmt(final_gap) + " > 1e-5 at n=1e6");
    out.detail += (out.detail.empty() ? "" : "; ");
    out.detail += "gap(1e6)=" + fmt(final_gap) + ", expansion=" + fmt(expansion) +
                  ", log_Kn=" + fmt(density::log_kn({1'000'000, 5, 5}));
    return out;
}

// 10. Cancellation residual value and 1/n scaling.
Outcome criterion_cancellation() {
    Outcome out;
    const auto r6 = density::cancellation_residual({1'000'000, 5, 5});
    const auto r4 = density::cancellation_residual({10'000, 5, 5});
    check(out, std::fabs(r6.value - (-2.5e-5)) <= 1e-6,
          "residual(1e6) = " + fmt(r6.value) + ", expected -2.5e-5 within 1e-6");
    const double ratio = r4.value / r6.value;
    check(out, ratio >= 90.0 && ratio <= 110.0, "scaling ratio " + fmt(ratio));
    out.detail += (out.detail.empty() ? "" : "; ");
    out.detail += "residual(1e6)=" + fmt(r6.value) + " residual(1e4)=" + fmt(r4.value) +
                  " ratio=" + fmt(ratio);
    return out;
}

// 11. Largest-eigenvalue diagnostics.
Outcome criterion_eigmax() {
    Outcome out;
    const auto rect = tvlab::eigmax_experiment(500, 100, 50, 1101);
    check(out, rect.max_ratio <= 4.5, "max_ratio " + fmt(rect.max_ratio) + " > 4.5");
    const auto square = tvlab::eigmax_experiment(200, 200, 50, 1102);
    check(out, square.mean_ratio >= 3.5 && square.mean_ratio <= 4.3,
          "square mean " + fmt(square.mean_ratio) + " outside [3.5, 4.3]");
    out.detail += (out.detail.empty() ? "" : "; ");
    out.detail += "max_ratio(500,100)=" + fmt(rect.max_ratio) +
                  " mean(200,200)=" + fmt(square.mean_ratio);
    return out;
}

// 12. Stirling bounds sandwich m! for m <= 20.
Outcome criterion_stirling() {
    Outcome out;
    for (int m = 1; m <= 20; ++m) {
        const auto b = formulas::stirling_bounds(m);
        const double exact = formulas::factorial(m).convert_to<double>();
        check(out, b.lower <= exact && exact <= b.upper, "m=" + std::to_string(m));
    }
    if (out.pass) out.detail = "bounds hold for m = 1..20";
    return out;
}

// 13. CLI determinism across worker counts, per command.
Outcome criterion_determinism() {
    Outcome out;
    const std::string cli = HAARTV_CLI_BIN;
    const fs::path base =
        fs::temp_directory_path() / ("haartv_accept_" + std::to_string(::getpid()));
    fs::remove_all(base);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"tv", "tv --n 400 --p 2 --q 2 --samples 20000 --seed 11"},
        {"sweep", "sweep --n 100,200 --p 2 --q 1 --samples 5000 --seed 12 --phi-ref"},
        {"moments", "moments --p 12 --q 2 --h 3"},
        {"cov", "cov --p 8 --q 2 --h 2 --k 2"},
        {"ballot", "ballot --h 8"},
        {"phi", "phi --x 0.5 --y 0.5"},
        {"df-bound", "df-bound --n 1000 --k 4"},
        {"kn-check", "kn-check --n 10000,1000000 --p 5 --q 5"},
        {"cancel-check", "cancel-check --n 10000 --p 5 --q 5"},
        {"eigmax", "eigmax --p 60 --q 20 --samples 40 --seed 13"},
        {"sphere", "sphere --n 200 --samples 5000 --seed 14"},
    };

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    for (const auto& [name, args] : commands) {
        std::string csv1, csv2;
        for (int workers : {1, 4}) {
            const fs::path dir = base / (name + "_w" + std::to_string(workers));
            fs::create_directories(dir);
            const std::string cmd = cli + " " + args + " --workers " + std::to_string(workers) +
                                    " --output-dir " + dir.string() + " >/dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            if (status != 0) {
                check(out, false, name + ": nonzero exit");
                continue;
            }
            (workers == 1 ? csv1 : csv2) = slurp(dir / "results.csv");
        }
        check(out, !csv1.empty() && csv1 == csv2, name + ": results.csv differs across workers");
    }
    fs::remove_all(base);
    if (out.pass) out.detail = "byte-identical results.csv for all 11 commands";
    return out;
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_seconds;  // 0 = no stated limit
    std::function<Outcome()> fn;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "oracle exactness (chi-square closed forms)", 1.0, criterion_oracle_exactness},
        {2, "mean leading term vs oracle", 60.0, criterion_mean_leading},
        {3, "covariance decomposition vs oracle", 300.0, criterion_covariance_formula},
        {4, "ballot enumeration vs Narayana/Catalan", 1.0, criterion_ballot},
        {5, "density normalization E[K_n L_n] = 1", 60.0, criterion_normalization},
        {6, "Diaconis-Freedman bound at (1000,1,1)", 30.0, criterion_df},
        {7, "TV trend at p=q=2", 0.0, criterion_trend},
        {8, "square-root-regime sharpness", 0.0, criterion_sharpness},
        {9, "log K_n expansion gap", 0.0, criterion_kn_expansion},
        {10, "cancellation residual", 0.0, criterion_cancellation},
        {11, "largest-eigenvalue diagnostics", 0.0, criterion_eigmax},
        {12, "Stirling sandwich", 0.0, criterion_stirling},
        {13, "CLI determinism across workers", 0.0, criterion_determinism},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    if (argc > 1) selected = std::atoi(argv[1]);

    int failures = 0;
    for (const Criterion& crit : criteria()) {
        if (selected != 0 && crit.id != selected) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = crit.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (crit.time_limit_seconds > 0 && elapsed > crit.time_limit_seconds) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ");
            out.detail += "runtime " + fmt(elapsed) + "s over limit " +
                          fmt(crit.time_limit_seconds) + "s";
        }
        std::printf("[%s] criterion %02d: %s (%.2fs) %s\n", out.pass ? "PASS" : "FAIL", crit.id,
                    crit.name, elapsed, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}

#pragma once

#include <cmath>
#include <span>

namespace haartv {

// Compensated accumulator (Kahan-Babuska/Neumaier variant, which also covers
// addends larger than the running sum). Summation order is part of the
// contract: callers that need run-to-run reproducibility must feed values in
// a fixed order (see tvlab's chunked reduction).
class KahanAccumulator {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            compensation_ += (sum_ - t) + x;
        else
            compensation_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
    KahanAccumulator acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

}  // namespace haartv

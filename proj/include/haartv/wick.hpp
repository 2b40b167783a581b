#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace haartv::wick {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kDefaultBudget = 100'000'000ULL;

struct TraceMomentQuery {
    int p = 1;
    int q = 1;
    int h = 1;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(unsigned long long required, unsigned long long budget)
        : std::runtime_error("enumeration budget exceeded: requires " + std::to_string(required) +
                             " tuples, budget " + std::to_string(budget)),
          required_tuples(required),
          budget_tuples(budget) {}

    unsigned long long required_tuples;
    unsigned long long budget_tuples;
};

// E[tr(X^T X)^h] for X a p x q iid standard Gaussian matrix, computed exactly
// by summing the Wick/Isserlis expectation of every index tuple in the trace
// expansion: each tuple contributes the product over distinct entries of
// (m-1)!! for even entry multiplicity m, and 0 if any multiplicity is odd.
BigInt exact_trace_moment(const TraceMomentQuery& query, std::uint64_t budget = kDefaultBudget,
                          int workers = 0);

// Cov(tr(X^T X)^h, tr(X^T X)^k), exactly, by enumerating tuple pairs and
// summing E[X_G X_K] - E[X_G] E[X_K].
BigInt exact_trace_covariance(int p, int q, int h, int k, std::uint64_t budget = kDefaultBudget,
                              int workers = 0);

// Number of (d, u) sequence pairs with r ones among the h down-edge slots and
// r minus-ones among the h-1 up-edge slots whose running sums stay >= 0.
// Brute force over all placements; equals the Narayana number N(h, r).
std::uint64_t count_valid_ballot_pairs(int h, int r);

}  // namespace haartv::wick

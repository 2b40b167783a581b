#include "haartv/wick.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <vector>

#include "haartv/parallel.hpp"

namespace haartv::wick {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr u128 kU128Max = ~static_cast<u128>(0);

u128 saturating_pow(u64 base, int exp) {
    u128 r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > kU128Max / base) return kU128Max;
        r *= base;
    }
    return r;
}

BigInt bigint_from_u128(u128 v) {
    BigInt hi = static_cast<u64>(v >> 64);
    return (hi << 64) + static_cast<u64>(v);
}

// (m-1)!! for even multiplicities m = 0, 2, ..., up to max_mult.
std::vector<u64> double_factorial_table_u64(int max_mult) {
    std::vector<u64> t(max_mult + 1, 0);
    t[0] = 1;
    u64 v = 1;
    for (int m = 2; m <= max_mult; m += 2) {
        v *= static_cast<u64>(m - 1);
        t[m] = v;
    }
    return t;
}

std::vector<BigInt> double_factorial_table_big(int max_mult) {
    std::vector<BigInt> t(max_mult + 1, 0);
    t[0] = 1;
    BigInt v = 1;
    for (int m = 2; m <= max_mult; m += 2) {
        v *= (m - 1);
        t[m] = v;
    }
    return t;
}

// Fits-in-u64 check for (2h-1)!!: true up to 2h = 34.
bool fast_path_ok(int total_edges) { return total_edges <= 34; }

// Odometer over the (i_1..i_h, j_1..j_h) tuple space; digits i are base p,
// digits j are base q, i-major flat order.
struct TupleOdometer {
    int p, q, h;
    std::vector<int> iv, jv;

    TupleOdometer(int p_, int q_, int h_, u64 start) : p(p_), q(q_), h(h_), iv(h_), jv(h_) {
        u64 t = start;
        for (int a = h - 1; a >= 0; --a) {
            jv[a] = static_cast<int>(t % q);
            t /= q;
        }
        for (int a = h - 1; a >= 0; --a) {
            iv[a] = static_cast<int>(t % p);
            t /= p;
        }
    }

    void advance() {
        for (int a = h - 1; a >= 0; --a) {
            if (++jv[a] < q) return;
            jv[a] = 0;
        }
        for (int a = h - 1; a >= 0; --a) {
            if (++iv[a] < p) return;
            iv[a] = 0;
        }
    }

    // Entry ids of the trace monomial x_{i1 j1} x_{i1 j2} x_{i2 j2} ... x_{ih j1},
    // sorted ascending. out must hold 2h ids.
    void edges_sorted(std::uint32_t* out) const {
        for (int a = 0; a < h; ++a) {
            out[2 * a] = static_cast<std::uint32_t>(iv[a]) * q + jv[a];
            out[2 * a + 1] = static_cast<std::uint32_t>(iv[a]) * q + jv[(a + 1) % h];
        }
        std::sort(out, out + 2 * h);
    }
};

template <typename Value, typename Table>
Value graph_expectation(const std::uint32_t* ids, int count, const Table& dfact) {
    Value prod = 1;
    int a = 0;
    while (a < count) {
        int b = a + 1;
        while (b < count && ids[b] == ids[a]) ++b;
        const int mult = b - a;
        if (mult & 1) return Value(0);
        prod *= dfact[mult];
        a = b;
    }
    return prod;
}

struct GraphList {
    int edges_per_graph = 0;
    std::size_t count = 0;
    std::vector<std::uint32_t> edges;  // count * edges_per_graph, each graph sorted
    std::vector<u64> value;            // E[X_G] (fast path)
    std::vector<BigInt> value_big;     // E[X_G] (slow path)
    std::vector<u64> mask_lo, mask_hi;
};

GraphList build_graph_list(int p, int q, int h, bool fast, const std::vector<u64>& dfact_u64,
                           const std::vector<BigInt>& dfact_big) {
    GraphList list;
    list.edges_per_graph = 2 * h;
    const u64 total = static_cast<u64>(saturating_pow(static_cast<u64>(p) * q, h));
    list.count = total;
    list.edges.resize(total * list.edges_per_graph);
    list.mask_lo.resize(total);
    list.mask_hi.resize(total);
    if (fast)
        list.value.resize(total);
    else
        list.value_big.resize(total);

    const bool maskable = static_cast<u64>(p) * q <= 128;
    TupleOdometer od(p, q, h, 0);
    for (u64 t = 0; t < total; ++t, od.advance()) {
        std::uint32_t* ids = &list.edges[t * list.edges_per_graph];
        od.edges_sorted(ids);
        u64 lo = 0, hi = 0;
        if (maskable) {
            for (int e = 0; e < list.edges_per_graph; ++e) {
                const std::uint32_t id = ids[e];
                if (id < 64)
                    lo |= (1ULL << id);
                else
                    hi |= (1ULL << (id - 64));
            }
        } else {
            lo = hi = ~0ULL;  // force the merge path
        }
        list.mask_lo[t] = lo;
        list.mask_hi[t] = hi;
        if (fast)
            list.value[t] = graph_expectation<u64>(ids, list.edges_per_graph, dfact_u64);
        else
            list.value_big[t] = graph_expectation<BigInt>(ids, list.edges_per_graph, dfact_big);
    }
    return list;
}

void validate_positive(int p, int q, int h) {
    if (p < 1 || q < 1 || h < 1)
        throw std::invalid_argument("wick oracle: p, q, h must be positive");
}

}  // namespace

BigInt exact_trace_moment(const TraceMomentQuery& query, std::uint64_t budget, int workers) {
    const int p = query.p, q = query.q, h = query.h;
    validate_positive(p, q, h);

    const u128 required = saturating_pow(static_cast<u64>(p) * q, h);
    if (required > budget)
        throw BudgetExceeded(required == kU128Max ? ~0ULL : static_cast<u64>(required), budget);
    const u64 total = static_cast<u64>(required);

    const bool fast = fast_path_ok(2 * h);
    const auto dfact_u64 = double_factorial_table_u64(fast ? 2 * h : 0);
    const auto dfact_big = double_factorial_table_big(2 * h);

    constexpr u64 kChunk = 1 << 16;
    const std::size_t chunk_count = static_cast<std::size_t>((total + kChunk - 1) / kChunk);
    std::vector<u128> partial_fast(fast ? chunk_count : 0, 0);
    std::vector<BigInt> partial_big(fast ? 0 : chunk_count, 0);

    run_chunked(chunk_count, workers, [&](std::size_t c) {
        const u64 begin = c * kChunk;
        const u64 end = std::min(total, begin + kChunk);
        TupleOdometer od(p, q, h, begin);
        std::vector<std::uint32_t> ids(2 * h);
        if (fast) {
            u128 acc = 0;
            for (u64 t = begin; t < end; ++t, od.advance()) {
                od.edges_sorted(ids.data());
                acc += graph_expectation<u64>(ids.data(), 2 * h, dfact_u64);
            }
            partial_fast[c] = acc;
        } else {
            BigInt acc = 0;
            for (u64 t = begin; t < end; ++t, od.advance()) {
                od.edges_sorted(ids.data());
                acc += graph_expectation<BigInt>(ids.data(), 2 * h, dfact_big);
            }
            partial_big[c] = acc;
        }
    });

    BigInt sum = 0;
    if (fast)
        for (const u128 v : partial_fast) sum += bigint_from_u128(v);
    else
        for (const BigInt& v : partial_big) sum += v;
    return sum;
}

BigInt exact_trace_covariance(int p, int q, int h, int k, std::uint64_t budget, int workers) {
    validate_positive(p, q, h);
    validate_positive(p, q, k);
    if (h > k) std::swap(h, k);  // Cov is symmetric in (h, k)

    const u128 tuples_g = saturating_pow(static_cast<u64>(p) * q, h);
    const u128 tuples_k = saturating_pow(static_cast<u64>(p) * q, k);
    u128 required = kU128Max;
    if (tuples_g != kU128Max && tuples_k != kU128Max && tuples_g <= kU128Max / tuples_k)
        required = tuples_g * tuples_k;
    if (required > budget)
        throw BudgetExceeded(required == kU128Max ? ~0ULL : static_cast<u64>(required), budget);

    constexpr u64 kMaxListEntries = 32'000'000;
    if (tuples_k > kMaxListEntries)
        throw BudgetExceeded(static_cast<u64>(required), budget);

    const bool fast = fast_path_ok(2 * (h + k));
    const auto dfact_u64 = double_factorial_table_u64(fast ? 2 * (h + k) : 0);
    const auto dfact_big = double_factorial_table_big(2 * (h + k));

    const GraphList gl = build_graph_list(p, q, h, fast, dfact_u64, dfact_big);
    const GraphList kl = build_graph_list(p, q, k, fast, dfact_u64, dfact_big);

    constexpr std::size_t kGChunk = 64;
    const std::size_t chunk_count = (gl.count + kGChunk - 1) / kGChunk;
    std::vector<u128> partial_fast(fast ? chunk_count : 0, 0);
    std::vector<BigInt> partial_big(fast ? 0 : chunk_count, 0);

    const int ge = gl.edges_per_graph;
    const int ke = kl.edges_per_graph;

    run_chunked(chunk_count, workers, [&](std::size_t c) {
        const std::size_t gbegin = c * kGChunk;
        const std::size_t gend = std::min(gl.count, gbegin + kGChunk);
        std::vector<std::uint32_t> merged(ge + ke);
        if (fast) {
            u128 acc = 0;
            for (std::size_t g = gbegin; g < gend; ++g) {
                const u64 glo = gl.mask_lo[g], ghi = gl.mask_hi[g];
                const std::uint32_t* gids = &gl.edges[g * ge];
                const u128 eg = gl.value[g];
                for (std::size_t t = 0; t < kl.count; ++t) {
                    if (((glo & kl.mask_lo[t]) | (ghi & kl.mask_hi[t])) == 0) continue;
                    // merge the two sorted id arrays, multiplying per-run moments
                    const std::uint32_t* a = gids;
                    const std::uint32_t* aend = gids + ge;
                    const std::uint32_t* b = &kl.edges[t * ke];
                    const std::uint32_t* bend = b + ke;
                    u64 prod = 1;
                    while (a < aend || b < bend) {
                        std::uint32_t id;
                        if (b == bend || (a < aend && *a <= *b))
                            id = *a;
                        else
                            id = *b;
                        int cnt = 0;
                        while (a < aend && *a == id) { ++a; ++cnt; }
                        while (b < bend && *b == id) { ++b; ++cnt; }
                        if (cnt & 1) { prod = 0; break; }
                        prod *= dfact_u64[cnt];
                    }
                    // E[X_G X_K] >= E[X_G] E[X_K] entrywise, so this is nonnegative.
                    acc += static_cast<u128>(prod) - eg * kl.value[t];
                }
            }
            partial_fast[c] = acc;
        } else {
            BigInt acc = 0;
            for (std::size_t g = gbegin; g < gend; ++g) {
                const u64 glo = gl.mask_lo[g], ghi = gl.mask_hi[g];
                const std::uint32_t* gids = &gl.edges[g * ge];
                const BigInt& eg = gl.value_big[g];
                for (std::size_t t = 0; t < kl.count; ++t) {
                    if (((glo & kl.mask_lo[t]) | (ghi & kl.mask_hi[t])) == 0) continue;
                    std::copy(gids, gids + ge, merged.begin());
                    std::copy(&kl.edges[t * ke], &kl.edges[t * ke] + ke, merged.begin() + ge);
                    std::inplace_merge(merged.begin(), merged.begin() + ge, merged.end());
                    acc += graph_expectation<BigInt>(merged.data(), ge + ke, dfact_big) -
                           eg * kl.value_big[t];
                }
            }
            partial_big[c] = acc;
        }
    });

    BigInt sum = 0;
    if (fast)
        for (const u128 v : partial_fast) sum += bigint_from_u128(v);
    else
        for (const BigInt& v : partial_big) sum += v;
    return sum;
}

std::uint64_t count_valid_ballot_pairs(int h, int r) {
    if (h < 1 || h > 14) throw std::invalid_argument("count_valid_ballot_pairs: need 1 <= h <= 14");
    if (r < 0 || r > h - 1) throw std::invalid_argument("count_valid_ballot_pairs: need 0 <= r <= h-1");

    // d masks: bit l <-> d_{l+1} = 1 (h slots). u masks: bit l <-> u_{l+2} = -1
    // (h-1 slots; u_1 is always 0).
    std::vector<std::uint32_t> d_masks, u_masks;
    for (std::uint32_t m = 0; m < (1u << h); ++m)
        if (std::popcount(m) == r) d_masks.push_back(m);
    for (std::uint32_t m = 0; m < (1u << (h - 1)); ++m)
        if (std::popcount(m) == r) u_masks.push_back(m);

    std::uint64_t valid = 0;
    for (const std::uint32_t dm : d_masks) {
        for (const std::uint32_t um : u_masks) {
            int running = 0;
            bool ok = true;
            // prefix at step l (2..h): d_1..d_{l-1} and u_2..u_l
            for (int l = 2; l <= h; ++l) {
                running += (dm >> (l - 2)) & 1u;
                running -= (um >> (l - 2)) & 1u;
                if (running < 0) {
                    ok = false;
                    break;
                }
            }
            if (ok) ++valid;
        }
    }
    return valid;
}

}  // namespace haartv::wick

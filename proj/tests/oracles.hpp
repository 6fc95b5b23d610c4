#pragma once

// Plain, slow, independent reimplementations used to check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;

inline std::vector<u64> divisors(u64 n) {
    std::vector<u64> out;
    for (u64 d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        out.push_back(d);
        if (d * d != n) out.push_back(n / d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::map<u64, unsigned> factor(u64 n) {
    std::map<u64, unsigned> f;
    for (u64 p = 2; p * p <= n; ++p)
        while (n % p == 0) {
            ++f[p];
            n /= p;
        }
    if (n > 1) ++f[n];
    return f;
}

inline unsigned big_omega(u64 n) {
    unsigned s = 0;
    for (auto& [p, e] : factor(n)) s += e;
    return s;
}

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

// Maximal elements of {d | n : d <= x} under divisibility, by pairwise filtering.
inline std::vector<u64> maximal(u64 n, u64 x) {
    std::vector<u64> below;
    for (u64 d : divisors(n))
        if (d <= x) below.push_back(d);
    std::vector<u64> out;
    for (u64 d : below) {
        bool dominated = false;
        for (u64 e : below)
            if (e != d && e % d == 0) {
                dominated = true;
                break;
            }
        if (!dominated) out.push_back(d);
    }
    return out;
}

inline u64 count_omega(u64 n, unsigned k) {
    u64 c = 0;
    for (u64 d : divisors(n)) c += big_omega(d) == k;
    return c;
}

inline unsigned max_omega_below(u64 n, u64 x, bool strict) {
    unsigned best = 0;
    for (u64 d : divisors(n))
        if (strict ? d < x : d <= x) best = std::max(best, big_omega(d));
    return best;
}

inline u64 count_up_to(u64 n, u64 x) {
    u64 c = 0;
    for (u64 d : divisors(n)) c += d <= x;
    return c;
}

inline const std::vector<u64>& small_primes() {
    static const std::vector<u64> primes = [] {
        std::vector<u64> v;
        for (u64 p = 2; p < 400; ++p)
            if (is_prime(p)) v.push_back(p);
        return v;
    }();
    return primes;
}

// Def. of reduced numbers written with logarithms (distinct primes never tie)
// and the 2-adic cap checked against every zero-exponent prime up to 400.
inline bool is_reduced_map(const std::map<u64, unsigned>& f) {
    const auto& primes = small_primes();
    for (auto& [p, e] : f)
        if (p >= 400) return false;
    auto a = [&](u64 p) -> unsigned {
        auto it = f.find(p);
        return it == f.end() ? 0u : it->second;
    };
    for (u64 pi : primes) {
        if (pi == 2 || a(pi) == 0) continue;  // c = 0 otherwise
        for (u64 pj : primes) {
            if (pj == 2 || pj == pi) continue;
            const unsigned c = (a(pi) + 1) / (a(pj) + 2);
            if (!(static_cast<long double>(c) < std::log(static_cast<long double>(pj)) / std::log(static_cast<long double>(pi))))
                return false;
        }
    }
    const unsigned a1 = a(2);
    for (u64 pj : primes) {
        if (pj == 2 || a(pj) != 0) continue;
        const unsigned __int128 lhs = static_cast<unsigned __int128>(1) << a1;
        if (!(lhs < static_cast<unsigned __int128>(8) * pj * pj)) return false;
    }
    return true;
}

inline bool is_reduced(u64 n) { return n != 0 && is_reduced_map(factor(n)); }

// Counts reduced n <= limit among all 2^a * (odd part supported on 3, 5, ..., p_k),
// with arbitrary exponents. A reduced number cannot skip an odd prime (c >= 1
// forces the skipped prime to be larger), so this covers every candidate.
inline u64 count_reduced_by_support(unsigned __int128 limit) {
    const auto& primes = small_primes();
    u64 count = 0;
    std::map<u64, unsigned> f;
    auto with_twos = [&](unsigned __int128 odd) {
        unsigned a = 0;
        for (unsigned __int128 v = odd; v <= limit; v *= 2, ++a) {
            if (a) f[2] = a;
            count += is_reduced_map(f);
        }
        f.erase(2);
    };
    auto dfs = [&](auto&& self, std::size_t idx, unsigned __int128 odd) -> void {
        with_twos(odd);
        const u64 p = primes[idx];
        unsigned __int128 v = odd;
        for (unsigned e = 1;; ++e) {
            if (v > limit / p) break;
            v *= p;
            f[p] = e;
            self(self, idx + 1, v);
        }
        f.erase(p);
    };
    dfs(dfs, 1, 1);
    return count;
}

}  // namespace oracle

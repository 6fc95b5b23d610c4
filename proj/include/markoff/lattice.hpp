#pragma once

// Integer-type-generic divisor lattice kernels. U is std::uint64_t,
// unsigned __int128 or BigNat; callers pick the narrowest type that holds n.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "markoff/arith.hpp"

namespace mkf::lattice {

using u128 = unsigned __int128;

template <class U>
U from_big(const BigNat& v) {
    if constexpr (std::is_same_v<U, BigNat>) {
        return v;
    } else {
        std::uint64_t w[2] = {0, 0};
        mpz_export(w, nullptr, -1, sizeof(std::uint64_t), 0, 0, v.get_mpz_t());
        if constexpr (std::is_same_v<U, std::uint64_t>)
            return w[0];
        else
            return (static_cast<u128>(w[1]) << 64) | w[0];
    }
}

template <class U>
BigNat to_big(const U& v) {
    if constexpr (std::is_same_v<U, BigNat>) {
        return v;
    } else {
        std::uint64_t w[2] = {static_cast<std::uint64_t>(v), 0};
        if constexpr (std::is_same_v<U, u128>) w[1] = static_cast<std::uint64_t>(v >> 64);
        BigNat r;
        mpz_import(r.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, w);
        return r;
    }
}

// Bit length that selects the kernel type; thresholds d*lambda(n/d) never exceed n.
inline int width_class(const BigNat& n) {
    const auto bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    if (bits <= 63) return 64;
    if (bits <= 127) return 128;
    return 0;
}

template <class U>
struct Lattice {
    std::vector<U> primes;      // ascending
    std::vector<unsigned> exps;

    static Lattice from(const Factorization& f) {
        Lattice l;
        for (auto& x : f.factors()) {
            l.primes.push_back(from_big<U>(x.p));
            l.exps.push_back(x.e);
        }
        return l;
    }

    std::uint64_t tau() const {
        std::uint64_t t = 1;
        for (auto e : exps) t *= e + 1;
        return t;
    }
};

// Every divisor with its threshold d*lambda(n/d); the threshold of n itself is
// reported as 0 (meaning "never").
template <class U>
void divisors_with_thresholds(const Lattice<U>& L, std::vector<U>& vals, std::vector<U>& thr) {
    vals.assign(1, U(1));
    std::vector<std::size_t> first_short;  // index of least prime whose exponent is below full
    const std::size_t w = L.primes.size();
    first_short.assign(1, 0);
    // Build in order of primes from largest to smallest so that the least
    // deficient prime can be tracked incrementally.
    for (std::size_t ii = w; ii-- > 0;) {
        const std::size_t cur = vals.size();
        std::vector<std::size_t> fs;
        fs.reserve(cur * (L.exps[ii] + 1));
        std::vector<U> nv;
        nv.reserve(cur * (L.exps[ii] + 1));
        for (std::size_t j = 0; j < cur; ++j) {
            U v = vals[j];
            for (unsigned e = 0; e <= L.exps[ii]; ++e) {
                nv.push_back(v);
                fs.push_back(e < L.exps[ii] ? ii : first_short[j]);
                if (e < L.exps[ii]) v = v * L.primes[ii];
            }
        }
        vals.swap(nv);
        first_short.swap(fs);
    }
    thr.resize(vals.size());
    const U n = [&] {
        U r(1);
        for (std::size_t i = 0; i < w; ++i)
            for (unsigned e = 0; e < L.exps[i]; ++e) r = r * L.primes[i];
        return r;
    }();
    for (std::size_t j = 0; j < vals.size(); ++j) {
        if (vals[j] == n)
            thr[j] = U(0);
        else
            thr[j] = vals[j] * L.primes[first_short[j]];
    }
}

// |M_x(n)| for arbitrary x by two binary searches: #{d <= x} - #{d*lambda <= x}.
template <class U>
struct ProfileTable {
    std::vector<U> vals;  // sorted divisors
    std::vector<U> thr;   // sorted finite thresholds

    static ProfileTable build(const Lattice<U>& L) {
        ProfileTable t;
        std::vector<U> th;
        divisors_with_thresholds(L, t.vals, th);
        for (auto& v : th)
            if (!(v == U(0))) t.thr.push_back(v);
        std::sort(t.vals.begin(), t.vals.end());
        std::sort(t.thr.begin(), t.thr.end());
        return t;
    }

    std::uint64_t count_upto(const U& x) const {
        return static_cast<std::uint64_t>(std::upper_bound(vals.begin(), vals.end(), x) - vals.begin());
    }

    std::uint64_t maximal_count(const U& x) const {
        const auto a = std::upper_bound(vals.begin(), vals.end(), x) - vals.begin();
        const auto b = std::upper_bound(thr.begin(), thr.end(), x) - thr.begin();
        return static_cast<std::uint64_t>(a - b);
    }
};

template <class U>
std::uint64_t count_upto_dfs(const Lattice<U>& L, const U& x, std::size_t i, const U& cur) {
    if (i == L.primes.size()) return 1;
    std::uint64_t total = 0;
    U v = cur;
    for (unsigned e = 0; e <= L.exps[i]; ++e) {
        total += count_upto_dfs(L, x, i + 1, v);
        if (e == L.exps[i]) break;
        if (x / L.primes[i] < v) break;
        v = v * L.primes[i];
    }
    return total;
}

}  // namespace mkf::lattice

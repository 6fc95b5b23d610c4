#include "markoff/connectivity.hpp"

namespace mkf {

namespace {

Factorization factor_spf(std::uint64_t n, const std::vector<std::uint32_t>& spf) {
    std::vector<PrimePower> pp;
    while (n > 1) {
        const std::uint32_t q = spf[n];
        unsigned e = 0;
        while (n % q == 0) {
            n /= q;
            ++e;
        }
        pp.push_back({BigNat(static_cast<unsigned long>(q)), e});
    }
    return Factorization::from_pairs(std::move(pp));
}

}  // namespace

PrimeSweep sweep_primes(std::uint64_t lo, std::uint64_t hi, const TestOptions& opt, bool parallel) {
    if (hi >= (std::uint64_t{1} << 32) - 2) throw std::invalid_argument("sweep_primes: hi must be below 2^32 - 2");
    PrimeSweep out;
    if (hi < 3 || lo > hi) return out;
    const std::uint64_t top = hi + 1;
    std::vector<std::uint32_t> spf(top + 1, 0);
    for (std::uint64_t i = 2; i <= top; ++i) {
        if (spf[i]) continue;
        for (std::uint64_t j = i; j <= top; j += i)
            if (!spf[j]) spf[j] = static_cast<std::uint32_t>(i);
    }
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p = std::max<std::uint64_t>(lo, 3); p <= hi; ++p)
        if (spf[p] == p) primes.push_back(p);
    out.primes_tested = primes.size();

    std::vector<char> ok(primes.size(), 0);
    auto one = [&](std::size_t i) {
        const std::uint64_t p = primes[i];
        const auto v = test_prime(BigNat(static_cast<unsigned long>(p)), factor_spf(p - 1, spf), factor_spf(p + 1, spf), opt);
        ok[i] = v.outcome == Outcome::Connected;
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 256)
        for (std::size_t i = 0; i < primes.size(); ++i) one(i);
    } else {
        for (std::size_t i = 0; i < primes.size(); ++i) one(i);
    }
    for (std::size_t i = 0; i < primes.size(); ++i)
        if (ok[i]) out.connected.push_back(primes[i]);
    return out;
}

}  // namespace mkf

#include <gmpxx.h>

#include "markoff/cli.hpp"

namespace mkf {

BigNat next_prime(const BigNat& n) {
    BigNat c = n + 1;
    if (c <= 2) return 2;
    if (mpz_even_p(c.get_mpz_t())) ++c;
    while (!is_prime(c)) c += 2;
    return c;
}

TableRow run_table(const TableRequest& req, const FactorCache* cache) {
    if (req.m == 0) throw std::invalid_argument("sample count must be positive");
    BigNat lo, hi;
    mpz_ui_pow_ui(lo.get_mpz_t(), 10, req.n);
    mpz_ui_pow_ui(hi.get_mpz_t(), 10, req.n + 1);

    std::vector<BigNat> primes(req.m);
    if (req.mode == SampleMode::Consecutive) {
        BigNat p = lo;
        for (auto& q : primes) q = p = next_prime(p);
    } else {
        gmp_randclass rng(gmp_randinit_mt);
        rng.seed(static_cast<unsigned long>(req.seed));
        const BigNat width = hi - lo - 1;
        std::vector<BigNat> draws(req.m);
        for (auto& d : draws) d = lo + 1 + BigNat(rng.get_z_range(width));  // uniform in (lo, hi)
        if (req.parallel) {
#pragma omp parallel for schedule(dynamic, 4)
            for (std::size_t i = 0; i < draws.size(); ++i) primes[i] = next_prime(draws[i]);
        } else {
            for (std::size_t i = 0; i < draws.size(); ++i) primes[i] = next_prime(draws[i]);
        }
    }

    TableRow row;
    row.n = req.n;
    row.primes.resize(req.m);
    auto one = [&](std::size_t i) {
        auto& rec = row.primes[i];
        rec.p = primes[i];
        try {
            const auto fm = factorize(rec.p - 1, req.policy, cache);
            const auto fp = factorize(rec.p + 1, req.policy, cache);
            rec.connected = test_prime(rec.p, fm, fp, req.test).outcome == Outcome::Connected;
        } catch (const BudgetExceeded&) {
            rec.excluded = true;
        } catch (const CapExceeded&) {
            rec.excluded = true;
        }
    };
    if (req.parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::size_t i = 0; i < primes.size(); ++i) one(i);
    } else {
        for (std::size_t i = 0; i < primes.size(); ++i) one(i);
    }
    for (auto& r : row.primes) {
        if (r.excluded) {
            ++row.excluded_unfactorable;
            continue;
        }
        ++row.tested;
        row.connected += r.connected;
    }
    row.percentage = row.tested ? 100.0 * double(row.connected) / double(row.tested) : 0.0;
    return row;
}

}  // namespace mkf

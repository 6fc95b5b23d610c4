#include "properties.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "markoff/divisors.hpp"
#include "markoff/reduction.hpp"
#include "oracles.hpp"

namespace props {

namespace {

using mkf::BigNat;
using mkf::Factorization;
using u64 = std::uint64_t;

BigNat big(u64 v) { return BigNat(static_cast<unsigned long>(v)); }

std::vector<u64> values(const mkf::MaximalDivisorSet& s) {
    std::vector<u64> v;
    for (auto& h : s.members) v.push_back(h.value.get_ui());
    std::sort(v.begin(), v.end());
    return v;
}

std::string tag(u64 n, u64 x) { return "n=" + std::to_string(n) + " x=" + std::to_string(x); }

void check_maximal(Result& r, u64 n, u64 x) {
    const auto f = mkf::factorize_u64(n);
    const auto got = values(mkf::maximal_divisors(f, big(x)));
    const auto want = oracle::maximal(n, x);
    ++r.checked;
    if (got != want) return r.fail("maximal set " + tag(n, x));
    if (mkf::maximal_count(f, big(x)) != want.size()) return r.fail("profile count " + tag(n, x));
    for (u64 a : got)
        for (u64 b : got)
            if (a != b && b % a == 0) return r.fail("antichain " + tag(n, x));
    for (u64 d : oracle::divisors(n)) {
        if (d > x) continue;
        if (std::none_of(got.begin(), got.end(), [d](u64 m) { return m % d == 0; })) return r.fail("covering " + tag(n, x));
    }
}

u64 maximal_size(u64 n, u64 x) { return oracle::maximal(n, x).size(); }

}  // namespace

Result maximal_divisors_oracle(u64 exhaustive_to, unsigned samples, u64 seed) {
    Result r{"maximal divisors: oracle, antichain, covering (exhaustive)"};
    std::mt19937_64 rng(seed);
    for (u64 n = 1; n <= exhaustive_to; ++n) {
        check_maximal(r, n, n);
        for (unsigned s = 0; s < samples; ++s) check_maximal(r, n, 1 + rng() % n);
    }
    // The profile must agree with per-threshold counts at every divisor.
    for (u64 n = 1; n <= std::min<u64>(exhaustive_to, 2000); ++n) {
        for (auto& e : mkf::maximal_divisor_profile(mkf::factorize_u64(n))) {
            ++r.checked;
            if (e.count != maximal_size(n, e.d.get_ui())) r.fail("profile " + tag(n, e.d.get_ui()));
        }
    }
    return r;
}

Result maximal_divisors_random(u64 random_to, unsigned count, unsigned samples, u64 seed) {
    Result r{"maximal divisors: oracle, antichain, covering (random)"};
    std::mt19937_64 rng(seed);
    for (unsigned i = 0; i < count; ++i) {
        const u64 n = 1 + rng() % random_to;
        for (unsigned s = 0; s < samples; ++s) check_maximal(r, n, 1 + rng() % n);
    }
    return r;
}

Result omega_layers(u64 from, u64 to, unsigned samples, u64 seed, bool brute_ck) {
    Result r{"C_k: oracle, sum = tau, unimodality, chain bound"};
    std::mt19937_64 rng(seed);
    for (u64 n = std::max<u64>(from, 1); n <= to; ++n) {
        const auto f = mkf::factorize_u64(n);
        const auto c = mkf::omega_polynomial(f);
        const unsigned om = f.omega_big();
        ++r.checked;
        BigNat sum = 0;
        for (auto& x : c) sum += x;
        if (sum != mkf::tau_phi(f).tau) r.fail("sum != tau at n=" + std::to_string(n));
        for (unsigned k = 1; k <= om; ++k) {
            if (2 * k <= om && c[k - 1] > c[k]) r.fail("not increasing at n=" + std::to_string(n));
            if (2 * (k - 1) >= om && c[k - 1] < c[k]) r.fail("not decreasing at n=" + std::to_string(n));
        }
        if (brute_ck)
            for (unsigned k = 0; k <= om; ++k)
                if (c[k] != big(oracle::count_omega(n, k))) r.fail("C_k oracle at n=" + std::to_string(n));
        for (unsigned s = 0; s < samples; ++s) {
            const u64 x = 1 + rng() % n;
            const auto mem = oracle::maximal(n, x);
            unsigned lo = ~0u, hi = 0;
            for (u64 d : mem) {
                lo = std::min(lo, oracle::big_omega(d));
                hi = std::max(hi, oracle::big_omega(d));
            }
            const unsigned k = std::clamp(om / 2, lo, hi);
            if (big(mem.size()) > c[k]) r.fail("chain bound " + tag(n, x));
        }
    }
    return r;
}

Result omega_below_and_counts(u64 to, unsigned samples, u64 seed) {
    Result r{"max Omega below x and divisor counts up to x"};
    std::mt19937_64 rng(seed);
    for (u64 n = 1; n <= to; ++n) {
        const auto f = mkf::factorize_u64(n);
        for (unsigned s = 0; s < samples; ++s) {
            const u64 x = 1 + rng() % (2 * n);
            ++r.checked;
            for (bool strict : {true, false})
                if (mkf::max_omega_below(f, big(x), strict) != oracle::max_omega_below(n, x, strict))
                    r.fail("max_omega_below " + tag(n, x));
            if (mkf::count_divisors_up_to(f, big(x)) != big(oracle::count_up_to(n, x))) r.fail("count_up_to " + tag(n, x));
        }
    }
    return r;
}

Result injection_bound(u64 to, unsigned samples, u64 seed) {
    Result r{"injection bound |M_x(n)| <= |M_x(2^a m')| and <= |M_x(m)|"};
    std::mt19937_64 rng(seed);
    for (u64 n = 2; n <= to; ++n) {
        const auto tr = mkf::reduce_to_reduced(mkf::factorize_u64(n));
        BigNat oddv = 1;
        for (auto& x : tr.moved.factors())
            if (x.p != 2) {
                for (unsigned e = 0; e < x.e; ++e) oddv *= x.p;
            }
        BigNat v = oddv;
        mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), tr.two_power);
        const u64 v64 = v.get_ui(), m64 = tr.m.value.get_ui();
        for (unsigned s = 0; s < samples; ++s) {
            const u64 x = 1 + rng() % n;
            ++r.checked;
            const u64 mn = maximal_size(n, x);
            if (mn > maximal_size(v64, x)) r.fail("2^a m' " + tag(n, x));
            if (mn > maximal_size(m64, x)) r.fail("reduced m " + tag(n, x));
        }
    }
    return r;
}

Result reduction_bounds(u64 to) {
    Result r{"reduce_to_reduced: reduced, n <= m <= 4n-6, composite map verifies"};
    for (u64 n = 2; n <= to; ++n) {
        const auto tr = mkf::reduce_to_reduced(mkf::factorize_u64(n));
        ++r.checked;
        const BigNat& m = tr.m.value;
        if (!(big(n) <= m && m <= 4 * big(n) - 6)) r.fail("bounds at n=" + std::to_string(n));
        if (!mkf::is_reduced(tr.m.factorization())) r.fail("not reduced at n=" + std::to_string(n));
        if (!oracle::is_reduced(m.get_ui())) r.fail("oracle rejects m at n=" + std::to_string(n));
        const auto chk = mkf::verify_reducing(tr.moves);
        if (!chk.ok) r.fail("moves fail clause " + std::string(1, chk.clause) + " at n=" + std::to_string(n));
    }
    return r;
}

Result reducing_constructors(unsigned trials, u64 seed) {
    Result r{"reducing-function constructors verify"};
    std::mt19937_64 rng(seed);
    const std::vector<unsigned> odd = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
    auto pick = [&](const std::vector<unsigned>& v) { return v[rng() % v.size()]; };
    auto expect_ok = [&](const mkf::ReducingFunctionSpec& f) {
        ++r.checked;
        const auto c = mkf::verify_reducing(f);
        if (!c.ok) r.fail(f.name + " fails clause " + std::string(1, c.clause) + " at d=" + c.d.get_str());
    };
    for (unsigned t = 0; t < trials; ++t) {
        // Prime swap q^a -> p^a.
        unsigned p = pick(odd), q = pick(odd);
        if (p > q) std::swap(p, q);
        const unsigned a = 1 + rng() % 6;
        const auto swap = mkf::make_prime_swap(big(q), big(p), a);
        expect_ok(swap);

        // Exponent shift p^a q^b -> p^(a-c) q^(b+1).
        unsigned sp = pick(odd), sq = pick(odd);
        while (sq == sp) sq = pick(odd);
        const unsigned sa = 1 + rng() % 8, sb = rng() % 4;
        const unsigned c = (sa + 1) / (sb + 2);
        BigNat pc = 1;
        for (unsigned i = 0; i < c; ++i) pc *= sp;
        try {
            const auto sh = mkf::make_exponent_shift(big(sp), big(sq), sa, sb);
            if (!(big(sq) < pc)) r.fail("shift accepted without q < p^c");
            expect_ok(sh);
        } catch (const mkf::PreconditionViolated&) {
            ++r.checked;
            if (big(sq) < pc) r.fail("shift rejected although q < p^c");
        }

        // 2-adic map p^a -> p^b q_1...q_k.
        const unsigned k = rng() % 4;
        std::vector<BigNat> qs;
        std::set<unsigned> used;
        while (used.size() < k) used.insert(pick(odd));
        for (unsigned x : used) qs.push_back(big(x));
        const unsigned ta = 2 + rng() % 18;
        BigNat need = 1;
        for (std::size_t i = 0; i < qs.size(); ++i) need *= qs[i];
        if (!qs.empty()) need *= qs.back();
        BigNat have;
        mpz_ui_pow_ui(have.get_mpz_t(), 2, ta - 2);
        if (qs.empty()) have = need + 1;  // k = 0 is the identity
        try {
            const auto ad = mkf::make_two_adic(2, qs, ta);
            if (!(have > need)) r.fail("2-adic accepted without precondition");
            expect_ok(ad);
        } catch (const mkf::PreconditionViolated&) {
            ++r.checked;
            if (have > need) r.fail("2-adic rejected although precondition holds");
        }

        // Product of a swap with an identity on a coprime part, and with a 2-adic map.
        std::vector<mkf::PrimePower> rest;
        for (unsigned x : odd)
            if (x != p && x != q && rng() % 3 == 0) rest.push_back({big(x), 1 + unsigned(rng() % 2)});
        const auto id = mkf::identity_reducing(Factorization::from_pairs(rest));
        expect_ok(mkf::product_reducing(swap, id));
        if (ta >= 4) {
            const auto ad = mkf::make_two_adic(2, {}, ta);
            expect_ok(mkf::product_reducing(ad, swap));
        }

        // Composition along a chain of swaps r^a -> q^a -> p^a.
        std::vector<unsigned> three = {pick(odd), pick(odd), pick(odd)};
        std::sort(three.begin(), three.end());
        const auto f1 = mkf::make_prime_swap(big(three[2]), big(three[1]), a);
        const auto f2 = mkf::make_prime_swap(big(three[1]), big(three[0]), a);
        expect_ok(mkf::compose_reducing(f1, f2));
    }
    return r;
}

Result reduced_enumeration(u64 to) {
    Result r{"reduced numbers: oracle, monotone exponents, extension closure"};
    const auto got = mkf::enumerate_reduced(big(to));
    std::vector<u64> want;
    for (u64 n = 1; n <= to; ++n)
        if (oracle::is_reduced(n)) want.push_back(n);
    std::vector<u64> have;
    for (auto& x : got) have.push_back(x.value.get_ui());
    ++r.checked;
    if (have != want)
        r.fail("enumeration differs from oracle: " + std::to_string(have.size()) + " vs " + std::to_string(want.size()));
    for (auto& x : got) {
        ++r.checked;
        for (std::size_t i = 2; i < x.exps.size(); ++i)
            if (x.exps[i] > x.exps[i - 1]) r.fail("exponents increase at " + x.value.get_str());
        // Append the next prime p_{k+1}.
        const std::size_t k = x.exps.size();
        if (k == 0) continue;
        const auto& pr = mkf::first_primes(k + 1);
        auto ext = x.exps;
        ext.push_back(1);
        if (!mkf::is_reduced_exponents(ext)) r.fail("extension not reduced at " + x.value.get_str() + "*" + std::to_string(pr[k]));
    }
    return r;
}

}  // namespace props

#include "markoff/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace mkf {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

bool mr_round_u64(u64 n, u64 a, u64 d, unsigned s) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned r = 1; r < s; ++r) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

bool fits_u64(const BigNat& n) { return mpz_sizeinbase(n.get_mpz_t(), 2) <= 64; }

u64 to_u64(const BigNat& n) {
    u64 v = 0;
    mpz_export(&v, nullptr, -1, sizeof v, 0, 0, n.get_mpz_t());
    return v;
}

BigNat from_u64(u64 v) {
    BigNat r;
    mpz_import(r.get_mpz_t(), 1, -1, sizeof v, 0, 0, &v);
    return r;
}

bool mr_round_big(const BigNat& n, const BigNat& a, const BigNat& d, unsigned s) {
    BigNat x;
    const BigNat nm1 = n - 1;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) return true;
    for (unsigned r = 1; r < s; ++r) {
        x = x * x % n;
        if (x == nm1) return true;
    }
    return false;
}

// Product of the odd primes below 1000, for a cheap gcd prefilter.
const BigNat& small_prime_product() {
    static const BigNat prod = [] {
        BigNat p = 1;
        for (auto q : primes_up_to(1000))
            if (q > 2) p *= q;
        return p;
    }();
    return prod;
}

u64 gcd_u64(u64 a, u64 b) { return std::gcd(a, b); }

// Brent's variant; returns a nontrivial factor of the odd composite n or 0.
u64 rho_u64(u64 n, u64 c, u64& budget) {
    u64 y = 2, x = 2, q = 1, g = 1, ys = 2;
    u64 r = 1;
    const u64 m = 128;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    do {
        x = y;
        for (u64 i = 0; i < r; ++i) y = f(y);
        u64 k = 0;
        do {
            ys = y;
            for (u64 i = 0; i < std::min(m, r - k); ++i) {
                y = f(y);
                q = mulmod(q, x > y ? x - y : y - x, n);
            }
            g = gcd_u64(q, n);
            k += m;
            if (budget <= m) {
                budget = 0;
                if (g == 1) return 0;
            } else {
                budget -= m;
            }
        } while (k < r && g == 1);
        r <<= 1;
    } while (g == 1);
    if (g == n) {
        do {
            ys = f(ys);
            g = gcd_u64(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g == n ? 0 : g;
}

BigNat rho_big(const BigNat& n, unsigned long c, u64& budget) {
    BigNat y = 2, x = 2, q = 1, g = 1, ys = 2, t;
    u64 r = 1;
    const u64 m = 128;
    auto f = [&](BigNat& v) {
        v = v * v + c;
        mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    do {
        x = y;
        for (u64 i = 0; i < r; ++i) f(y);
        u64 k = 0;
        do {
            ys = y;
            for (u64 i = 0; i < std::min(m, r - k); ++i) {
                f(y);
                t = x - y;
                q = q * t;
                mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
            mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            k += m;
            if (budget <= m) {
                budget = 0;
                if (g == 1) return 0;
            } else {
                budget -= m;
            }
        } while (k < r && g == 1);
        r <<= 1;
    } while (g == 1);
    if (g == n) {
        do {
            f(ys);
            t = x - ys;
            mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
        } while (g == 1);
    }
    return g == n ? BigNat(0) : g;
}

void split(const BigNat& n, std::map<BigNat, unsigned>& out, u64& budget) {
    if (n == 1) return;
    if (is_prime(n)) {
        out[n] += 1;
        return;
    }
    BigNat d = 0;
    for (unsigned long c = 1; d == 0; ++c) {
        if (budget == 0) throw BudgetExceeded(n.get_str());
        if (fits_u64(n)) {
            u64 g = rho_u64(to_u64(n), c, budget);
            if (g) d = from_u64(g);
        } else {
            d = rho_big(n, c, budget);
        }
        if (d == 0 && budget == 0) throw BudgetExceeded(n.get_str());
    }
    split(d, out, budget);
    split(BigNat(n / d), out, budget);
}

// Grows monotonically; the returned list covers at least [2, n].
const std::vector<std::uint32_t>& cached_primes(std::uint32_t n) {
    static std::mutex mu;
    static std::vector<std::uint32_t> list;
    static std::uint32_t covered = 0;
    std::lock_guard lock(mu);
    if (covered < n) {
        list = primes_up_to(n);
        covered = n;
    }
    return list;
}

}  // namespace

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    if (n < 37 * 37) return true;
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : small) {
        if (!mr_round_u64(n, a, d, s)) return false;
    }
    return true;
}

Primality primality(const BigNat& n) {
    if (n < 2) return Primality::Composite;
    if (fits_u64(n)) return is_prime_u64(to_u64(n)) ? Primality::Prime : Primality::Composite;
    if (mpz_even_p(n.get_mpz_t())) return Primality::Composite;
    BigNat g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), small_prime_product().get_mpz_t());
    if (g != 1) return Primality::Composite;

    BigNat d = n - 1;
    unsigned s = static_cast<unsigned>(mpz_scan1(d.get_mpz_t(), 0));
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    if (!mr_round_big(n, 2, d, s)) return Primality::Composite;

    // Bases depend only on n, so the verdict is reproducible.
    std::mt19937_64 rng(mpz_get_ui(n.get_mpz_t()) ^ 0x9e3779b97f4a7c15ULL);
    const BigNat span = n - 3;
    BigNat a;
    for (int round = 0; round < 64; ++round) {
        u64 words[2] = {rng(), rng()};
        mpz_import(a.get_mpz_t(), 2, -1, sizeof(u64), 0, 0, words);
        a = a % span + 2;
        if (!mr_round_big(n, a, d, s)) return Primality::Composite;
    }
    return Primality::ProbablePrime;
}

bool is_prime(const BigNat& n) { return primality(n) != Primality::Composite; }

Factorization Factorization::from_pairs(std::vector<PrimePower> pp) {
    std::sort(pp.begin(), pp.end(), [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
    Factorization f;
    for (auto& x : pp) {
        if (x.e == 0) continue;
        if (!f.f_.empty() && f.f_.back().p == x.p)
            f.f_.back().e += x.e;
        else
            f.f_.push_back(x);
    }
    f.value_ = 1;
    BigNat t;
    for (auto& x : f.f_) {
        mpz_pow_ui(t.get_mpz_t(), x.p.get_mpz_t(), x.e);
        f.value_ *= t;
    }
    return f;
}

Factorization Factorization::from_exponents(const std::vector<u64>& primes, const std::vector<unsigned>& exps) {
    std::vector<PrimePower> pp;
    for (std::size_t i = 0; i < primes.size() && i < exps.size(); ++i)
        if (exps[i]) pp.push_back({from_u64(primes[i]), exps[i]});
    return from_pairs(std::move(pp));
}

unsigned Factorization::omega_big() const {
    unsigned s = 0;
    for (auto& x : f_) s += x.e;
    return s;
}

unsigned Factorization::exponent_of(const BigNat& p) const {
    for (auto& x : f_)
        if (x.p == p) return x.e;
    return 0;
}

bool Factorization::valid() const {
    BigNat prod = 1, t;
    for (std::size_t i = 0; i < f_.size(); ++i) {
        if (f_[i].e == 0) return false;
        if (i && !(f_[i - 1].p < f_[i].p)) return false;
        if (!is_prime(f_[i].p)) return false;
        mpz_pow_ui(t.get_mpz_t(), f_[i].p.get_mpz_t(), f_[i].e);
        prod *= t;
    }
    return prod == value_;
}

std::string Factorization::str() const {
    if (f_.empty()) return "1";
    std::ostringstream os;
    for (std::size_t i = 0; i < f_.size(); ++i) {
        if (i) os << '*';
        os << f_[i].p.get_str();
        if (f_[i].e > 1) os << '^' << f_[i].e;
    }
    return os.str();
}

Factorization factorize_u64(u64 n) {
    std::vector<PrimePower> pp;
    for (u64 p : {2ULL, 3ULL, 5ULL}) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) pp.push_back({from_u64(p), e});
    }
    static constexpr u64 wheel[] = {4, 2, 4, 2, 4, 6, 2, 6};
    u64 p = 7;
    for (unsigned i = 0; p <= 1'000'000 && p * p <= n; p += wheel[i++ & 7]) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) pp.push_back({from_u64(p), e});
    }
    if (n > 1) {
        std::map<BigNat, unsigned> rest;
        u64 budget = ~0ULL;
        split(from_u64(n), rest, budget);
        for (auto& [q, e] : rest) pp.push_back({q, e});
    }
    return Factorization::from_pairs(std::move(pp));
}

Factorization factorize(const BigNat& n, const FactorPolicy& policy, const FactorCache* cache) {
    if (n < 1) throw std::invalid_argument("factorize: n must be positive");
    if (cache) {
        if (auto hit = cache->find(n)) return *hit;
    }
    std::vector<PrimePower> pp;
    BigNat m = n;
    const u64 bound = std::max<u64>(policy.trial_division_bound, 2);
    const auto& small = cached_primes(static_cast<std::uint32_t>(std::min<u64>(bound, 100'000'000)));
    for (auto p : small) {
        if (p > bound || m == 1) break;
        if (BigNat(p) * p > m) break;
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            unsigned e = 0;
            while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
                mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
                ++e;
            }
            pp.push_back({BigNat(p), e});
        }
    }
    if (m > 1) {
        std::map<BigNat, unsigned> rest;
        u64 budget = policy.pollard_rho_budget;
        split(m, rest, budget);
        for (auto& [q, e] : rest) {
            if (!policy.allow_probable_primes && primality(q) == Primality::ProbablePrime)
                throw BudgetExceeded(q.get_str());
            pp.push_back({q, e});
        }
    }
    return Factorization::from_pairs(std::move(pp));
}

TauPhi tau_phi(const Factorization& f) {
    TauPhi r{1, 1};
    BigNat t;
    for (auto& x : f.factors()) {
        r.tau *= x.e + 1;
        mpz_pow_ui(t.get_mpz_t(), x.p.get_mpz_t(), x.e - 1);
        r.phi *= t * (x.p - 1);
    }
    return r;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t n) {
    std::vector<std::uint32_t> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
}

const std::vector<std::uint32_t>& first_primes(std::size_t k) {
    static std::mutex mu;
    static std::vector<std::uint32_t> cache;
    std::lock_guard lock(mu);
    std::uint32_t lim = 1024;
    while (cache.size() < k) {
        cache = primes_up_to(lim);
        lim *= 2;
    }
    return cache;
}

BigNat primorial(unsigned n) {
    BigNat r = 1;
    for (auto p : primes_up_to(n)) r *= p;
    return r;
}

std::string short_decimal(const BigNat& n, std::size_t head) {
    std::string s = n.get_str();
    if (s.size() <= head + 8) return s;
    return s.substr(0, head) + "...(" + std::to_string(s.size()) + " digits)";
}

}  // namespace mkf

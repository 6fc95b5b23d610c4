#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "markoff/connectivity.hpp"
#include "oracles.hpp"

using namespace mkf;

namespace {

const BigNat kPrime("1000000000000000124399");

Verdict run(const BigNat& p, const TestOptions& opt = {}) { return test_prime(p, factorize(p - 1), factorize(p + 1), opt); }

BigNat pow10(unsigned e) {
    BigNat r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

// Independent slow evaluation of X_d = |M_d(p-1)| + |M_d(p+1)| and both intervals.
std::uint64_t slow_failing(std::uint64_t p) {
    std::set<std::uint64_t> ds;
    for (auto d : oracle::divisors(p - 1)) ds.insert(d);
    for (auto d : oracle::divisors(p + 1)) ds.insert(d);
    std::uint64_t failing = 0;
    for (auto d : ds) {
        const long double X = oracle::maximal(p - 1, d).size() + oracle::maximal(p + 1, d).size();
        const long double dd = d;
        bool fails = 8.0L * p < (dd * X) * (dd * X) && 4 * dd < 81 * X * X * X;
        for (std::uint64_t n : {p - 1, p + 1}) {
            if (fails || n % d) continue;
            std::uint64_t phi = 0;
            for (std::uint64_t k = 1; k <= n; ++k) phi += std::gcd(k, n) == 1;
            const long double tau = oracle::divisors(n).size();
            fails = p < 6 * X * dd && dd * phi * dd * phi < 64.0L * p * n * n * tau * tau;
        }
        failing += fails;
    }
    return failing;
}

}  // namespace

TEST_CASE("end-game bounds") {
    auto up = endgame_bound(kPrime, +1, factorize(kPrime + 1));
    auto dn = endgame_bound(kPrime, -1, factorize(kPrime - 1));
    CHECK(std::abs(up.value / 1.427e16 - 1) < 1e-3);
    CHECK(std::abs(dn.value / 1.302e14 - 1) < 1e-3);
    auto five = endgame_bound(5, -1, factorize_u64(4));
    const double exact = 48 * std::sqrt(5.0);
    CHECK(five.value >= exact);
    CHECK(five.value <= exact * (1 + 1e-12));
    CHECK_THROWS_AS(endgame_bound(5, +1, factorize_u64(4)), std::invalid_argument);
}

TEST_CASE("inconclusive example near 10^21") {
    auto v = run(kPrime);
    CHECK(v.outcome == Outcome::Inconclusive);
    CHECK(v.tau_minus == 192);
    CHECK(v.tau_plus == 11520);
    CHECK(v.failing_count == 989);
    CHECK(v.max_value == 438);
    bool found = false;
    for (auto& w : v.witnesses)
        if (w.d == 1664125969) {
            found = true;
            CHECK(w.value == 438);
            CHECK(w.interval == 1);
            CHECK(BigNat(204200000) < w.d);
            CHECK(w.d < BigNat(1702000000));
        }
    CHECK(found);
    for (std::size_t i = 0; i < v.witnesses.size(); i += 37)
        CHECK(witness_holds(kPrime, factorize(kPrime - 1), factorize(kPrime + 1), v.witnesses[i]));
}

TEST_CASE("a connected prime and small primes") {
    auto v = run(1327363);
    CHECK(v.outcome == Outcome::Connected);
    CHECK(v.failing_count == 0);
    CHECK_FALSE(certify_failure_one_side(1327363, -1, factorize_u64(1327362)).has_value());
    CHECK_FALSE(certify_failure_one_side(1327363, +1, factorize_u64(1327364)).has_value());
    for (unsigned p : {3u, 7u, 101u}) {
        auto w = run(p);
        for (auto& x : w.witnesses) CHECK(witness_holds(p, factorize_u64(p - 1), factorize_u64(p + 1), x));
    }
    CHECK_THROWS_AS(test_prime(11, factorize_u64(10), factorize_u64(13)), std::invalid_argument);
}

TEST_CASE("witnesses agree with a slow evaluation") {
    for (std::uint64_t p = 3; p < 3000; p += 2) {
        if (!oracle::is_prime(p)) continue;
        auto v = run(p);
        const std::uint64_t slow = slow_failing(p);
        CHECK(v.failing_count == slow);
        CHECK((v.outcome == Outcome::Connected) == (slow == 0));
    }
}

TEST_CASE("one-side certificate") {
    auto w = certify_failure_one_side(kPrime, +1, factorize(kPrime + 1));
    REQUIRE(w.has_value());
    const auto f = factorize(kPrime + 1);
    const BigNat m_exact = maximal_count(f, w->d);
    CHECK(w->m <= m_exact);
    const BigNat& d = w->d;
    const BigNat m = w->m;
    CHECK(d * d * m * m > 8 * kPrime);
    CHECK(4 * d < 81 * m * m * m);
    // Exact path when tau is small.
    auto e = certify_failure_one_side(kPrime, -1, factorize(kPrime - 1));
    if (e) {
        CHECK(e->exact);
        CHECK(e->m == maximal_count(factorize(kPrime - 1), e->d));
    }
}

TEST_CASE("one-side lower bound never exceeds the exact count") {
    // tau between 2^12 and 2^17, so the histogram path runs and the truth is enumerable.
    const std::vector<std::string> ns = {"2^5*3^3*5^2*7^2*11*13*17*19*23", "2^7*3^4*5^3*7*11*13*17*19*23*29",
                                         "2^3*3^2*5*7*11*13*17*19*23*29*31*37*41", "2^9*3^5*5^3*7^2*11^2*13*17*19"};
    unsigned found = 0;
    for (auto& e : ns) {
        BigNat n = 1;
        std::stringstream ss(e);
        std::string tok;
        while (std::getline(ss, tok, '*')) {
            const auto c = tok.find('^');
            const unsigned long q = std::stoul(tok.substr(0, c));
            const unsigned k = c == std::string::npos ? 1 : std::stoul(tok.substr(c + 1));
            for (unsigned i = 0; i < k; ++i) n *= q;
        }
        const auto f = factorize(n);
        REQUIRE(tau_phi(f).tau > 4096);
        for (int side : {-1, +1}) {
            const BigNat p = n - side;
            auto w = certify_failure_one_side(p, side, f);
            if (!w) continue;
            ++found;
            CHECK_FALSE(w->exact);
            std::uint64_t half = 0;
            for (auto& d : all_divisors(f)) half += 2 * d.value > w->d && d.value <= w->d;
            CHECK(w->m <= BigNat(static_cast<unsigned long>(half)));
            CHECK(w->m <= BigNat(static_cast<unsigned long>(maximal_count(f, w->d))));
            CHECK(w->d * w->d * w->m * w->m > 8 * p);
            CHECK(4 * w->d < 81 * w->m * w->m * w->m);
        }
    }
    CHECK(found > 0);
}

TEST_CASE("tau bound and emptiness inequalities") {
    std::vector<std::uint32_t> tau(200001, 0);
    for (std::uint32_t d = 1; d < tau.size(); ++d)
        for (std::uint32_t m = d; m < tau.size(); m += d) ++tau[m];
    for (std::uint32_t n = 16; n < tau.size(); ++n) CHECK(double(tau[n]) < nicolas_tau_bound(n).value);
    CHECK_THROWS_AS(nicolas_tau_bound(15), DomainError);
    CHECK(first_interval_empty_above(pow10(532)));
    CHECK_FALSE(first_interval_empty_above(pow10(100)));
    CHECK(second_interval_empty_above(pow10(141)));
    CHECK_FALSE(second_interval_empty_above(pow10(40)));
    CHECK(second_interval_cutoff() == pow10(141));
}

TEST_CASE("reduced-number sweep on small ranges") {
    auto s = algorithm1_sweep(2, 10);
    CHECK(s.a > 10);
    CHECK(s.largest_failing.has_value());
    for (const char* b : {"1000", "1000000", "1000000000000"}) {
        auto par = algorithm1_sweep(2, BigNat(b));
        SweepOptions so;
        so.parallel = false;
        so.batch = 7;
        auto ser = algorithm1_sweep(2, BigNat(b), so);
        auto ref = algorithm1_sweep_reference(2, BigNat(b));
        CHECK(par.a == ref.a);
        CHECK(ser.a == ref.a);
        CHECK(par.largest_failing == ref.largest_failing);
    }
    CHECK_THROWS_AS(algorithm1_sweep(1, 10), std::invalid_argument);
}

TEST_CASE("prime sweep: parallel equals serial equals per-prime tests") {
    auto par = sweep_primes(2, 30000);
    auto ser = sweep_primes(2, 30000, {}, false);
    CHECK(par.connected == ser.connected);
    CHECK(par.primes_tested == ser.primes_tested);
    std::vector<std::uint64_t> direct;
    std::uint64_t tested = 0;
    for (std::uint64_t p = 3; p <= 30000; ++p) {
        if (!oracle::is_prime(p)) continue;
        ++tested;
        if (run(p).outcome == Outcome::Connected) direct.push_back(p);
    }
    CHECK(par.connected == direct);
    CHECK(par.primes_tested == tested);
}

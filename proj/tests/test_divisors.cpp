#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "markoff/divisors.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace mkf;

namespace {

std::vector<unsigned long> members(const MaximalDivisorSet& s) {
    std::vector<unsigned long> v;
    for (auto& h : s.members) v.push_back(h.value.get_ui());
    std::sort(v.begin(), v.end());
    return v;
}

void require_ok(const props::Result& r) {
    INFO(r.name << ": " << r.first_failure);
    CHECK(r.checked > 0);
    CHECK(r.failures == 0);
}

}  // namespace

TEST_CASE("count_divisors_up_to examples") {
    auto f = factorize_u64(12);
    CHECK(count_divisors_up_to(f, 6) == 5);
    CHECK(count_divisors_up_to(f, 12) == 6);
    CHECK(count_divisors_up_to(f, 1) == 1);
}

TEST_CASE("maximal_divisors examples") {
    CHECK(members(maximal_divisors(factorize_u64(12), 10)) == std::vector<unsigned long>{4, 6});
    CHECK(members(maximal_divisors(factorize_u64(360), 360)) == std::vector<unsigned long>{360});
    CHECK(members(maximal_divisors(factorize_u64(97), 1)) == std::vector<unsigned long>{1});
}

TEST_CASE("maximal_divisor_profile examples") {
    auto prof = maximal_divisor_profile(factorize_u64(12));
    REQUIRE(prof.size() == 6);
    for (auto& e : prof) {
        if (e.d == 6) CHECK(e.count == 2);
        if (e.d == 12) CHECK(e.count == 1);
    }
    CHECK_THROWS_AS(maximal_divisor_profile(factorize_u64(720720), 16), CapExceeded);
}

TEST_CASE("count_omega_k examples") {
    CHECK(count_omega_k(factorize_u64(12), 2) == 2);
    CHECK(count_omega_k(factorize_u64(999), 0) == 1);
    CHECK(count_omega_k(factorize_u64(32), 3) == 1);
    CHECK(count_omega_k(factorize_u64(12), 7) == 0);
    CHECK(count_omega_k(factorize_u64(12), -1) == 0);
}

TEST_CASE("max_omega_below examples") {
    CHECK(max_omega_below(factorize_u64(12), 162, true) == 3);
    CHECK(max_omega_below(factorize_u64(12), 5, true) == 2);
    CHECK(max_omega_below(factorize_u64(45), 4, true) == 1);
    CHECK(max_omega_below(factorize_u64(45), 9, true) == 1);
    CHECK(max_omega_below(factorize_u64(45), 9, false) == 2);
}

TEST_CASE("lambda of the cofactor") {
    auto f = factorize_u64(360);
    for (auto& d : all_divisors(f)) {
        const std::uint64_t dv = d.value.get_ui(), q = 360 / dv;
        std::uint64_t least = 1;
        if (q > 1) least = oracle::factor(q).begin()->first;
        CHECK(lambda_of_cofactor(f, d) == BigNat(static_cast<unsigned long>(least)));
    }
}

TEST_CASE("property suites at unit scale") {
    require_ok(props::maximal_divisors_oracle(600, 4, 11));
    require_ok(props::maximal_divisors_random(100000, 300, 3, 12));
    require_ok(props::omega_layers(1, 1500, 2, 13, true));
    require_ok(props::omega_below_and_counts(800, 3, 14));
}

TEST_CASE("growth ratio normalization") {
    // n = 30030: |M_{sqrt n}| over C(6,3)-type growth, checked against a direct count.
    auto f = factorize_u64(30030);
    auto g = maximal_growth_ratio(f, 1, 2);
    CHECK_FALSE(g.surrogate);
    CHECK(g.threshold == 173);
    const double expect = std::log(double(oracle::maximal(30030, 173).size())) /
                          (std::log(2.0) * g.log_n / g.log_log_n);
    CHECK(g.ratio == doctest::Approx(expect).epsilon(1e-12));
    auto s = maximal_growth_ratio(f, 1, 2, 8);
    CHECK(s.surrogate);
    CHECK(s.ratio > 0);
    auto c = divisors_below_growth_ratio(f, 1, 2);
    CHECK(c.ratio == doctest::Approx(std::log(double(oracle::count_up_to(30030, 173))) /
                                     (std::log(2.0) * c.log_n / c.log_log_n)));
    CHECK_THROWS_AS(maximal_growth_ratio(f, 2, 2), std::invalid_argument);
}

TEST_CASE("chain-bound surrogate bounds the exact count") {
    for (std::uint64_t n : {720720ULL, 36756720ULL, 2095133040ULL, 9316358251200ULL}) {
        const auto f = factorize_u64(n);
        for (auto [a, b] : {std::pair{1u, 4u}, {1u, 2u}, {3u, 4u}, {2u, 3u}}) {
            const auto exact = maximal_growth_ratio(f, a, b, std::uint64_t{1} << 20);
            const auto sur = maximal_growth_ratio(f, a, b, 1);
            CHECK_FALSE(exact.surrogate);
            CHECK(sur.surrogate);
            CHECK(sur.ratio >= exact.ratio - 1e-12);
        }
    }
}

#include <random>

#include "doctest.h"
#include "markoff/markoff.hpp"

using namespace mkf;

namespace {

Factorization fm(std::uint32_t p) { return factorize_u64(p - 1); }
Factorization fp(std::uint32_t p) { return factorize_u64(p + 1); }

}  // namespace

TEST_CASE("field arithmetic") {
    for (std::uint32_t p : {3u, 5u, 7u, 13u, 17u, 101u, 997u}) {
        Field F(p);
        CHECK_FALSE(F.is_square(F.delta()));
        for (u64 d = 1; d < F.delta(); ++d) CHECK(F.is_square(d));
        for (u64 a = 1; a < p; ++a) {
            CHECK(F.mul(a, F.inv(a)) == 1);
            auto r = F.sqrt(F.mul(a, a));
            REQUIRE(r.has_value());
            CHECK(F.mul(*r, *r) == F.mul(a, a));
            auto s = F.sqrt_ext(a);
            CHECK(F.mul(s, s) == F.ext(a));
            auto root = F.root_of_trace(a);
            CHECK(F.add(root, F.inv(root)) == F.ext(a));
        }
        Field::Ext z{2, 1};
        CHECK(F.pow(z, u64(p) * p - 1) == F.ext(1));
    }
}

TEST_CASE("involutions") {
    CHECK(apply_involution(1, {3, 3, 3}, 7) == MarkoffTriple{6, 3, 3});
    CHECK(apply_involution(3, {1, 1, 2}, 101) == MarkoffTriple{1, 1, 100});
    std::mt19937 rng(3);
    for (int i = 0; i < 500; ++i) {
        const std::uint32_t p = 101;
        MarkoffTriple t{std::uint32_t(rng() % p), std::uint32_t(rng() % p), std::uint32_t(rng() % p)};
        for (int k = 1; k <= 3; ++k) CHECK(apply_involution(k, apply_involution(k, t, p), p) == t);
    }
}

TEST_CASE("build_graph on small primes") {
    auto g5 = build_graph(5);
    CHECK(g5.vertices.size() == count_solutions_exhaustive(5));
    for (auto& t : g5.vertices) CHECK(is_markoff(t, 5));
    for (std::uint32_t p = 5; p <= 211; p += 2) {
        if (!is_prime_u64(p)) continue;
        auto g = build_graph(p);
        CHECK(g.vertices.size() == count_solutions_exhaustive(p));
        CHECK(g.components() == 1);
        CHECK(g.component_sizes[0] % p == 0);
        CHECK(negation_closure_ok(g));
    }
    CHECK_THROWS(build_graph(5003));
}

TEST_CASE("parallel and serial graph construction agree") {
    for (std::uint32_t p : {7u, 13u, 97u, 433u}) {
        auto a = build_graph(p), b = build_graph_serial(p);
        CHECK(a.vertices == b.vertices);
        CHECK(a.component == b.component);
        CHECK(a.component_sizes == b.component_sizes);
    }
}

TEST_CASE("coordinate and triple orders") {
    const std::uint32_t p = 7;
    Field F(p);
    CHECK(coordinate_order(F, 2, fm(p), fp(p)) == 0);
    CHECK(coordinate_order(F, 5, fm(p), fp(p)) == 0);
    // x = 3: disc 5 is a nonsquare mod 7, so r lies in the norm-one subgroup of order 8.
    const u64 o = coordinate_order(F, 3, fm(p), fp(p));
    CHECK(8 % o == 0);
    auto r = F.root_of_trace(3);
    CHECK(F.pow(r, o) == F.ext(1));
    for (u64 k = 1; k < o; ++k) CHECK_FALSE(F.pow(r, k) == F.ext(1));
    auto t = triple_order(p, {2, 3, 3}, fm(p), fp(p));
    CHECK(t.special);
    CHECK(t.ord_a == 0);
    auto g = build_graph(31);
    for (std::size_t i = 0; i < g.vertices.size(); i += 17) {
        auto v = g.vertices[i];
        auto a = triple_order(31, v, fm(31), fp(31)).Ord();
        CHECK(a == triple_order(31, {v.b, v.c, v.a}, fm(31), fp(31)).Ord());
        CHECK(a == triple_order(31, {v.c, v.a, v.b}, fm(31), fp(31)).Ord());
    }
}

TEST_CASE("class counts stay within the bound") {
    for (std::uint32_t p : {101u, 103u, 109u}) {
        auto s = corvaja_sweep(p, 5, 7, fm(p), fp(p));
        CHECK(s.cases > 0);
        CHECK(s.violations == 0);
        CHECK(s.worst_ratio <= 1.0);
    }
    // A bound at least t is met trivially. x = 4 has r in F_13, so s = 1 is valid.
    const std::uint32_t p = 13;
    Field F(p);
    auto r = F.root_of_trace(4);
    REQUIRE(r.v == 0);
    const u64 t = ext_order(F, r, fm(p), fp(p));
    auto c = corvaja_class_count(F, r, t, F.ext(1), 14, fm(p), fp(p));
    CHECK(c.bound >= double(t));
    CHECK(c.within);
    CHECK(c.count <= t);
}

TEST_CASE("Fibonacci orbit") {
    std::uint32_t n = 0;
    for (std::uint32_t p = 5; n < 300; p += 2) {
        if (!is_prime_u64(p)) continue;
        ++n;
        auto r = fibonacci_orbit_check(p, fm(p), fp(p));
        CHECK(r.found);
        CHECK(r.period > 0);
    }
}

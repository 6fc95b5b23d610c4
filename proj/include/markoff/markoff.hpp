#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "markoff/arith.hpp"

namespace mkf {

class DegenerateInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using u64 = std::uint64_t;

// Arithmetic in F_p and F_{p^2} = F_p(sqrt(delta)), delta the least nonsquare.
class Field {
public:
    explicit Field(u64 p);

    struct Ext {
        u64 u = 0, v = 0;  // u + v sqrt(delta)
        bool operator==(const Ext&) const = default;
    };

    u64 p() const { return p_; }
    u64 delta() const { return delta_; }
    u64 add(u64 a, u64 b) const;
    u64 sub(u64 a, u64 b) const;
    u64 mul(u64 a, u64 b) const;
    u64 pow(u64 a, u64 e) const;
    u64 inv(u64 a) const;
    bool is_square(u64 a) const;
    // Tonelli-Shanks; nullopt for nonsquares.
    std::optional<u64> sqrt(u64 a) const;

    Ext ext(u64 a) const { return {a % p_, 0}; }
    Ext add(const Ext& a, const Ext& b) const;
    Ext sub(const Ext& a, const Ext& b) const;
    Ext mul(const Ext& a, const Ext& b) const;
    Ext pow(Ext a, u64 e) const;
    Ext inv(const Ext& a) const;
    // Square root in F_{p^2} of an element of F_p (always exists).
    Ext sqrt_ext(u64 a) const;
    // A root r of r^2 - x r + 1 = 0.
    Ext root_of_trace(u64 x) const;

private:
    u64 p_;
    u64 delta_;
};

struct MarkoffTriple {
    std::uint32_t a = 0, b = 0, c = 0;
    bool operator==(const MarkoffTriple&) const = default;
};

bool is_markoff(const MarkoffTriple& t, std::uint32_t p);
MarkoffTriple apply_involution(int i, const MarkoffTriple& t, std::uint32_t p);

struct MarkoffGraph {
    std::uint32_t p = 0;
    std::vector<MarkoffTriple> vertices;
    std::vector<std::uint32_t> component;      // label per vertex
    std::vector<std::uint64_t> component_sizes;
    std::vector<std::uint32_t> row_start;       // index of first vertex with given (a, b)

    std::size_t index_of(const MarkoffTriple& t) const;  // vertices.size() if absent
    std::size_t components() const { return component_sizes.size(); }
};

inline constexpr std::uint32_t kGraphCap = 5000;

MarkoffGraph build_graph(std::uint32_t p, std::uint32_t cap = kGraphCap);
MarkoffGraph build_graph_serial(std::uint32_t p, std::uint32_t cap = kGraphCap);
// Count of solutions by a plain triple loop, for checking build_graph.
std::uint64_t count_solutions_exhaustive(std::uint32_t p);

// Vertex set closed under negating two coordinates, and the induced map on
// components well defined.
bool negation_closure_ok(const MarkoffGraph& g);

struct TripleOrder {
    u64 ord_a = 0, ord_b = 0, ord_c = 0;  // 0 marks a +-2 coordinate
    bool special = false;
    u64 Ord() const;
};

// Multiplicative order of r with x = r + 1/r, using the factorizations of p-1 and p+1.
// Returns 0 for x = +-2.
u64 coordinate_order(const Field& F, u64 x, const Factorization& f_minus, const Factorization& f_plus);
TripleOrder triple_order(std::uint32_t p, const MarkoffTriple& t, const Factorization& f_minus,
                         const Factorization& f_plus);

struct ClassCount {
    u64 count = 0;
    double bound = 0;   // (3/2) max((6td)^(1/3), 4td/p)
    bool within = true; // exact integer comparison count <= bound
};

// Classes n mod t whose coordinate has order dividing d. Classes landing on +-2
// are skipped, as in the bound's derivation.
ClassCount corvaja_class_count(const Field& F, const Field::Ext& r, u64 t, const Field::Ext& s, u64 d,
                               const Factorization& f_minus, const Factorization& f_plus);
// Orders of the orbit coordinates (r+1/r)(s r^n + 1/(s r^n))/(r-1/r), n = 0..t-1; 0 for +-2.
std::vector<u64> orbit_orders(const Field& F, const Field::Ext& r, u64 t, const Field::Ext& s, const Factorization& f_minus,
                              const Factorization& f_plus);
u64 ext_order(const Field& F, const Field::Ext& r, const Factorization& f_minus, const Factorization& f_plus);

struct CorvajaSweep {
    u64 cases = 0;          // (r, s, d) triples checked
    u64 violations = 0;
    u64 skipped_order4 = 0; // r + 1/r = 0
    u64 worst_gap_num = 0;  // count of the case closest to its bound
    double worst_ratio = 0; // max count / bound
};

// Every r of order t > 2 in F_p^* or the norm-one subgroup, `samples` choices of s
// per r taken from random vertices (r + 1/r, b, c), and every d dividing p-1 or p+1.
CorvajaSweep corvaja_sweep(std::uint32_t p, unsigned samples, std::uint64_t seed, const Factorization& f_minus,
                           const Factorization& f_plus);

struct FibOrbit {
    bool found = false;   // some coordinate has order p-1 or p+1
    u64 period = 0;
    u64 first_n = 0;      // first n hitting a full-order coordinate
};

FibOrbit fibonacci_orbit_check(std::uint32_t p, const Factorization& f_minus, const Factorization& f_plus);

}  // namespace mkf

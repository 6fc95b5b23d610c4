#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "markoff/arith.hpp"

namespace mkf {

class PreconditionViolated : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Exponents over consecutive primes: exps[0] belongs to 2, exps[i] to the
// (i+1)-th prime. Trailing zeros are trimmed.
struct ReducedNumber {
    std::vector<unsigned> exps;
    BigNat value;

    Factorization factorization() const;
    unsigned omega() const;
};

bool is_reduced(const Factorization& f);
bool is_reduced_exponents(const std::vector<unsigned>& exps);

// One odd part reached by the enumeration. Every n = 2^a * odd with
// 0 <= a <= max_two and n <= limit is reduced; a runs over [0, two_count).
struct OddPart {
    const std::vector<unsigned>* odd_exps;  // exponents of 3, 5, 7, ...
    const BigNat* odd;
    std::uint32_t next_prime;  // p_{k+1}, the first odd prime with exponent 0
    unsigned max_two;           // largest a with 2^a < 8 * next_prime^2
    unsigned two_count;         // number of admissible a under the limit
};

struct EnumerationStats {
    std::uint64_t nodes = 0;
    std::uint64_t odd_parts = 0;
    BigNat numbers = 0;
};

// Depth-first over odd exponent vectors (non-increasing), branch bound from the
// closure condition at the first zero prime. Visits odd parts in no fixed order.
EnumerationStats for_each_reduced_odd_part(const BigNat& limit, const std::function<void(const OddPart&)>& visit);

BigNat count_reduced(const BigNat& limit);
// All reduced n <= limit, ascending. Intended for moderate limits.
std::vector<ReducedNumber> enumerate_reduced(const BigNat& limit);

// ---- reducing functions -------------------------------------------------

// A divisor is an exponent vector aligned with its parent's sorted primes.
using Exps = std::vector<unsigned>;

struct ReducingFunctionSpec {
    Factorization domain;    // n
    Factorization codomain;  // m
    std::function<Exps(const Exps&)> map;
    std::string name;
};

struct ReducingCheck {
    bool ok = true;
    char clause = 0;  // 'a', 'b', 'c', or 'm' when f(d) does not divide m
    BigNat d, d2;     // witnesses; d2 only for clause (c)
    std::string detail;
};

inline constexpr std::uint64_t kReducingTabulationCap = std::uint64_t{1} << 20;

ReducingCheck verify_reducing(const ReducingFunctionSpec& f, std::uint64_t cap = kReducingTabulationCap);

ReducingFunctionSpec identity_reducing(const Factorization& n);
// f(q^i) = p^i for odd p < q (or p == q).
ReducingFunctionSpec make_prime_swap(const BigNat& q, const BigNat& p, unsigned a);
// p^a q^b -> p^(a-c) q^(b+1) with c = floor((a+1)/(b+2)), needs q < p^c.
ReducingFunctionSpec make_exponent_shift(const BigNat& p, const BigNat& q, unsigned a, unsigned b);
// p^a -> p^b q_1...q_k, needs p^(a-2) > q_1...q_{k-1} q_k^2.
ReducingFunctionSpec make_two_adic(const BigNat& p, const std::vector<BigNat>& qs, unsigned a);
ReducingFunctionSpec product_reducing(const ReducingFunctionSpec& f1, const ReducingFunctionSpec& f2);
ReducingFunctionSpec compose_reducing(const ReducingFunctionSpec& f, const ReducingFunctionSpec& g);

// Image under f of a divisor given by value.
BigNat apply_reducing(const ReducingFunctionSpec& f, const BigNat& d);

struct ReductionTrace {
    Factorization n;
    ReducingFunctionSpec moves;  // n -> moved, built from exponent shifts
    Factorization moved;         // smallest number reached; odd part is m'
    unsigned two_power = 0;      // least a with 2^a m' >= n
    ReducedNumber m;             // final reduced number
};

ReductionTrace reduce_to_reduced(const Factorization& n);

}  // namespace mkf

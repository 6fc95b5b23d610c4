#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "markoff/arith.hpp"
#include "markoff/divisors.hpp"

namespace mkf {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class Mode { Td, Md };
enum class Outcome { Connected, Inconclusive };

const char* to_string(Mode m);
const char* to_string(Outcome o);

struct Witness {
    BigNat d;
    int side = -1;         // -1: d | p-1, +1: d | p+1
    int interval = 1;      // 1 or 2
    std::uint64_t value;   // T_d or M_d
};

struct Verdict {
    BigNat p;
    Mode mode = Mode::Md;
    bool union_md = false;
    Outcome outcome = Outcome::Connected;
    std::vector<Witness> witnesses;    // one per failing divisor
    std::uint64_t failing_count = 0;
    std::uint64_t max_value = 0;       // largest T_d/M_d over failing divisors
    std::uint64_t tau_minus = 0, tau_plus = 0;
    bool second_interval_skipped = false;
};

struct TestOptions {
    Mode mode = Mode::Md;
    bool union_md = false;   // |M_d(p-1) u M_d(p+1)| instead of the sum
    std::uint64_t cap = kDefaultDivisorCap;
};

struct EndGameBound {
    BigNat p;
    int side = 1;
    double value = 0;  // rounded upward
};

// 8 sqrt(p) (p+side) tau(p+side) / phi(p+side).
EndGameBound endgame_bound(const BigNat& p, int side, const Factorization& f);

Verdict test_prime(const BigNat& p, const Factorization& f_minus, const Factorization& f_plus,
                   const TestOptions& opt = {});

// Recomputes X_d through the divisors module and rechecks the strict inequalities.
bool witness_holds(const BigNat& p, const Factorization& f_minus, const Factorization& f_plus, const Witness& w,
                   const TestOptions& opt = {});

struct OneSideWitness {
    BigNat d;
    BigNat m;            // |M_d(p+side)| or a proven lower bound for it
    bool exact = true;
};

// A d | p+side with 2 sqrt(2p)/m < d < 81 m^3/4, m = |M_d(p+side)|.
// When tau(p+side) exceeds the cap, m is replaced by a lower bound for the
// number of divisors in (d/2, d], all of which are maximal, taken from a log
// histogram with rounded-down prime logs. nullopt then means none was found,
// not that none exists.
std::optional<OneSideWitness> certify_failure_one_side(const BigNat& p, int side, const Factorization& f,
                                                       std::uint64_t cap = std::uint64_t{1} << 12);

struct RealBound {
    double value = 0;      // rounded upward; may be +inf
    double log_value = 0;  // rounded upward
};

// exp(log 2 log n / log log n + 1.342 log n / (log log n)^2).
RealBound nicolas_tau_bound(const BigNat& n);

// 2 log(81 sqrt 2) <= log p (1 - 8 log 2 / log log p - 10.736 / (log log p)^2).
bool first_interval_empty_above(const BigNat& p);
// 192 sqrt(p) (p+1) B^2 log log p <= p^2 with B the tau bound at p+1, i.e. the
// End-Game bound falls below p/(6 T_d) using phi(n) > n/(2 log log n).
bool second_interval_empty_above(const BigNat& p);

// Interval 2 is skipped above this, once second_interval_empty_above holds there.
const BigNat& second_interval_cutoff();

struct SweepStats {
    std::uint64_t reduced_in_range = 0;
    std::uint64_t prefilter_survivors = 0;
    std::uint64_t float_survivors = 0;
    std::uint64_t exact_evaluations = 0;
    unsigned rounds = 0;
};

struct SweepState {
    BigNat a, b;
    std::optional<BigNat> largest_failing;  // the reduced n that set a
    SweepStats stats;
};

// Exact line-by-line loop body for one reduced n: true when it reaches j >= k.
bool algorithm1_fails(const Factorization& n);

struct SweepOptions {
    bool parallel = true;
    std::size_t batch = 200000;  // candidates kept per round, largest first
};

SweepState algorithm1_sweep(const BigNat& a, const BigNat& b, const SweepOptions& opt = {});
// Plain reference: every reduced n in [a, 4b-2] through algorithm1_fails.
SweepState algorithm1_sweep_reference(const BigNat& a, const BigNat& b);

struct PrimeSweep {
    std::vector<std::uint64_t> connected;
    std::uint64_t primes_tested = 0;
};

// test_prime over every prime in [lo, hi] (hi < 2^32), factoring p+-1 with a sieve.
PrimeSweep sweep_primes(std::uint64_t lo, std::uint64_t hi, const TestOptions& opt = {}, bool parallel = true);

}  // namespace mkf

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "markoff/arith.hpp"

namespace mkf {

class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultDivisorCap = std::uint64_t{1} << 24;

// A divisor of a parent factorization, by exponent vector.
struct DivisorHandle {
    std::vector<unsigned> e;
    BigNat value;
    unsigned omega() const;
};

// lambda(n/d): least prime whose exponent in d is below the parent's, 1 if d = n.
BigNat lambda_of_cofactor(const Factorization& n, const DivisorHandle& d);

struct MaximalDivisorSet {
    BigNat x;
    std::vector<DivisorHandle> members;
    Factorization parent;
};

std::vector<DivisorHandle> all_divisors(const Factorization& f, std::uint64_t cap = kDefaultDivisorCap);

BigNat count_divisors_up_to(const Factorization& f, const BigNat& x);
MaximalDivisorSet maximal_divisors(const Factorization& f, const BigNat& x);

struct ProfileEntry {
    BigNat d;
    std::uint64_t count;  // |M_d(n)|
};
// One entry per divisor, ascending in d.
std::vector<ProfileEntry> maximal_divisor_profile(const Factorization& f, std::uint64_t cap = kDefaultDivisorCap);
// |M_x(n)| for one threshold, through the same sorted sweep.
std::uint64_t maximal_count(const Factorization& f, const BigNat& x, std::uint64_t cap = kDefaultDivisorCap);

// Coefficients of prod (1 + z + ... + z^a_i); entry k is C_k(n).
std::vector<BigNat> omega_polynomial(const Factorization& f);
BigNat count_omega_k(const Factorization& f, long k);

// max Omega(d) over d | n with d < x (strict) or d <= x.
unsigned max_omega_below(const Factorization& f, const BigNat& x, bool strict);

// Normalized growth of divisor counts below n^alpha, alpha = num/den in (0, 1):
// log(count) / [log(1/(alpha^alpha (1-alpha)^(1-alpha))) log n / log log n].
struct GrowthRatio {
    double ratio = 0;
    double log_n = 0;
    double log_log_n = 0;
    BigNat threshold;       // floor(n^alpha)
    bool surrogate = false;  // count replaced by its chain bound C_k
};

// Uses |M_{n^alpha}(n)| when tau(n) <= cap, the chain-bound C_k surrogate otherwise.
GrowthRatio maximal_growth_ratio(const Factorization& f, unsigned num, unsigned den,
                                 std::uint64_t cap = std::uint64_t{1} << 16);
// Same normalization for |{d | n : d <= n^alpha}|, always exact.
GrowthRatio divisors_below_growth_ratio(const Factorization& f, unsigned num, unsigned den);

}  // namespace mkf

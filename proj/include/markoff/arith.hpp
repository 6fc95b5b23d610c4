#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace mkf {

using BigNat = mpz_class;

struct PrimePower {
    BigNat p;
    unsigned e = 0;
    bool operator==(const PrimePower&) const = default;
};

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& cofactor)
        : std::runtime_error("rho budget exhausted on cofactor " + cofactor), cofactor_(cofactor) {}
    const std::string& cofactor() const { return cofactor_; }

private:
    std::string cofactor_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

enum class Primality { Composite, Prime, ProbablePrime };

// Deterministic below 2^64 (fixed witness set); 64 Miller-Rabin rounds with
// seeded random bases above, reported as ProbablePrime.
Primality primality(const BigNat& n);
bool is_prime(const BigNat& n);
bool is_prime_u64(std::uint64_t n);

// Immutable prime-power list with the cached product.
class Factorization {
public:
    Factorization() : value_(1) {}
    // Sorts, merges equal primes, drops zero exponents. Does not check primality.
    static Factorization from_pairs(std::vector<PrimePower> pp);
    static Factorization from_exponents(const std::vector<std::uint64_t>& primes,
                                        const std::vector<unsigned>& exps);

    const std::vector<PrimePower>& factors() const { return f_; }
    const BigNat& value() const { return value_; }
    std::size_t size() const { return f_.size(); }
    bool empty() const { return f_.empty(); }
    unsigned omega_big() const;  // Omega(n), with multiplicity
    unsigned exponent_of(const BigNat& p) const;
    // Checks strict ordering, exponents, product and primality of every prime.
    bool valid() const;
    std::string str() const;  // "2^2*3"
    bool operator==(const Factorization& o) const { return f_ == o.f_; }

private:
    std::vector<PrimePower> f_;
    BigNat value_;
};

struct FactorPolicy {
    std::uint64_t trial_division_bound = 10'000'000;
    std::uint64_t pollard_rho_budget = 20'000'000;
    bool allow_probable_primes = true;
    std::optional<std::string> cache_path;
};

// Cache file: "<n>=<p1>^<e1>,<p2>^<e2>,..." per line, '#' comments.
// Entries are re-verified on load; bad lines are reported and ignored.
class FactorCache {
public:
    FactorCache() = default;
    explicit FactorCache(const std::string& path) { load(path); }
    std::size_t load(const std::string& path);
    std::optional<Factorization> find(const BigNat& n) const;
    void insert(const Factorization& f);
    void append_to(const std::string& path, const Factorization& f);
    const std::vector<std::string>& rejected() const { return rejected_; }
    std::size_t size() const { return map_.size(); }

    static std::optional<Factorization> parse_line(const std::string& line, BigNat* n_out);
    static std::string format_line(const Factorization& f);

private:
    std::map<std::string, Factorization> map_;
    std::vector<std::string> rejected_;
    mutable std::mutex mu_;
};

Factorization factorize(const BigNat& n, const FactorPolicy& policy = {},
                        const FactorCache* cache = nullptr);
Factorization factorize_u64(std::uint64_t n);

struct TauPhi {
    BigNat tau;
    BigNat phi;
};
TauPhi tau_phi(const Factorization& f);

std::vector<std::uint32_t> primes_up_to(std::uint32_t n);
// The first k primes, 2 first.
const std::vector<std::uint32_t>& first_primes(std::size_t k);
BigNat primorial(unsigned n);

BigNat parse_primorial_expr(const std::string& s);
// Accepts plain decimal, "1e532"-style powers of ten and primorial expressions.
BigNat parse_number(const std::string& s);
// Primorial levels whose largest prime is >= 5, leftover exponents as p^e.
std::string render_primorial_expr(const Factorization& f);

std::string short_decimal(const BigNat& n, std::size_t head = 12);

}  // namespace mkf

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "markoff/arith.hpp"
#include "markoff/connectivity.hpp"

namespace mkf {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kRngName = "gmp_randinit_mt";

enum class SampleMode { Consecutive, Random };

struct TableRequest {
    unsigned n = 8;          // primes above 10^n
    std::uint64_t m = 1000;  // sample size
    SampleMode mode = SampleMode::Consecutive;
    std::uint64_t seed = 1;
    TestOptions test{};
    FactorPolicy policy{};
    bool parallel = true;
};

struct TablePrime {
    BigNat p;
    bool excluded = false;
    bool connected = false;
};

struct TableRow {
    unsigned n = 0;
    std::uint64_t tested = 0;  // primes with a verdict
    std::uint64_t connected = 0;
    double percentage = 0;     // 100 * connected / tested
    std::uint64_t excluded_unfactorable = 0;
    std::vector<TablePrime> primes;  // input order
};

// Consecutive: the first m primes after 10^n. Random: m uniform draws in
// (10^n, 10^(n+1)), each moved to the next prime.
TableRow run_table(const TableRequest& req, const FactorCache* cache = nullptr);

// Least prime > n.
BigNat next_prime(const BigNat& n);

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mkf

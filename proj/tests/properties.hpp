#pragma once

// Property suites shared by the unit tests (small ranges) and the acceptance
// binary (full ranges).

#include <cstdint>
#include <string>
#include <vector>

namespace props {

struct Result {
    std::string name;
    std::uint64_t checked = 0;
    std::uint64_t failures = 0;
    std::string first_failure;
    double fitted = 0;  // fitted constant, where the property reports one

    bool ok() const { return failures == 0 && checked > 0; }
    void fail(const std::string& what) {
        if (failures++ == 0) first_failure = what;
    }
};

// maximal_divisors and the profile against pairwise filtering; antichain and
// covering. Exhaustive for n <= exhaustive_to, `samples` thresholds per n.
Result maximal_divisors_oracle(std::uint64_t exhaustive_to, unsigned samples, std::uint64_t seed);
// Same comparison on random n <= random_to.
Result maximal_divisors_random(std::uint64_t random_to, unsigned count, unsigned samples, std::uint64_t seed);

// C_k against brute force, sum = tau, unimodality, chain bound |M_x| <= C_k.
Result omega_layers(std::uint64_t from, std::uint64_t to, unsigned samples, std::uint64_t seed, bool brute_ck);

// Greedy max_omega_below and count_divisors_up_to against exhaustive search.
Result omega_below_and_counts(std::uint64_t to, unsigned samples, std::uint64_t seed);

// For every n in [2, to]: |M_x(n)| <= |M_x(2^a m')| and <= |M_x(m)|, with m the
// reduced output, for `samples` thresholds.
Result injection_bound(std::uint64_t to, unsigned samples, std::uint64_t seed);

// Output of reduce_to_reduced is reduced and n <= m <= 4n - 6.
Result reduction_bounds(std::uint64_t to);

// Randomized constructor checks for prime swaps, exponent shifts, the 2-adic
// map, products and compositions; each must pass verify_reducing.
Result reducing_constructors(unsigned trials, std::uint64_t seed);

// Enumerated reduced numbers against the brute-force definition, plus
// non-increasing odd exponents and closure under appending the next prime.
Result reduced_enumeration(std::uint64_t to);

}  // namespace props

#include <algorithm>
#include <cmath>

#include "markoff/reduction.hpp"

namespace mkf {

namespace {

using u64 = std::uint64_t;
constexpr u64 kSat = u64{1} << 40;  // above every prime we compare against

// base^c, saturated at kSat.
u64 pow_sat(u64 base, unsigned c) {
    u64 r = 1;
    for (unsigned i = 0; i < c; ++i) {
        r *= base;
        if (r >= kSat) return kSat;
    }
    return r;
}

// 2^a < 8 q^2, exactly.
bool two_cap_ok(unsigned a, u64 q) {
    if (a <= 3) return true;
    if (a >= 70) return false;
    const unsigned __int128 lhs = static_cast<unsigned __int128>(1) << (a - 3);
    return lhs < static_cast<unsigned __int128>(q) * q;
}

unsigned max_two_exponent(u64 q) {
    unsigned a = 0;
    while (two_cap_ok(a + 1, q)) ++a;
    return a;
}

double log_of(const BigNat& v) {
    long ex = 0;
    const double m = mpz_get_d_2exp(&ex, v.get_mpz_t());
    return std::log(m) + static_cast<double>(ex) * std::log(2.0);
}

struct Run {
    unsigned v;     // shared exponent
    u64 last;       // largest prime carrying it
};

class OddEnumerator {
public:
    OddEnumerator(const BigNat& limit, const std::function<void(const OddPart&)>& visit)
        : limit_(limit), visit_(visit) {
        log_limit_ = log_of(limit);
        slack_ = 1e-9 * std::max(1.0, log_limit_);
        // Odd primes: the product of the first K odd primes stays below limit.
        std::size_t want = 64;
        for (;;) {
            const auto& pr = first_primes(want + 2);
            double s = 0;
            std::size_t k = 1;
            while (k < pr.size() && s <= log_limit_ + 1) s += std::log(static_cast<double>(pr[k++]));
            if (k < pr.size() - 1) {
                odd_.assign(pr.begin() + 1, pr.end());
                break;
            }
            want *= 2;
        }
        prefix_.assign(odd_.size() + 1, 0.0);
        for (std::size_t i = 0; i < odd_.size(); ++i) prefix_[i + 1] = prefix_[i] + std::log(static_cast<double>(odd_[i]));
    }

    EnumerationStats run() {
        exps_.clear();
        runs_.clear();
        odd_value_ = 1;
        dfs(0, 0.0);
        return stats_;
    }

private:
    // Smallest K >= from whose prime odd_[K] exceeds R.
    std::size_t closure_index(u64 R, std::size_t from) const {
        std::size_t K = from;
        while (K < odd_.size() && odd_[K] <= R) ++K;
        return K;
    }

    u64 closure_radius() const {
        u64 R = 1;
        for (auto& r : runs_) R = std::max(R, pow_sat(r.last, (r.v + 1) / 2));
        return R;
    }

    void dfs(std::size_t j, double logP) {
        ++stats_.nodes;
        const u64 q = odd_[j];
        if (closure_radius() < q) emit(q);
        if (j + 1 >= odd_.size()) return;

        const unsigned top = runs_.empty() ? ~0u : runs_.back().v;
        const double lq = std::log(static_cast<double>(q));
        for (unsigned e = 1; e <= top; ++e) {
            // Pairwise condition against each earlier run, with q as the larger prime.
            bool ok = true;
            for (auto& r : runs_) {
                if (pow_sat(r.last, (r.v + 1) / (e + 2)) >= q) {
                    ok = false;
                    break;
                }
            }
            // Larger e only relaxes the pairwise test but raises the cost.
            const u64 R = std::max(closure_radius(), pow_sat(q, (e + 1) / 2));
            const std::size_t K = closure_index(R, j + 1);
            if (K >= odd_.size()) break;
            const double cost = logP + e * lq + (prefix_[K] - prefix_[j + 1]);
            if (cost > log_limit_ + slack_) break;
            if (!ok) continue;

            const bool merge = !runs_.empty() && runs_.back().v == e;
            Run saved{};
            if (merge) {
                saved = runs_.back();
                runs_.back().last = q;
            } else {
                runs_.push_back({e, q});
            }
            exps_.push_back(e);
            BigNat keep = odd_value_;
            for (unsigned t = 0; t < e; ++t) mpz_mul_ui(odd_value_.get_mpz_t(), odd_value_.get_mpz_t(), q);

            dfs(j + 1, logP + e * lq);

            odd_value_.swap(keep);
            exps_.pop_back();
            if (merge)
                runs_.back() = saved;
            else
                runs_.pop_back();
        }
    }

    void emit(u64 q) {
        if (odd_value_ > limit_) return;
        const unsigned A = max_two_exponent(q);
        BigNat rem = limit_ / odd_value_;
        const unsigned t = static_cast<unsigned>(mpz_sizeinbase(rem.get_mpz_t(), 2)) - 1;
        const unsigned count = std::min(A, t) + 1;
        ++stats_.odd_parts;
        stats_.numbers += count;
        OddPart op{&exps_, &odd_value_, static_cast<std::uint32_t>(q), A, count};
        visit_(op);
    }

    BigNat limit_;
    const std::function<void(const OddPart&)>& visit_;
    double log_limit_ = 0, slack_ = 0;
    std::vector<u64> odd_;
    std::vector<double> prefix_;
    std::vector<unsigned> exps_;
    std::vector<Run> runs_;
    BigNat odd_value_;
    EnumerationStats stats_;
};

}  // namespace

Factorization ReducedNumber::factorization() const {
    const auto& pr = first_primes(exps.size() + 1);
    std::vector<u64> ps(pr.begin(), pr.begin() + static_cast<long>(exps.size()));
    return Factorization::from_exponents(ps, exps);
}

unsigned ReducedNumber::omega() const {
    unsigned s = 0;
    for (auto e : exps) s += e;
    return s;
}

bool is_reduced_exponents(const std::vector<unsigned>& a) {
    std::size_t size = a.size();
    while (size > 1 && a[size - 1] == 0) --size;
    const auto& pr = first_primes(size + 2);
    auto exp_at = [&](std::size_t i) { return i < size ? a[i] : 0u; };
    // Odd indices 1..size; index `size` is the first prime beyond the support.
    for (std::size_t i = 1; i < size; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 1; j <= size; ++j) {
            if (j == i) continue;
            const unsigned c = (a[i] + 1) / (exp_at(j) + 2);
            if (pow_sat(pr[i], c) >= pr[j]) return false;
        }
    }
    std::size_t j = 1;
    while (exp_at(j) != 0) ++j;
    return two_cap_ok(exp_at(0), pr[j]);
}

bool is_reduced(const Factorization& f) {
    if (f.empty()) return true;
    // A prime outside the table cannot be part of a consecutive run of this length.
    const auto& pr = first_primes(f.size() + 2);
    std::vector<unsigned> a;
    for (auto& x : f.factors()) {
        if (!x.p.fits_ulong_p()) return false;
        const auto p = x.p.get_ui();
        const auto it = std::lower_bound(pr.begin(), pr.end(), p);
        if (it == pr.end() || *it != p) return false;
        const std::size_t idx = static_cast<std::size_t>(it - pr.begin());
        if (idx >= a.size()) a.resize(idx + 1, 0);
        a[idx] = x.e;
    }
    // Primes in the table but beyond the first size+1 entries leave gaps; the
    // pairwise test catches them.
    return is_reduced_exponents(a);
}

EnumerationStats for_each_reduced_odd_part(const BigNat& limit, const std::function<void(const OddPart&)>& visit) {
    if (limit < 1) return {};
    OddEnumerator en(limit, visit);
    return en.run();
}

BigNat count_reduced(const BigNat& limit) {
    return for_each_reduced_odd_part(limit, [](const OddPart&) {}).numbers;
}

std::vector<ReducedNumber> enumerate_reduced(const BigNat& limit) {
    std::vector<ReducedNumber> out;
    for_each_reduced_odd_part(limit, [&](const OddPart& op) {
        for (unsigned a = 0; a < op.two_count; ++a) {
            ReducedNumber r;
            r.exps.push_back(a);
            r.exps.insert(r.exps.end(), op.odd_exps->begin(), op.odd_exps->end());
            while (r.exps.size() > 1 && r.exps.back() == 0) r.exps.pop_back();
            BigNat v = *op.odd;
            mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), a);
            r.value = v;
            out.push_back(std::move(r));
        }
    });
    std::sort(out.begin(), out.end(), [](const ReducedNumber& x, const ReducedNumber& y) { return x.value < y.value; });
    return out;
}

}  // namespace mkf

#include <algorithm>
#include <cmath>
#include <queue>

#include "markoff/connectivity.hpp"
#include "markoff/reduction.hpp"

namespace mkf {

namespace {

using u64 = std::uint64_t;

double log_of(const BigNat& v) {
    long ex = 0;
    const double m = mpz_get_d_2exp(&ex, v.get_mpz_t());
    return std::log(m) + static_cast<double>(ex) * std::log(2.0);
}

Factorization factor_of(const std::vector<unsigned>& exps) {
    const auto& pr = first_primes(exps.size() + 1);
    std::vector<u64> ps(pr.begin(), pr.begin() + static_cast<long>(exps.size()));
    return Factorization::from_exponents(ps, exps);
}

struct Candidate {
    double ln;
    std::vector<unsigned> exps;  // index 0 is the exponent of 2
};

// Exact order on values; logs decide unless they are too close to call.
bool value_less(const Candidate& x, const Candidate& y) {
    if (std::abs(x.ln - y.ln) > 1e-9 * std::max(1.0, std::abs(x.ln))) return x.ln < y.ln;
    return factor_of(x.exps).value() < factor_of(y.exps).value();
}

// ln(8 (3C)^8) in doubles.
double log_threshold(double C) { return std::log(8.0) + 8 * std::log(3 * C); }

// Walks reduced n in [a, limit] and hands every n that may enter the while loop
// to keep(). Two float filters, both with a margin so no true entrant is lost:
// C_k <= tau/(a_max+1), then C_k from a double-precision polynomial.
template <class Keep>
void screen(const BigNat& a, const BigNat& limit, SweepStats& st, Keep&& keep) {
    const double margin = 1e-6;
    const double ln2 = std::log(2.0);
    const double ln_a = log_of(a);
    std::vector<double> c, nc, pre;
    for_each_reduced_odd_part(limit, [&](const OddPart& op) {
        const auto& ex = *op.odd_exps;
        double ltau = 0;
        unsigned om = 0, a_odd_max = 0;
        for (auto e : ex) {
            ltau += std::log(e + 1.0);
            om += e;
            a_odd_max = std::max(a_odd_max, e);
        }
        const double lodd = log_of(*op.odd);
        bool poly_ready = false;
        for (unsigned t = 0; t < op.two_count; ++t) {
            const double ln = lodd + t * ln2;
            if (ln < ln_a - 1e-9) continue;
            if (ln < ln_a + 1e-9) {
                BigNat v = *op.odd;
                mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), t);
                if (v < a) continue;
            }
            ++st.reduced_in_range;
            const double lC = ltau + std::log(t + 1.0) - std::log(std::max(t, a_odd_max) + 1.0);
            if (!(ln < std::log(8.0) + 8 * (std::log(3.0) + lC) + margin)) continue;
            ++st.prefilter_survivors;
            if (!poly_ready) {
                c.assign(1, 1.0);
                for (auto e : ex) {
                    nc.assign(c.size() + e, 0.0);
                    double window = 0;
                    for (std::size_t k = 0; k < nc.size(); ++k) {
                        if (k < c.size()) window += c[k];
                        if (k >= e + 1 && k - e - 1 < c.size()) window -= c[k - e - 1];
                        nc[k] = window;
                    }
                    c.swap(nc);
                }
                pre.assign(c.size() + 1, 0.0);
                for (std::size_t k = 0; k < c.size(); ++k) pre[k + 1] = pre[k] + c[k];
                poly_ready = true;
            }
            // C_k(2^t m) = sum_{i=0..t} c_{k-i}(m).
            const long k = static_cast<long>((om + t) / 2);
            const long lo = std::max(0L, k - static_cast<long>(t));
            const long hi = std::min(k, static_cast<long>(c.size()) - 1);
            const double C = hi >= lo ? pre[hi + 1] - pre[lo] : 0.0;
            if (!(C > 0 && ln < log_threshold(C) * (1 + 1e-12) + margin)) continue;
            ++st.float_survivors;
            keep(ln, t, ex);
        }
    });
}

}  // namespace

bool algorithm1_fails(const Factorization& f) {
    const auto poly = omega_polynomial(f);
    const BigNat& n = f.value();
    long k = f.omega_big() / 2;
    BigNat t, t8, c3;
    for (;;) {
        const BigNat& C = poly[static_cast<std::size_t>(k)];
        t = 3 * C;
        mpz_pow_ui(t8.get_mpz_t(), t.get_mpz_t(), 8);
        if (!(n + 2 < 8 * t8)) return false;
        mpz_pow_ui(c3.get_mpz_t(), C.get_mpz_t(), 3);
        const long j = max_omega_below(f, 162 * c3, true);
        if (j >= k) return true;
        k = j;
    }
}

SweepState algorithm1_sweep(const BigNat& a0, const BigNat& b, const SweepOptions& opt) {
    if (a0 < 2 || b < a0) throw std::invalid_argument("sweep needs 2 <= a <= b");
    SweepState st;
    st.a = a0;
    st.b = b;
    const BigNat limit = 4 * b - 2;
    auto heap_cmp = [](const Candidate& x, const Candidate& y) { return value_less(y, x); };  // min-heap

    std::optional<Candidate> ceiling;  // exclusive upper bound after a round with no failure
    for (;;) {
        ++st.stats.rounds;
        SweepStats round{};
        std::priority_queue<Candidate, std::vector<Candidate>, decltype(heap_cmp)> heap(heap_cmp);
        Candidate probe;
        screen(a0, limit, round, [&](double ln, unsigned t, const std::vector<unsigned>& ex) {
            if (heap.size() >= opt.batch && ln < heap.top().ln - 1e-9 * std::max(1.0, ln)) return;
            probe.ln = ln;
            probe.exps.assign(1, t);
            probe.exps.insert(probe.exps.end(), ex.begin(), ex.end());
            while (probe.exps.size() > 1 && probe.exps.back() == 0) probe.exps.pop_back();
            if (ceiling && !value_less(probe, *ceiling)) return;
            if (heap.size() < opt.batch) {
                heap.push(probe);
            } else if (value_less(heap.top(), probe)) {
                heap.pop();
                heap.push(probe);
            }
        });
        if (st.stats.rounds == 1) {
            st.stats.reduced_in_range = round.reduced_in_range;
            st.stats.prefilter_survivors = round.prefilter_survivors;
            st.stats.float_survivors = round.float_survivors;
        }
        if (heap.empty()) return st;

        std::vector<Candidate> batch;
        batch.reserve(heap.size());
        while (!heap.empty()) {
            batch.push_back(heap.top());
            heap.pop();
        }
        std::reverse(batch.begin(), batch.end());  // largest first

        // Descending chunks; the first failure in the first failing chunk is the largest.
        const std::size_t chunk = 64;
        for (std::size_t s = 0; s < batch.size(); s += chunk) {
            const std::size_t e = std::min(batch.size(), s + chunk);
            std::vector<char> fails(e - s, 0);
            if (opt.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
                for (std::size_t i = s; i < e; ++i) fails[i - s] = algorithm1_fails(factor_of(batch[i].exps));
            } else {
                for (std::size_t i = s; i < e; ++i) fails[i - s] = algorithm1_fails(factor_of(batch[i].exps));
            }
            st.stats.exact_evaluations += e - s;
            for (std::size_t i = s; i < e; ++i) {
                if (!fails[i - s]) continue;
                const BigNat n = factor_of(batch[i].exps).value();
                st.largest_failing = n;
                st.a = std::max(st.a, BigNat(n + 1));
                return st;
            }
        }
        ceiling = batch.back();
    }
}

SweepState algorithm1_sweep_reference(const BigNat& a0, const BigNat& b) {
    if (a0 < 2 || b < a0) throw std::invalid_argument("sweep needs 2 <= a <= b");
    SweepState st;
    st.a = a0;
    st.b = b;
    for (auto& r : enumerate_reduced(4 * b - 2)) {
        if (r.value < a0) continue;
        ++st.stats.reduced_in_range;
        ++st.stats.exact_evaluations;
        if (algorithm1_fails(r.factorization())) {
            if (!st.largest_failing || r.value > *st.largest_failing) st.largest_failing = r.value;
            st.a = std::max(st.a, BigNat(r.value + 1));
        }
    }
    return st;
}

}  // namespace mkf

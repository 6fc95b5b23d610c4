#include "markoff/connectivity.hpp"

#include <mpfr.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "markoff/lattice.hpp"

namespace mkf {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Thin RAII holder; every bound here is a handful of operations.
struct Mpfr {
    mpfr_t v;
    explicit Mpfr(mpfr_prec_t prec = 256) { mpfr_init2(v, prec); }
    ~Mpfr() { mpfr_clear(v); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
};

BigNat tau_big(const Factorization& f) { return tau_phi(f).tau; }

// 8p < (dX)^2 and 4d < 81 X^3.
bool first_interval_big(const BigNat& p, const BigNat& d, u64 X) {
    const BigNat x(static_cast<unsigned long>(X));
    const BigNat dx = d * x;
    if (!(8 * p < dx * dx)) return false;
    return 4 * d < 81 * x * x * x;
}

bool first_interval_u64(u64 p, u64 d, u64 X) {
    const u128 dx = static_cast<u128>(d) * X;
    if ((dx >> 64) == 0 && !(static_cast<u128>(8) * p < dx * dx)) return false;
    return static_cast<u128>(4) * d < static_cast<u128>(81) * X * X * X;
}

// Squared End-Game comparison: d phi < 8 sqrt(p) n tau  <=>  (d phi)^2 < 64 p n^2 tau^2.
struct EndGameSquare {
    BigNat phi, rhs;
    void set(const BigNat& p, const Factorization& f) {
        const auto tp = tau_phi(f);
        phi = tp.phi;
        rhs = 64 * p * f.value() * f.value() * tp.tau * tp.tau;
    }
    bool below(const BigNat& d) const {
        const BigNat l = d * phi;
        return l * l < rhs;
    }
};

bool second_lower(const BigNat& p, const BigNat& d, u64 X) {
    return p < 6 * BigNat(static_cast<unsigned long>(X)) * d;
}

// Membership of the common divisors 1 and 2 in M_d(n), for the union count.
template <class U>
struct CommonSmall {
    U n;
    U lam_half;  // lambda(n/2), 1 when n = 2
    void set(const lattice::Lattice<U>& L) {
        n = U(1);
        for (std::size_t i = 0; i < L.primes.size(); ++i)
            for (unsigned e = 0; e < L.exps[i]; ++e) n = n * L.primes[i];
        if (L.exps[0] >= 2)
            lam_half = U(2);
        else
            lam_half = L.primes.size() > 1 ? L.primes[1] : U(1);
    }
    unsigned members(const U& d) const {
        unsigned m = 0;
        if (d == U(1)) m |= 1;
        if (!(d < U(2)) && (n == U(2) || d < U(2) * lam_half)) m |= 2;
        return m;
    }
};

template <class U>
Verdict run_test(const BigNat& p, const Factorization& fm, const Factorization& fp, const TestOptions& opt) {
    Verdict v;
    v.p = p;
    v.mode = opt.mode;
    v.union_md = opt.union_md;
    const BigNat tm = tau_big(fm), tp = tau_big(fp);
    if (tm > BigNat(static_cast<unsigned long>(opt.cap)) || tp > BigNat(static_cast<unsigned long>(opt.cap)))
        throw CapExceeded("tau(p-1) or tau(p+1) above the divisor cap");
    v.tau_minus = tm.get_ui();
    v.tau_plus = tp.get_ui();

    const auto Lm = lattice::Lattice<U>::from(fm);
    const auto Lp = lattice::Lattice<U>::from(fp);
    const auto Tm = lattice::ProfileTable<U>::build(Lm);
    const auto Tp = lattice::ProfileTable<U>::build(Lp);
    CommonSmall<U> Cm, Cp;
    if (opt.union_md) {
        Cm.set(Lm);
        Cp.set(Lp);
    }

    const bool skip2 = p > second_interval_cutoff();
    v.second_interval_skipped = skip2;
    EndGameSquare Em, Ep;
    if (!skip2) {
        Em.set(p, fm);
        Ep.set(p, fp);
    }
    const bool small = std::is_same_v<U, u64> && mpz_sizeinbase(p.get_mpz_t(), 2) <= 62;
    const u64 p64 = small ? p.get_ui() : 0;

    auto value_at = [&](const U& d) -> u64 {
        if (opt.mode == Mode::Td) return Tm.count_upto(d) + Tp.count_upto(d);
        u64 x = Tm.maximal_count(d) + Tp.maximal_count(d);
        if (opt.union_md) x -= static_cast<u64>(std::popcount(Cm.members(d) & Cp.members(d)));
        return x;
    };

    auto examine = [&](const U& d, bool in_m, bool in_p) {
        const u64 X = value_at(d);
        bool i1;
        BigNat dbig;
        if constexpr (std::is_same_v<U, u64>) {
            if (small) {
                i1 = first_interval_u64(p64, d, X);
            } else {
                dbig = lattice::to_big(d);
                i1 = first_interval_big(p, dbig, X);
            }
        } else {
            dbig = lattice::to_big(d);
            i1 = first_interval_big(p, dbig, X);
        }
        int side = in_m ? -1 : 1;
        int interval = 0;
        if (i1) {
            interval = 1;
        } else if (!skip2) {
            bool lower;
            if constexpr (std::is_same_v<U, u64>) {
                lower = small ? static_cast<u128>(p64) < static_cast<u128>(6) * X * d : second_lower(p, lattice::to_big(d), X);
            } else {
                lower = second_lower(p, dbig, X);
            }
            if (lower) {
                if (dbig == 0) dbig = lattice::to_big(d);
                if (in_m && Em.below(dbig)) {
                    interval = 2;
                    side = -1;
                } else if (in_p && Ep.below(dbig)) {
                    interval = 2;
                    side = 1;
                }
            }
        }
        if (!interval) return;
        if (dbig == 0) dbig = lattice::to_big(d);
        ++v.failing_count;
        v.max_value = std::max(v.max_value, X);
        v.witnesses.push_back({dbig, side, interval, X});
    };

    // Merge the two sorted divisor lists; 1 and 2 appear in both.
    std::size_t i = 0, j = 0;
    while (i < Tm.vals.size() || j < Tp.vals.size()) {
        if (j == Tp.vals.size() || (i < Tm.vals.size() && Tm.vals[i] < Tp.vals[j])) {
            examine(Tm.vals[i++], true, false);
        } else if (i == Tm.vals.size() || Tp.vals[j] < Tm.vals[i]) {
            examine(Tp.vals[j++], false, true);
        } else {
            examine(Tm.vals[i], true, true);
            ++i;
            ++j;
        }
    }
    v.outcome = v.witnesses.empty() ? Outcome::Connected : Outcome::Inconclusive;
    return v;
}

}  // namespace

const char* to_string(Mode m) { return m == Mode::Td ? "Td" : "Md"; }
const char* to_string(Outcome o) { return o == Outcome::Connected ? "Connected" : "Inconclusive"; }

EndGameBound endgame_bound(const BigNat& p, int side, const Factorization& f) {
    if (f.value() != p + side) throw std::invalid_argument("factorization does not match p + side");
    const auto tp = tau_phi(f);
    Mpfr x, t;
    mpfr_set_z(x.v, p.get_mpz_t(), MPFR_RNDU);
    mpfr_sqrt(x.v, x.v, MPFR_RNDU);
    mpfr_mul_ui(x.v, x.v, 8, MPFR_RNDU);
    mpfr_mul_z(x.v, x.v, f.value().get_mpz_t(), MPFR_RNDU);
    mpfr_mul_z(x.v, x.v, tp.tau.get_mpz_t(), MPFR_RNDU);
    mpfr_set_z(t.v, tp.phi.get_mpz_t(), MPFR_RNDD);
    mpfr_div(x.v, x.v, t.v, MPFR_RNDU);
    return {p, side, mpfr_get_d(x.v, MPFR_RNDU)};
}

Verdict test_prime(const BigNat& p, const Factorization& fm, const Factorization& fp, const TestOptions& opt) {
    if (p < 3) throw std::invalid_argument("test_prime needs p >= 3");
    if (fm.value() != p - 1 || fp.value() != p + 1) throw std::invalid_argument("factorizations do not match p-1, p+1");
    switch (lattice::width_class(p + 1)) {
        case 64: return run_test<u64>(p, fm, fp, opt);
        case 128: return run_test<u128>(p, fm, fp, opt);
        default: return run_test<BigNat>(p, fm, fp, opt);
    }
}

bool witness_holds(const BigNat& p, const Factorization& fm, const Factorization& fp, const Witness& w,
                   const TestOptions& opt) {
    const Factorization& own = w.side < 0 ? fm : fp;
    if (w.d < 1 || own.value() % w.d != 0) return false;
    u64 X;
    if (opt.mode == Mode::Td) {
        X = BigNat(count_divisors_up_to(fm, w.d) + count_divisors_up_to(fp, w.d)).get_ui();
    } else if (!opt.union_md) {
        X = maximal_count(fm, w.d, opt.cap) + maximal_count(fp, w.d, opt.cap);
    } else {
        std::vector<BigNat> vals;
        for (auto& h : maximal_divisors(fm, w.d).members) vals.push_back(h.value);
        for (auto& h : maximal_divisors(fp, w.d).members) vals.push_back(h.value);
        std::sort(vals.begin(), vals.end());
        X = static_cast<u64>(std::unique(vals.begin(), vals.end()) - vals.begin());
    }
    if (X != w.value) return false;
    if (w.interval == 1) return first_interval_big(p, w.d, X);
    if (!second_lower(p, w.d, X)) return false;
    EndGameSquare E;
    E.set(p, own);
    return E.below(w.d);
}

std::optional<OneSideWitness> certify_failure_one_side(const BigNat& p, int side, const Factorization& f,
                                                       std::uint64_t cap) {
    if (f.value() != p + side) throw std::invalid_argument("factorization does not match p + side");
    const BigNat tau = tau_big(f);
    if (tau <= BigNat(static_cast<unsigned long>(cap))) {
        for (auto& e : maximal_divisor_profile(f, cap)) {
            if (first_interval_big(p, e.d, e.count)) return OneSideWitness{e.d, BigNat(static_cast<unsigned long>(e.count)), true};
        }
        return std::nullopt;
    }

    // Every divisor in (d/2, d] is maximal for d. With n = 2^a m, m odd, those
    // are exactly 2^j o for the odd o | m in (d/2^(a+1), d], one j per o. The odd
    // divisors are counted on a log histogram where each prime's log is rounded
    // down to a grid of width w; a divisor with grid sum S then has true log in
    // [S, S + loss), so counting S inside a shrunken window never overcounts.
    const unsigned a = f.factors().front().p == 2 ? f.factors().front().e : 0;
    const double ln2 = std::log(2.0);
    struct Part {
        double lg;
        unsigned e;
        BigNat q;
    };
    std::vector<Part> odd, all;
    unsigned omega_odd = 0;
    for (auto& x : f.factors()) {
        all.push_back({std::log(x.p.get_d()), x.e, x.p});
        if (x.p == 2) continue;
        odd.push_back(all.back());
        omega_odd += x.e;
    }
    double ln_m = 0;
    for (auto& x : odd) ln_m += x.lg * x.e;
    const double w = 0.2 / std::max(1u, omega_odd);
    const double loss = omega_odd * w + 1e-9;
    const double guard = 1e-8;
    // d < 81 m^3 / 4 <= 81 tau^3 / 4 bounds the logs that matter.
    long tex = 0;
    const double tmant = mpz_get_d_2exp(&tex, tau.get_mpz_t());
    const double ln_tau = std::log(tmant) + static_cast<double>(tex) * ln2;
    const double log_cap = std::min(ln_m, std::log(81.0 / 4) + 3 * ln_tau) + 1;
    const std::size_t bins = static_cast<std::size_t>(log_cap / w) + 2;
    if (bins > (std::size_t{1} << 26)) throw CapExceeded("log histogram too fine for one-side certificate");

    std::vector<u64> hist(bins, 0), prev;
    hist[0] = 1;
    for (auto& x : odd) {
        const std::size_t g = static_cast<std::size_t>(std::floor((x.lg - 1e-12 * (1 + x.lg)) / w));
        const std::size_t span = g * (x.e + 1);
        prev = hist;
        for (std::size_t i = g; i < bins; ++i) {
            hist[i] = prev[i] + hist[i - g];
            if (i >= span) hist[i] -= prev[i - span];
        }
    }
    std::vector<u64> prefix(bins + 1, 0);
    for (std::size_t i = 0; i < bins; ++i) prefix[i + 1] = prefix[i] + hist[i];

    // Lower bound for #{d' | n : d/2 < d' <= d} from the log of d.
    auto count_at = [&](double ld) -> u64 {
        const double lo = ld - (a + 1) * ln2 + guard, hi = ld - guard - loss;
        if (hi < 0 || hi < lo) return 0;
        const auto kmin = static_cast<std::size_t>(std::max(0.0, std::floor(lo / w) + 1));
        const auto kmax = std::min(bins - 1, static_cast<std::size_t>(std::floor(hi / w)));
        return kmin > kmax ? 0 : prefix[kmax + 1] - prefix[kmin];
    };

    // Actual divisors come from a meet-in-the-middle over a sub-lattice.
    using Entry = std::pair<double, u64>;
    constexpr std::size_t kHalf = std::size_t{1} << 12;
    std::vector<Part> order = all;
    std::sort(order.begin(), order.end(), [](const Part& x, const Part& y) { return x.q < y.q; });
    std::vector<Part> g1, g2;
    std::size_t s1 = 1, s2 = 1;
    for (auto& x : order) {
        auto* g = s1 <= s2 ? &g1 : &g2;
        auto* sz = s1 <= s2 ? &s1 : &s2;
        const unsigned e = static_cast<unsigned>(std::min<std::size_t>(x.e, kHalf / *sz - 1));
        if (e == 0) continue;
        g->push_back({x.lg, e, x.q});
        *sz *= e + 1;
    }
    auto expand = [](const std::vector<Part>& g) {
        std::vector<Entry> out(1, {0.0, 0});
        u64 radix = 1;
        for (auto& x : g) {
            const std::size_t cur = out.size();
            for (unsigned k = 1; k <= x.e; ++k)
                for (std::size_t i = 0; i < cur; ++i) out.push_back({out[i].first + k * x.lg, out[i].second + k * radix});
            radix *= x.e + 1;
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    auto decode = [](const std::vector<Part>& g, u64 code) {
        BigNat v = 1;
        for (auto& x : g) {
            const unsigned k = static_cast<unsigned>(code % (x.e + 1));
            code /= x.e + 1;
            for (unsigned t = 0; t < k; ++t) v *= x.q;
        }
        return v;
    };
    const auto A = expand(g1), B = expand(g2);
    // The divisor with the largest pair log not above target.
    auto divisor_below = [&](double target) -> std::optional<BigNat> {
        double best = -1;
        std::size_t bi = 0, bj = 0, jj = B.size();
        for (std::size_t ii = 0; ii < A.size(); ++ii) {
            while (jj > 0 && A[ii].first + B[jj - 1].first > target) --jj;
            if (jj == 0) break;
            if (A[ii].first + B[jj - 1].first > best) {
                best = A[ii].first + B[jj - 1].first;
                bi = ii;
                bj = jj - 1;
            }
        }
        if (best < 0) return std::nullopt;
        return decode(g1, A[bi].second) * decode(g2, B[bj].second);
    };

    // Rank grid points by the margin of both interval-1 inequalities under the
    // histogram count, then certify the best few with real divisors.
    long pex = 0;
    const double pmant = mpz_get_d_2exp(&pex, p.get_mpz_t());
    const double ln_lower = std::log(2.0) + 0.5 * (std::log(2 * pmant) + static_cast<double>(pex) * ln2);
    std::vector<std::pair<double, double>> cands;  // (margin, log x)
    for (std::size_t k = 1; k < bins; ++k) {
        const double lx = k * w;
        const u64 c = count_at(lx);
        if (c == 0) continue;
        const double lc = std::log(static_cast<double>(c));
        const double margin = std::min(lx + lc - ln_lower, std::log(81.0 / 4) + 3 * lc - lx);
        if (margin > 0) cands.push_back({margin, lx});
    }
    std::sort(cands.rbegin(), cands.rend());
    constexpr std::size_t kTries = 8;
    for (std::size_t i = 0; i < std::min(kTries, cands.size()); ++i) {
        auto d = divisor_below(cands[i].second);
        if (!d) continue;
        long ex = 0;
        const double mant = mpz_get_d_2exp(&ex, d->get_mpz_t());
        const u64 m = count_at(std::log(mant) + static_cast<double>(ex) * ln2);
        if (m && first_interval_big(p, *d, m)) return OneSideWitness{*d, BigNat(static_cast<unsigned long>(m)), false};
    }
    return std::nullopt;
}

RealBound nicolas_tau_bound(const BigNat& n) {
    if (n < 16) throw DomainError("tau bound needs n >= 16");
    Mpfr L, LLd, t1, t2;
    mpfr_set_z(L.v, n.get_mpz_t(), MPFR_RNDU);
    mpfr_log(L.v, L.v, MPFR_RNDU);
    // log log n rounded down keeps both terms rounded up.
    Mpfr Ld;
    mpfr_set_z(Ld.v, n.get_mpz_t(), MPFR_RNDD);
    mpfr_log(Ld.v, Ld.v, MPFR_RNDD);
    mpfr_log(LLd.v, Ld.v, MPFR_RNDD);
    mpfr_const_log2(t1.v, MPFR_RNDU);
    mpfr_mul(t1.v, t1.v, L.v, MPFR_RNDU);
    mpfr_div(t1.v, t1.v, LLd.v, MPFR_RNDU);
    mpfr_set_d(t2.v, 1.342, MPFR_RNDU);
    mpfr_mul(t2.v, t2.v, L.v, MPFR_RNDU);
    mpfr_div(t2.v, t2.v, LLd.v, MPFR_RNDU);
    mpfr_div(t2.v, t2.v, LLd.v, MPFR_RNDU);
    mpfr_add(t1.v, t1.v, t2.v, MPFR_RNDU);
    RealBound r;
    r.log_value = mpfr_get_d(t1.v, MPFR_RNDU);
    mpfr_exp(t1.v, t1.v, MPFR_RNDU);
    r.value = mpfr_get_d(t1.v, MPFR_RNDU);
    return r;
}

bool first_interval_empty_above(const BigNat& p) {
    Mpfr lhs, L, LL, t, rhs;
    mpfr_set_ui(lhs.v, 2, MPFR_RNDU);
    mpfr_sqrt(lhs.v, lhs.v, MPFR_RNDU);
    mpfr_mul_ui(lhs.v, lhs.v, 81, MPFR_RNDU);
    mpfr_log(lhs.v, lhs.v, MPFR_RNDU);
    mpfr_mul_ui(lhs.v, lhs.v, 2, MPFR_RNDU);

    mpfr_set_z(L.v, p.get_mpz_t(), MPFR_RNDD);
    mpfr_log(L.v, L.v, MPFR_RNDD);
    mpfr_log(LL.v, L.v, MPFR_RNDD);
    if (mpfr_cmp_ui(LL.v, 1) <= 0) return false;
    // 1 - 8 log 2 / LL - 10.736 / LL^2, rounded down.
    mpfr_const_log2(t.v, MPFR_RNDU);
    mpfr_mul_ui(t.v, t.v, 8, MPFR_RNDU);
    mpfr_div(t.v, t.v, LL.v, MPFR_RNDU);
    mpfr_ui_sub(rhs.v, 1, t.v, MPFR_RNDD);
    mpfr_set_d(t.v, 10.736, MPFR_RNDU);
    mpfr_div(t.v, t.v, LL.v, MPFR_RNDU);
    mpfr_div(t.v, t.v, LL.v, MPFR_RNDU);
    mpfr_sub(rhs.v, rhs.v, t.v, MPFR_RNDD);
    if (mpfr_sgn(rhs.v) <= 0) return false;
    mpfr_mul(rhs.v, rhs.v, L.v, MPFR_RNDD);
    return mpfr_lessequal_p(lhs.v, rhs.v) != 0;
}

bool second_interval_empty_above(const BigNat& p) {
    const mpfr_prec_t prec = 64 + 4 * static_cast<mpfr_prec_t>(mpz_sizeinbase(p.get_mpz_t(), 2));
    Mpfr lhs(prec), t(prec), rhs(prec);
    const RealBound B = nicolas_tau_bound(p + 1);
    // B^2 via its upward log: exp(2 log B).
    mpfr_set_d(t.v, 2 * B.log_value, MPFR_RNDU);
    mpfr_exp(t.v, t.v, MPFR_RNDU);
    mpfr_set_z(lhs.v, p.get_mpz_t(), MPFR_RNDU);
    mpfr_sqrt(lhs.v, lhs.v, MPFR_RNDU);
    mpfr_mul_ui(lhs.v, lhs.v, 192, MPFR_RNDU);
    const BigNat p1 = p + 1;
    mpfr_mul_z(lhs.v, lhs.v, p1.get_mpz_t(), MPFR_RNDU);
    mpfr_mul(lhs.v, lhs.v, t.v, MPFR_RNDU);
    // log log (p+1), rounded up.
    mpfr_set_z(t.v, p1.get_mpz_t(), MPFR_RNDU);
    mpfr_log(t.v, t.v, MPFR_RNDU);
    mpfr_log(t.v, t.v, MPFR_RNDU);
    mpfr_mul(lhs.v, lhs.v, t.v, MPFR_RNDU);
    const BigNat p2 = p * p;
    mpfr_set_z(rhs.v, p2.get_mpz_t(), MPFR_RNDD);
    return mpfr_lessequal_p(lhs.v, rhs.v) != 0;
}

const BigNat& second_interval_cutoff() {
    static const BigNat cut = [] {
        BigNat c;
        mpz_ui_pow_ui(c.get_mpz_t(), 10, 141);
        // Without the analytic check the interval is never skipped.
        if (!second_interval_empty_above(c)) {
            mpz_ui_pow_ui(c.get_mpz_t(), 10, 100000);
        }
        return c;
    }();
    return cut;
}

}  // namespace mkf

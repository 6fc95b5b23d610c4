#include "markoff/divisors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "markoff/lattice.hpp"

namespace mkf {

unsigned DivisorHandle::omega() const {
    unsigned s = 0;
    for (auto x : e) s += x;
    return s;
}

BigNat lambda_of_cofactor(const Factorization& n, const DivisorHandle& d) {
    for (std::size_t i = 0; i < n.size(); ++i)
        if (d.e[i] < n.factors()[i].e) return n.factors()[i].p;
    return 1;
}

std::vector<DivisorHandle> all_divisors(const Factorization& f, std::uint64_t cap) {
    const BigNat tau = tau_phi(f).tau;
    if (tau > cap) throw CapExceeded("divisor count " + tau.get_str() + " exceeds cap");
    std::vector<DivisorHandle> out(1);
    out[0].e.assign(f.size(), 0);
    out[0].value = 1;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::size_t cur = out.size();
        for (std::size_t j = 0; j < cur; ++j) {
            DivisorHandle h = out[j];
            for (unsigned e = 1; e <= f.factors()[i].e; ++e) {
                h.e[i] = e;
                h.value *= f.factors()[i].p;
                out.push_back(h);
            }
        }
    }
    return out;
}

BigNat count_divisors_up_to(const Factorization& f, const BigNat& x) {
    if (x < 1) return 0;
    switch (lattice::width_class(std::max(f.value(), x))) {
        case 64: {
            auto L = lattice::Lattice<std::uint64_t>::from(f);
            return BigNat(static_cast<unsigned long>(
                lattice::count_upto_dfs<std::uint64_t>(L, lattice::from_big<std::uint64_t>(x), 0, 1)));
        }
        case 128: {
            auto L = lattice::Lattice<lattice::u128>::from(f);
            return BigNat(static_cast<unsigned long>(
                lattice::count_upto_dfs<lattice::u128>(L, lattice::from_big<lattice::u128>(x), 0, 1)));
        }
        default: {
            auto L = lattice::Lattice<BigNat>::from(f);
            return BigNat(static_cast<unsigned long>(lattice::count_upto_dfs<BigNat>(L, x, 0, BigNat(1))));
        }
    }
}

MaximalDivisorSet maximal_divisors(const Factorization& f, const BigNat& x) {
    MaximalDivisorSet s{x, {}, f};
    // Depth-first over exponent vectors with the running value kept <= x.
    DivisorHandle h;
    h.e.assign(f.size(), 0);
    h.value = 1;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == f.size()) {
            const BigNat lam = lambda_of_cofactor(f, h);
            if (lam == 1 || h.value * lam > x) s.members.push_back(h);
            return;
        }
        const BigNat saved = h.value;
        for (unsigned e = 0; e <= f.factors()[i].e; ++e) {
            h.e[i] = e;
            self(self, i + 1);
            if (e == f.factors()[i].e) break;
            h.value *= f.factors()[i].p;
            if (h.value > x) break;
        }
        h.e[i] = 0;
        h.value = saved;
    };
    if (x >= 1) rec(rec, 0);
    std::sort(s.members.begin(), s.members.end(),
              [](const DivisorHandle& a, const DivisorHandle& b) { return a.value < b.value; });
    return s;
}

namespace {

template <class U>
std::vector<ProfileEntry> profile_impl(const Factorization& f) {
    auto L = lattice::Lattice<U>::from(f);
    auto T = lattice::ProfileTable<U>::build(L);
    std::vector<ProfileEntry> out;
    out.reserve(T.vals.size());
    std::size_t b = 0;
    for (std::size_t a = 0; a < T.vals.size(); ++a) {
        while (b < T.thr.size() && !(T.vals[a] < T.thr[b])) ++b;
        out.push_back({lattice::to_big<U>(T.vals[a]), static_cast<std::uint64_t>(a + 1 - b)});
    }
    return out;
}

template <class U>
std::uint64_t count_impl(const Factorization& f, const BigNat& x) {
    auto L = lattice::Lattice<U>::from(f);
    auto T = lattice::ProfileTable<U>::build(L);
    return T.maximal_count(lattice::from_big<U>(x));
}

}  // namespace

std::vector<ProfileEntry> maximal_divisor_profile(const Factorization& f, std::uint64_t cap) {
    const BigNat tau = tau_phi(f).tau;
    if (tau > cap) throw CapExceeded("divisor count " + tau.get_str() + " exceeds cap");
    switch (lattice::width_class(f.value())) {
        case 64: return profile_impl<std::uint64_t>(f);
        case 128: return profile_impl<lattice::u128>(f);
        default: return profile_impl<BigNat>(f);
    }
}

std::uint64_t maximal_count(const Factorization& f, const BigNat& x, std::uint64_t cap) {
    const BigNat tau = tau_phi(f).tau;
    if (tau > cap) throw CapExceeded("divisor count " + tau.get_str() + " exceeds cap");
    if (x < 1) return 0;
    if (x >= f.value()) return 1;
    switch (lattice::width_class(f.value())) {
        case 64: return count_impl<std::uint64_t>(f, x);
        case 128: return count_impl<lattice::u128>(f, x);
        default: return count_impl<BigNat>(f, x);
    }
}

std::vector<BigNat> omega_polynomial(const Factorization& f) {
    std::vector<BigNat> c(1, BigNat(1));
    for (auto& x : f.factors()) {
        const std::size_t deg = c.size() - 1 + x.e;
        std::vector<BigNat> nc(deg + 1, BigNat(0));
        BigNat window = 0;
        // nc[k] = sum_{i=0..a} c[k-i], kept as a sliding window.
        for (std::size_t k = 0; k <= deg; ++k) {
            if (k < c.size()) window += c[k];
            if (k >= x.e + 1 && k - x.e - 1 < c.size()) window -= c[k - x.e - 1];
            nc[k] = window;
        }
        c.swap(nc);
    }
    return c;
}

BigNat count_omega_k(const Factorization& f, long k) {
    if (k < 0 || static_cast<unsigned long>(k) > f.omega_big()) return 0;
    return omega_polynomial(f)[static_cast<std::size_t>(k)];
}

unsigned max_omega_below(const Factorization& f, const BigNat& x, bool strict) {
    BigNat prod = 1;
    unsigned count = 0;
    for (auto& pp : f.factors()) {
        for (unsigned e = 0; e < pp.e; ++e) {
            BigNat next = prod * pp.p;
            if (strict ? !(next < x) : !(next <= x)) return count;
            prod.swap(next);
            ++count;
        }
    }
    return count;
}

namespace {

double log_big(const BigNat& v) {
    long e = 0;
    const double m = mpz_get_d_2exp(&e, v.get_mpz_t());
    return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

GrowthRatio growth_frame(const Factorization& f, unsigned num, unsigned den) {
    if (num == 0 || num >= den) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (f.value() < 16) throw std::invalid_argument("n too small for log log n");
    GrowthRatio g;
    g.log_n = log_big(f.value());
    g.log_log_n = std::log(g.log_n);
    BigNat pw;
    mpz_pow_ui(pw.get_mpz_t(), f.value().get_mpz_t(), num);
    mpz_root(g.threshold.get_mpz_t(), pw.get_mpz_t(), den);
    return g;
}

double normalizer(const GrowthRatio& g, unsigned num, unsigned den) {
    const double a = static_cast<double>(num) / den;
    const double h = -a * std::log(a) - (1 - a) * std::log(1 - a);
    return h * g.log_n / g.log_log_n;
}

}  // namespace

GrowthRatio maximal_growth_ratio(const Factorization& f, unsigned num, unsigned den, std::uint64_t cap) {
    GrowthRatio g = growth_frame(f, num, den);
    double lc;
    if (tau_phi(f).tau <= cap) {
        lc = std::log(static_cast<double>(maximal_count(f, g.threshold, cap)));
    } else {
        // Chain bound: members of M_x have Omega at most max Omega(d <= x), and
        // at least min Omega(d' > x) - 1 since d lambda(n/d) is such a d'. C_k
        // with k nearest Omega(n)/2 inside that range bounds |M_x|.
        g.surrogate = true;
        const long om = f.omega_big();
        long k;
        if (2 * num <= den) {
            k = std::min<long>(max_omega_below(f, g.threshold, false), om / 2);
        } else {
            // d' > x  <=>  n/d' < n/x.
            BigNat co, rem;
            mpz_fdiv_qr(co.get_mpz_t(), rem.get_mpz_t(), f.value().get_mpz_t(), g.threshold.get_mpz_t());
            const long low = om - static_cast<long>(max_omega_below(f, co, rem == 0)) - 1;
            k = std::max<long>(low, (om + 1) / 2);
        }
        lc = log_big(count_omega_k(f, k));
    }
    g.ratio = lc / normalizer(g, num, den);
    return g;
}

GrowthRatio divisors_below_growth_ratio(const Factorization& f, unsigned num, unsigned den) {
    GrowthRatio g = growth_frame(f, num, den);
    g.ratio = log_big(count_divisors_up_to(f, g.threshold)) / normalizer(g, num, den);
    return g;
}

}  // namespace mkf

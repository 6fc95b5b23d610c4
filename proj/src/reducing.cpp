#include <algorithm>
#include <map>

#include "markoff/divisors.hpp"
#include "markoff/reduction.hpp"

namespace mkf {

namespace {

std::size_t index_of(const Factorization& F, const BigNat& p) {
    for (std::size_t i = 0; i < F.size(); ++i)
        if (F.factors()[i].p == p) return i;
    return F.size();
}

unsigned exp_in(const Factorization& F, const Exps& e, const BigNat& p) {
    const auto i = index_of(F, p);
    return i < F.size() ? e[i] : 0u;
}

Exps exps_of(const Factorization& F, const std::map<BigNat, unsigned>& want) {
    Exps e(F.size(), 0);
    for (auto& [p, x] : want) {
        if (x == 0) continue;
        const auto i = index_of(F, p);
        if (i == F.size()) throw PreconditionViolated("prime " + p.get_str() + " not in codomain");
        e[i] = x;
    }
    return e;
}

BigNat value_of(const Factorization& F, const Exps& e) {
    BigNat v = 1, t;
    for (std::size_t i = 0; i < F.size(); ++i) {
        mpz_pow_ui(t.get_mpz_t(), F.factors()[i].p.get_mpz_t(), e[i]);
        v *= t;
    }
    return v;
}

// Least prime of the cofactor F / e, or 1 when e is all of F.
BigNat cofactor_lambda(const Factorization& F, const Exps& e) {
    for (std::size_t i = 0; i < F.size(); ++i)
        if (e[i] < F.factors()[i].e) return F.factors()[i].p;
    return 1;
}

BigNat cofactor_value(const Factorization& F, const Exps& e) {
    Exps c(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) c[i] = F.factors()[i].e - e[i];
    return value_of(F, c);
}

BigNat odd_value(const Factorization& F, const Exps& e) {
    BigNat v = 1, t;
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (F.factors()[i].p == 2) continue;
        mpz_pow_ui(t.get_mpz_t(), F.factors()[i].p.get_mpz_t(), e[i]);
        v *= t;
    }
    return v;
}

bool odd_prime(const BigNat& p) { return p > 2 && is_prime(p); }

BigNat powu(const BigNat& b, unsigned e) {
    BigNat r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

}  // namespace

ReducingCheck verify_reducing(const ReducingFunctionSpec& f, std::uint64_t cap) {
    const auto& n = f.domain;
    const auto& m = f.codomain;
    const auto divs = all_divisors(n, cap);
    // Clauses are checked in order over all divisors, so the reported clause is
    // the first one that fails anywhere; (c) needs every image first.
    std::vector<Exps> images;
    images.reserve(divs.size());
    for (auto& d : divs) {
        const Exps fe = f.map(d.e);
        ReducingCheck bad;
        bad.ok = false;
        bad.d = d.value;
        if (fe.size() != m.size()) {
            bad.clause = 'm';
            bad.detail = "image has wrong arity";
            return bad;
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (fe[i] > m.factors()[i].e) {
                bad.clause = 'm';
                bad.detail = "f(d) does not divide m";
                return bad;
            }
        }
        images.push_back(fe);
    }
    for (char clause : {'a', 'b'}) {
        for (std::size_t i = 0; i < divs.size(); ++i) {
            const auto& d = divs[i];
            const Exps& fe = images[i];
            ReducingCheck bad;
            bad.ok = false;
            bad.d = d.value;
            bad.clause = clause;
            if (clause == 'a') {
                const BigNat fv = value_of(m, fe);
                if (fv > d.value) {
                    bad.detail = "f(d) = " + fv.get_str() + " > d";
                    return bad;
                }
                continue;
            }
            const BigNat A = cofactor_value(m, fe);
            const BigNat B = cofactor_value(n, d.e);
            const BigNat lA = cofactor_lambda(m, fe);
            const BigNat lB = cofactor_lambda(n, d.e);
            if (A > B || A * lB > B * lA) {
                bad.detail = "(m/f(d))/(n/d) = " + A.get_str() + "/" + B.get_str();
                return bad;
            }
        }
    }
    std::map<BigNat, BigNat> odd_seen;  // odd part of f(d) -> odd part of d
    for (std::size_t i = 0; i < divs.size(); ++i) {
        const BigNat key = odd_value(m, images[i]);
        const BigNat od = odd_value(n, divs[i].e);
        auto [it, fresh] = odd_seen.emplace(key, od);
        if (!fresh && it->second != od) {
            ReducingCheck bad;
            bad.ok = false;
            bad.clause = 'c';
            bad.d = divs[i].value;
            bad.d2 = it->second;
            bad.detail = "odd parts of f(d) agree but odd parts of d differ";
            return bad;
        }
    }
    return {};
}

ReducingFunctionSpec identity_reducing(const Factorization& n) {
    return {n, n, [](const Exps& e) { return e; }, "id"};
}

ReducingFunctionSpec make_prime_swap(const BigNat& q, const BigNat& p, unsigned a) {
    if (!odd_prime(p) || !is_prime(q) || p > q) throw PreconditionViolated("prime swap needs odd p <= q");
    auto dom = Factorization::from_pairs({{q, a}});
    auto cod = Factorization::from_pairs({{p, a}});
    return {dom, cod, [](const Exps& e) { return e; }, "swap(" + q.get_str() + "->" + p.get_str() + ")"};
}

ReducingFunctionSpec make_exponent_shift(const BigNat& p, const BigNat& q, unsigned a, unsigned b) {
    if (!odd_prime(p) || !odd_prime(q) || p == q) throw PreconditionViolated("exponent shift needs distinct odd primes");
    const unsigned c = (a + 1) / (b + 2);
    if (!(q < powu(p, c)))
        throw PreconditionViolated("q < p^c fails with c = " + std::to_string(c));
    auto dom = Factorization::from_pairs({{p, a}, {q, b}});
    auto cod = Factorization::from_pairs({{p, a - c}, {q, b + 1}});
    auto map = [dom, cod, p, q, b, c](const Exps& e) {
        const unsigned i = exp_in(dom, e, p), j = exp_in(dom, e, q);
        if (static_cast<long>(i) < static_cast<long>(b + 1 - j) * static_cast<long>(c))
            return exps_of(cod, {{p, i}, {q, j}});
        return exps_of(cod, {{p, i - c}, {q, j + 1}});
    };
    return {dom, cod, map, "shift(" + p.get_str() + "," + q.get_str() + ")"};
}

ReducingFunctionSpec make_two_adic(const BigNat& p, const std::vector<BigNat>& qs, unsigned a) {
    if (!is_prime(p)) throw PreconditionViolated("p must be prime");
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (!is_prime(qs[i]) || !(qs[i] > (i ? qs[i - 1] : p))) throw PreconditionViolated("need p < q_1 < ... < q_k primes");
    }
    auto dom = Factorization::from_pairs({{p, a}});
    if (qs.empty()) return identity_reducing(dom);
    const std::size_t k = qs.size();
    BigNat Q = 1;  // q_1 ... q_{k-1}
    for (std::size_t i = 0; i + 1 < k; ++i) Q *= qs[i];
    if (a < 2 || !(powu(p, a - 2) > Q * qs[k - 1] * qs[k - 1]))
        throw PreconditionViolated("p^(a-2) > q_1...q_{k-1} q_k^2 fails");
    // b = floor((a - log_p Q)/2): the largest b with Q <= p^(a-2b).
    unsigned b = 0;
    while (2 * (b + 1) <= a && Q <= powu(p, a - 2 * (b + 1))) ++b;
    // c_j = ceil(log_p(q_1...q_j)) for j < k, c_k = a - b.
    std::vector<unsigned> cj(k + 1);
    BigNat prod = 1;
    for (std::size_t j = 0; j < k; ++j) {
        unsigned c = 0;
        while (powu(p, c) < prod) ++c;
        cj[j] = c;
        prod *= qs[j];
    }
    cj[k] = a - b;
    std::vector<PrimePower> cp{{p, b}};
    for (auto& q : qs) cp.push_back({q, 1});
    auto cod = Factorization::from_pairs(cp);
    auto map = [dom, cod, p, qs, a, b, cj, k](const Exps& e) {
        const unsigned i = exp_in(dom, e, p);
        std::size_t j = 0;
        for (std::size_t t = 0; t <= k; ++t)
            if (cj[t] <= a - i) j = t;
        std::map<BigNat, unsigned> w;
        w[p] = static_cast<unsigned>(static_cast<long>(b) + cj[j] + i - a);
        for (std::size_t t = j; t < k; ++t) w[qs[t]] = 1;
        return exps_of(cod, w);
    };
    return {dom, cod, map, "two_adic(" + p.get_str() + ")"};
}

ReducingFunctionSpec product_reducing(const ReducingFunctionSpec& f1, const ReducingFunctionSpec& f2) {
    BigNat g1, g2;
    mpz_gcd(g1.get_mpz_t(), f1.domain.value().get_mpz_t(), f2.domain.value().get_mpz_t());
    mpz_gcd(g2.get_mpz_t(), f1.codomain.value().get_mpz_t(), f2.codomain.value().get_mpz_t());
    if (g1 != 1 || g2 != 1) throw PreconditionViolated("product of reducing functions needs coprime factors");
    std::vector<PrimePower> dp = f1.domain.factors(), cp = f1.codomain.factors();
    dp.insert(dp.end(), f2.domain.factors().begin(), f2.domain.factors().end());
    cp.insert(cp.end(), f2.codomain.factors().begin(), f2.codomain.factors().end());
    auto dom = Factorization::from_pairs(dp);
    auto cod = Factorization::from_pairs(cp);
    auto map = [dom, cod, f1, f2](const Exps& e) {
        auto part = [&](const Factorization& sub) {
            Exps s(sub.size());
            for (std::size_t i = 0; i < sub.size(); ++i) s[i] = exp_in(dom, e, sub.factors()[i].p);
            return s;
        };
        const Exps r1 = f1.map(part(f1.domain));
        const Exps r2 = f2.map(part(f2.domain));
        Exps out(cod.size(), 0);
        for (std::size_t i = 0; i < f1.codomain.size(); ++i) out[index_of(cod, f1.codomain.factors()[i].p)] = r1[i];
        for (std::size_t i = 0; i < f2.codomain.size(); ++i) out[index_of(cod, f2.codomain.factors()[i].p)] = r2[i];
        return out;
    };
    return {dom, cod, map, f1.name + "*" + f2.name};
}

ReducingFunctionSpec compose_reducing(const ReducingFunctionSpec& f, const ReducingFunctionSpec& g) {
    if (!(f.codomain == g.domain)) throw DomainMismatch("codomain " + f.codomain.str() + " != domain " + g.domain.str());
    auto ff = f.map, gg = g.map;
    return {f.domain, g.codomain, [ff, gg](const Exps& e) { return gg(ff(e)); }, g.name + " o " + f.name};
}

BigNat apply_reducing(const ReducingFunctionSpec& f, const BigNat& d) {
    Exps e(f.domain.size(), 0);
    BigNat r = d;
    for (std::size_t i = 0; i < f.domain.size(); ++i) {
        const auto& p = f.domain.factors()[i].p;
        while (mpz_divisible_p(r.get_mpz_t(), p.get_mpz_t())) {
            r /= p;
            ++e[i];
        }
    }
    if (r != 1) throw DomainMismatch(d.get_str() + " does not divide " + f.domain.value().get_str());
    return value_of(f.codomain, f.map(e));
}

ReductionTrace reduce_to_reduced(const Factorization& n) {
    if (n.value() < 2) throw PreconditionViolated("reduce_to_reduced needs n >= 2");
    ReductionTrace tr{n, identity_reducing(n), n, 0, {}};
    Factorization cur = n;
    const auto& pr = first_primes(64);

    // Exponent-shift moves, smallest target prime first, until none applies.
    for (;;) {
        // First odd prime not dividing cur bounds the useful targets.
        std::size_t zi = 1;
        while (zi < pr.size() && cur.exponent_of(BigNat(pr[zi])) > 0) ++zi;
        const auto& plist = first_primes(zi + 2);
        bool moved = false;
        for (std::size_t qi = 1; qi <= zi && !moved; ++qi) {
            const BigNat q(plist[qi]);
            const unsigned b = cur.exponent_of(q);
            for (auto& x : cur.factors()) {
                if (x.p == 2 || x.p == q) continue;
                const unsigned c = (x.e + 1) / (b + 2);
                if (c == 0 || !(q < powu(x.p, c))) continue;
                auto shift = make_exponent_shift(x.p, q, x.e, b);
                std::vector<PrimePower> rest;
                for (auto& y : cur.factors())
                    if (y.p != x.p && y.p != q) rest.push_back(y);
                auto step = product_reducing(shift, identity_reducing(Factorization::from_pairs(rest)));
                tr.moves = compose_reducing(tr.moves, step);
                cur = step.codomain;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    tr.moved = cur;

    std::vector<PrimePower> odd;
    for (auto& x : cur.factors())
        if (x.p != 2) odd.push_back(x);
    const auto mprime = Factorization::from_pairs(odd);
    unsigned a = 0;
    while (powu(2, a) * mprime.value() < n.value()) ++a;
    tr.two_power = a;

    // k: index (0-based, 2 first) of the largest prime of 2^a m'.
    const auto& plist = first_primes(mprime.size() + 64);
    std::size_t k = 0;
    for (auto& x : mprime.factors()) {
        const auto it = std::lower_bound(plist.begin(), plist.end(), x.p.get_ui());
        k = std::max<std::size_t>(k, static_cast<std::size_t>(it - plist.begin()));
    }
    std::size_t ell = k;
    if (a >= 2) {
        const BigNat cap = powu(2, a - 2);
        BigNat run = 1;  // p_{k+1} ... p_{l-1}
        for (std::size_t l = k + 1;; ++l) {
            const BigNat pl(first_primes(l + 2)[l]);
            if (run * pl * pl < cap) {
                ell = l;
                run *= pl;
            } else {
                break;
            }
        }
    }
    BigNat body = mprime.value();
    const auto& pl = first_primes(ell + 2);
    for (std::size_t l = k + 1; l <= ell; ++l) body *= pl[l];
    const BigNat floor_target = powu(2, a) * mprime.value();
    unsigned a1 = 0;
    while (powu(2, a1) * body < floor_target) ++a1;

    ReducedNumber m;
    m.exps.assign(ell + 1, 0);
    m.exps[0] = a1;
    for (auto& x : mprime.factors()) {
        const auto it = std::lower_bound(pl.begin(), pl.end(), x.p.get_ui());
        m.exps[static_cast<std::size_t>(it - pl.begin())] = x.e;
    }
    for (std::size_t l = k + 1; l <= ell; ++l) m.exps[l] = 1;
    while (m.exps.size() > 1 && m.exps.back() == 0) m.exps.pop_back();
    m.value = powu(2, a1) * body;
    tr.m = m;
    return tr;
}

}  // namespace mkf

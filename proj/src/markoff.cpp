#include "markoff/markoff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "markoff/divisors.hpp"

namespace mkf {

namespace {

using u128 = unsigned __int128;

std::vector<u64> prime_list(const Factorization& f) {
    std::vector<u64> out;
    for (auto& x : f.factors()) out.push_back(x.p.get_ui());
    return out;
}

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t x) {
        std::uint32_t r = x;
        while (parent[r] != r) r = parent[r];
        while (parent[x] != r) {
            const auto nx = parent[x];
            parent[x] = r;
            x = nx;
        }
        return r;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

Field::Field(u64 p) : p_(p), delta_(0) {
    if (p < 2) throw std::invalid_argument("Field: p must be prime");
    if (p == 2) return;
    for (u64 d = 2; d < p; ++d) {
        if (!is_square(d)) {
            delta_ = d;
            break;
        }
    }
}

u64 Field::add(u64 a, u64 b) const {
    const u64 s = a + b;
    return s >= p_ ? s - p_ : s;
}
u64 Field::sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
u64 Field::mul(u64 a, u64 b) const { return static_cast<u64>(static_cast<u128>(a) * b % p_); }

u64 Field::pow(u64 a, u64 e) const {
    u64 r = 1 % p_;
    a %= p_;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

u64 Field::inv(u64 a) const {
    if (a % p_ == 0) throw std::domain_error("inverse of zero");
    return pow(a, p_ - 2);
}

bool Field::is_square(u64 a) const {
    a %= p_;
    if (a == 0 || p_ == 2) return true;
    return pow(a, (p_ - 1) / 2) == 1;
}

std::optional<u64> Field::sqrt(u64 a) const {
    a %= p_;
    if (a == 0 || p_ == 2) return a;
    if (!is_square(a)) return std::nullopt;
    if (p_ % 4 == 3) return pow(a, (p_ + 1) / 4);
    u64 q = p_ - 1;
    unsigned s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    u64 z = delta_;
    u64 m = s, c = pow(z, q), t = pow(a, q), r = pow(a, (q + 1) / 2);
    while (t != 1) {
        u64 i = 0, tt = t;
        while (tt != 1) {
            tt = mul(tt, tt);
            ++i;
        }
        u64 b = c;
        for (u64 j = 0; j + i + 1 < m; ++j) b = mul(b, b);
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    return r;
}

Field::Ext Field::add(const Ext& a, const Ext& b) const { return {add(a.u, b.u), add(a.v, b.v)}; }
Field::Ext Field::sub(const Ext& a, const Ext& b) const { return {sub(a.u, b.u), sub(a.v, b.v)}; }
Field::Ext Field::mul(const Ext& a, const Ext& b) const {
    return {add(mul(a.u, b.u), mul(delta_, mul(a.v, b.v))), add(mul(a.u, b.v), mul(a.v, b.u))};
}

Field::Ext Field::pow(Ext a, u64 e) const {
    Ext r{1 % p_, 0};
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Field::Ext Field::inv(const Ext& a) const {
    const u64 norm = sub(mul(a.u, a.u), mul(delta_, mul(a.v, a.v)));
    const u64 ni = inv(norm);
    return {mul(a.u, ni), mul(sub(0, a.v), ni)};
}

Field::Ext Field::sqrt_ext(u64 a) const {
    a %= p_;
    if (auto r = sqrt(a)) return {*r, 0};
    return {0, *sqrt(mul(a, inv(delta_)))};
}

Field::Ext Field::root_of_trace(u64 x) const {
    const u64 disc = sub(mul(x, x), 4 % p_);
    const Ext s = sqrt_ext(disc);
    const u64 half = inv(2);
    return mul(add(ext(x), s), ext(half));
}

bool is_markoff(const MarkoffTriple& t, std::uint32_t p) {
    const u64 P = p;
    const u64 lhs = (u64(t.a) * t.a + u64(t.b) * t.b + u64(t.c) * t.c) % P;
    const u64 rhs = (u64(t.a) * t.b % P) * t.c % P;
    return lhs == rhs;
}

MarkoffTriple apply_involution(int i, const MarkoffTriple& t, std::uint32_t p) {
    const u64 P = p;
    auto vieta = [P](u64 x, u64 y, u64 z) { return static_cast<std::uint32_t>((x * y % P + P - z) % P); };
    switch (i) {
        case 1: return {vieta(t.b, t.c, t.a), t.b, t.c};
        case 2: return {t.a, vieta(t.a, t.c, t.b), t.c};
        case 3: return {t.a, t.b, vieta(t.a, t.b, t.c)};
        default: throw std::invalid_argument("involution index must be 1, 2 or 3");
    }
}

std::size_t MarkoffGraph::index_of(const MarkoffTriple& t) const {
    const std::size_t row = std::size_t(t.a) * p + t.b;
    for (auto i = row_start[row]; i < row_start[row + 1]; ++i)
        if (vertices[i].c == t.c) return i;
    return vertices.size();
}

namespace {

// Third coordinates c with (a, b, c) a nonzero solution, in ascending order.
void solve_row(std::uint32_t p, std::uint32_t a, const std::vector<std::int64_t>& root, u64 half,
               std::vector<MarkoffTriple>& out, std::vector<std::uint32_t>& counts) {
    const u64 P = p;
    for (std::uint32_t b = 0; b < p; ++b) {
        std::uint32_t found = 0;
        if (p == 2) {
            for (std::uint32_t c = 0; c < 2; ++c) {
                MarkoffTriple t{a, b, c};
                if ((a | b | c) && is_markoff(t, p)) {
                    out.push_back(t);
                    ++found;
                }
            }
        } else {
            const u64 ab = u64(a) * b % P;
            const u64 disc = (ab * ab % P + 4 * (P - (u64(a) * a + u64(b) * b) % P)) % P;
            if (root[disc] >= 0 && (a | b)) {
                const u64 y = static_cast<u64>(root[disc]);
                std::uint32_t c1 = static_cast<std::uint32_t>((ab + y) % P * half % P);
                std::uint32_t c2 = static_cast<std::uint32_t>((ab + P - y) % P * half % P);
                if (c1 > c2) std::swap(c1, c2);
                out.push_back({a, b, c1});
                ++found;
                if (c2 != c1) {
                    out.push_back({a, b, c2});
                    ++found;
                }
            }
        }
        counts[std::size_t(a) * p + b] = found;
    }
}

MarkoffGraph build_impl(std::uint32_t p, std::uint32_t cap, bool parallel) {
    if (p > cap) throw std::length_error("p exceeds graph cap");
    if (!is_prime_u64(p)) throw std::invalid_argument("p must be prime");
    MarkoffGraph g;
    g.p = p;
    std::vector<std::int64_t> root(p, -1);
    for (u64 y = 0; y < p; ++y) {
        const u64 s = y * y % p;
        if (root[s] < 0) root[s] = static_cast<std::int64_t>(y);
    }
    const u64 half = p == 2 ? 0 : (u64(p) + 1) / 2;
    std::vector<std::vector<MarkoffTriple>> rows(p);
    std::vector<std::uint32_t> counts(std::size_t(p) * p, 0);
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t a = 0; a < std::int64_t(p); ++a)
            solve_row(p, static_cast<std::uint32_t>(a), root, half, rows[a], counts);
    } else {
        for (std::uint32_t a = 0; a < p; ++a) solve_row(p, a, root, half, rows[a], counts);
    }
    g.row_start.assign(std::size_t(p) * p + 1, 0);
    for (std::size_t i = 0; i < counts.size(); ++i) g.row_start[i + 1] = g.row_start[i] + counts[i];
    g.vertices.reserve(g.row_start.back());
    for (auto& r : rows) g.vertices.insert(g.vertices.end(), r.begin(), r.end());

    UnionFind uf(g.vertices.size());
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        for (int i = 1; i <= 3; ++i) {
            const auto w = g.index_of(apply_involution(i, g.vertices[v], p));
            uf.unite(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(w));
        }
    }
    g.component.resize(g.vertices.size());
    std::vector<std::int64_t> label(g.vertices.size(), -1);
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        const auto r = uf.find(static_cast<std::uint32_t>(v));
        if (label[r] < 0) {
            label[r] = static_cast<std::int64_t>(g.component_sizes.size());
            g.component_sizes.push_back(0);
        }
        g.component[v] = static_cast<std::uint32_t>(label[r]);
        ++g.component_sizes[static_cast<std::size_t>(label[r])];
    }
    return g;
}

}  // namespace

MarkoffGraph build_graph(std::uint32_t p, std::uint32_t cap) { return build_impl(p, cap, true); }
MarkoffGraph build_graph_serial(std::uint32_t p, std::uint32_t cap) { return build_impl(p, cap, false); }

std::uint64_t count_solutions_exhaustive(std::uint32_t p) {
    std::uint64_t n = 0;
    for (std::uint32_t a = 0; a < p; ++a)
        for (std::uint32_t b = 0; b < p; ++b)
            for (std::uint32_t c = 0; c < p; ++c)
                if ((a | b | c) && is_markoff({a, b, c}, p)) ++n;
    return n;
}

bool negation_closure_ok(const MarkoffGraph& g) {
    const std::uint32_t p = g.p;
    auto neg = [p](std::uint32_t x) { return x == 0 ? 0 : p - x; };
    for (int k = 0; k < 3; ++k) {
        std::vector<std::int64_t> cmap(g.components(), -1);
        for (std::size_t v = 0; v < g.vertices.size(); ++v) {
            MarkoffTriple t = g.vertices[v];
            if (k != 0) t.a = neg(t.a);
            if (k != 1) t.b = neg(t.b);
            if (k != 2) t.c = neg(t.c);
            const auto w = g.index_of(t);
            if (w == g.vertices.size()) return false;
            auto& slot = cmap[g.component[v]];
            if (slot < 0)
                slot = g.component[w];
            else if (slot != std::int64_t(g.component[w]))
                return false;
        }
    }
    return true;
}

u64 TripleOrder::Ord() const { return std::max({ord_a, ord_b, ord_c}); }

namespace {

u64 reduce_order(const Field& F, const Field::Ext& r, u64 N, const std::vector<u64>& primes) {
    const Field::Ext one{1, 0};
    for (u64 q : primes) {
        while (N % q == 0 && F.pow(r, N / q) == one) N /= q;
    }
    return N;
}

}  // namespace

u64 coordinate_order(const Field& F, u64 x, const Factorization& f_minus, const Factorization& f_plus) {
    const u64 p = F.p();
    x %= p;
    if (x == 2 % p || x == (p + p - 2) % p) return 0;
    const Field::Ext r = F.root_of_trace(x);
    const u64 disc = F.sub(F.mul(x, x), 4 % p);
    if (F.is_square(disc)) return reduce_order(F, r, p - 1, prime_list(f_minus));
    return reduce_order(F, r, p + 1, prime_list(f_plus));
}

u64 ext_order(const Field& F, const Field::Ext& r, const Factorization& f_minus, const Factorization& f_plus) {
    const u64 p = F.p();
    const Field::Ext one{1, 0};
    if (r.v == 0 && r.u != 0) return reduce_order(F, r, p - 1, prime_list(f_minus));
    if (F.pow(r, p + 1) == one) return reduce_order(F, r, p + 1, prime_list(f_plus));
    throw DegenerateInput("element lies outside F_p^* and the norm-one subgroup");
}

TripleOrder triple_order(std::uint32_t p, const MarkoffTriple& t, const Factorization& f_minus,
                         const Factorization& f_plus) {
    const Field F(p);
    TripleOrder o;
    o.ord_a = coordinate_order(F, t.a, f_minus, f_plus);
    o.ord_b = coordinate_order(F, t.b, f_minus, f_plus);
    o.ord_c = coordinate_order(F, t.c, f_minus, f_plus);
    o.special = o.ord_a == 0 || o.ord_b == 0 || o.ord_c == 0;
    return o;
}

namespace {

Field::Ext kappa_of(const Field& F, const Field::Ext& r) {
    const u64 p = F.p();
    const Field::Ext ri = F.inv(r);
    const Field::Ext tr = F.add(r, ri);
    if (tr.v != 0) throw DegenerateInput("r + 1/r not in F_p");
    if (tr.u == 0 || tr.u == 2 % p || tr.u == p - 2) throw DegenerateInput("r + 1/r in {0, 2, -2}");
    return F.mul(tr, F.inv(F.sub(r, ri)));
}

bool within_bound(u64 count, u64 t, u64 d, u64 p) {
    const u128 c = count, T = t, D = d;
    return 8 * c * c * c <= 162 * T * D || c * p <= 6 * T * D;
}

double bound_of(u64 t, u64 d, u64 p) {
    const double td = double(t) * double(d);
    return 1.5 * std::max(std::cbrt(6.0 * td), 4.0 * td / double(p));
}

}  // namespace

std::vector<u64> orbit_orders(const Field& F, const Field::Ext& r, u64 t, const Field::Ext& s, const Factorization& f_minus,
                              const Factorization& f_plus) {
    const Field::Ext kappa = kappa_of(F, r);
    std::vector<u64> out;
    out.reserve(t);
    Field::Ext z = s;
    for (u64 n = 0; n < t; ++n, z = F.mul(z, r)) {
        const Field::Ext y = F.mul(kappa, F.add(z, F.inv(z)));
        if (y.v != 0) throw DegenerateInput("orbit coordinate outside F_p");
        out.push_back(coordinate_order(F, y.u, f_minus, f_plus));
    }
    return out;
}

ClassCount corvaja_class_count(const Field& F, const Field::Ext& r, u64 t, const Field::Ext& s, u64 d,
                               const Factorization& f_minus, const Factorization& f_plus) {
    ClassCount cc;
    for (u64 o : orbit_orders(F, r, t, s, f_minus, f_plus))
        if (o != 0 && d % o == 0) ++cc.count;
    cc.bound = bound_of(t, d, F.p());
    cc.within = within_bound(cc.count, t, d, F.p());
    return cc;
}

CorvajaSweep corvaja_sweep(std::uint32_t p, unsigned samples, std::uint64_t seed, const Factorization& f_minus,
                           const Factorization& f_plus) {
    if (p <= 3) throw std::invalid_argument("corvaja sweep needs p > 3");
    const Field F(p);
    std::mt19937_64 rng(seed ^ (u64(p) * 0x9E3779B97F4A7C15ULL));
    std::vector<u64> ds;
    for (auto* f : {&f_minus, &f_plus})
        for (auto& h : all_divisors(*f)) ds.push_back(h.value.get_ui());
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());

    CorvajaSweep out;
    const u64 half = F.inv(2);
    for (u64 x = 0; x < p; ++x) {
        if (x == 2 || x == p - 2) continue;
        const Field::Ext r0 = F.root_of_trace(x);
        if (x == 0) {
            out.skipped_order4 += 2;
            continue;
        }
        // Second coordinates b that complete (x, b, c) to a vertex.
        std::vector<u64> bs;
        for (u64 b = 0; b < p; ++b) {
            const u64 xb = F.mul(x, b);
            const u64 disc = F.sub(F.mul(xb, xb), F.mul(4, F.add(F.mul(x, x), F.mul(b, b))));
            if (F.is_square(disc) && (x | b)) bs.push_back(b);
        }
        if (bs.empty()) continue;
        for (const Field::Ext& r : {r0, F.inv(r0)}) {
            const u64 t = ext_order(F, r, f_minus, f_plus);
            const Field::Ext ri = F.inv(r);
            const Field::Ext ratio = F.mul(F.sub(r, ri), F.inv(F.add(r, ri)));
            for (unsigned k = 0; k < samples; ++k) {
                const u64 b = bs[rng() % bs.size()];
                // s + 1/s = beta with beta = b (r - 1/r)/(r + 1/r).
                const Field::Ext beta = F.mul(F.ext(b), ratio);
                // beta lies in F_p or in sqrt(delta) F_p, so beta^2 - 4 is in F_p.
                const Field::Ext disc = F.sub(F.mul(beta, beta), F.ext(4));
                if (disc.v != 0) throw DegenerateInput("beta^2 outside F_p");
                const Field::Ext s = F.mul(F.add(beta, F.sqrt_ext(disc.u)), F.ext(half));
                const auto orders = orbit_orders(F, r, t, s, f_minus, f_plus);
                for (u64 d : ds) {
                    u64 count = 0;
                    for (u64 o : orders)
                        if (o != 0 && d % o == 0) ++count;
                    ++out.cases;
                    if (!within_bound(count, t, d, p)) ++out.violations;
                    const double ratio_cb = double(count) / bound_of(t, d, p);
                    if (ratio_cb > out.worst_ratio) {
                        out.worst_ratio = ratio_cb;
                        out.worst_gap_num = count;
                    }
                }
            }
        }
    }
    return out;
}

FibOrbit fibonacci_orbit_check(std::uint32_t p, const Factorization& f_minus, const Factorization& f_plus) {
    if (p <= 3) throw std::invalid_argument("fibonacci orbit check needs p > 3");
    const Field F(p);
    FibOrbit res;
    auto full = [&](u64 x) {
        const u64 o = coordinate_order(F, x, f_minus, f_plus);
        return o == p - 1 || o == p + 1;
    };
    const bool three_full = full(3);
    u64 x = 1, y = 2;  // F_{2n-1}, F_{2n+1} at n = 1
    u64 n = 1;
    for (;;) {
        if (!res.found && (three_full || full(F.mul(3, x)) || full(F.mul(3, y)))) {
            res.found = true;
            res.first_n = n;
        }
        const u64 nx = y, ny = F.sub(F.mul(3, y), x);
        x = nx;
        y = ny;
        ++n;
        if (x == 1 && y == 2) break;
    }
    res.period = n - 1;
    return res;
}

}  // namespace mkf

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "markoff/cli.hpp"
#include "markoff/markoff.hpp"
#include "markoff/reduction.hpp"

namespace mkf {

namespace {

using json = nlohmann::json;

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct Common {
    std::string out_path;
    std::string factors_path;
    std::uint64_t trial_bound = FactorPolicy{}.trial_division_bound;
    std::uint64_t rho_budget = FactorPolicy{}.pollard_rho_budget;

    FactorPolicy policy() const {
        FactorPolicy p;
        p.trial_division_bound = trial_bound;
        p.pollard_rho_budget = rho_budget;
        if (!cache_file().empty()) p.cache_path = cache_file();
        return p;
    }
    std::string cache_file() const {
        if (!factors_path.empty()) return factors_path;
        if (const char* env = std::getenv("MARKOFF_CACHE")) return env;
        return {};
    }
};

class Session {
public:
    Session(const Common& c, std::ostream& out) : c_(c), out_(&out) {
        if (!c.out_path.empty()) {
            file_.open(c.out_path);
            if (!file_) throw Usage("cannot open --out file " + c.out_path);
            out_ = &file_;
        }
        const auto path = c.cache_file();
        if (!path.empty()) {
            std::ifstream probe(path);
            if (probe) cache_.load(path);
        }
    }

    void emit(json j) {
        j["version"] = kVersion;
        j["policy"] = {{"trial_division_bound", c_.trial_bound},
                       {"pollard_rho_budget", c_.rho_budget},
                       {"probable_primes", true},
                       {"cache", c_.cache_file()}};
        *out_ << j.dump() << '\n';
    }
    std::ostream& raw() { return *out_; }

    Factorization factor(const BigNat& n) {
        if (auto f = cache_.find(n)) return *f;
        auto f = factorize(n, c_.policy(), &cache_);
        const auto path = c_.cache_file();
        if (!path.empty()) cache_.append_to(path, f);
        return f;
    }
    const FactorCache& cache() const { return cache_; }

private:
    const Common& c_;
    std::ostream* out_;
    std::ofstream file_;
    FactorCache cache_;
};

BigNat parse_arg(const std::string& s) {
    try {
        return parse_number(s);
    } catch (const ParseError& e) {
        throw Usage(std::string("cannot parse number '") + s + "': " + e.what());
    }
}

BigNat require_prime(const std::string& s) {
    const BigNat p = parse_arg(s);
    if (p < 3 || !is_prime(p)) throw Usage("expected an odd prime, got " + s);
    return p;
}

std::string side_str(int side) { return side < 0 ? "-" : "+"; }

json factors_json(const Factorization& f) { return f.str(); }

std::vector<std::uint32_t> small_primes(const std::string& p_arg, std::uint32_t up_to, std::uint32_t from) {
    std::vector<std::uint32_t> ps;
    if (!p_arg.empty()) {
        const BigNat p = require_prime(p_arg);
        if (!p.fits_uint_p()) throw Usage("p too large for this command");
        ps.push_back(static_cast<std::uint32_t>(p.get_ui()));
        return ps;
    }
    if (up_to == 0) throw Usage("give --p or --up-to");
    for (auto q : primes_up_to(up_to))
        if (q >= from) ps.push_back(q);
    return ps;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Markoff mod-p connectivity certification and reduced-number tools", "markoff"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Common common;
    app.add_option("--out", common.out_path, "Write JSON lines to this file");
    app.add_option("--factors", common.factors_path, "Factorization cache file (default $MARKOFF_CACHE)");
    app.add_option("--trial-bound", common.trial_bound, "Trial division bound");
    app.add_option("--rho-budget", common.rho_budget, "Pollard rho iteration budget");

    int code = 0;

    // test-prime
    auto* tp = app.add_subcommand("test-prime", "Run the per-prime connectivity test");
    std::string tp_p, tp_mode = "md";
    bool tp_union = false, tp_expect = false;
    std::size_t tp_wmax = 20;
    tp->add_option("p", tp_p, "Prime")->required();
    tp->add_option("--mode", tp_mode, "md or td")->check(CLI::IsMember({"md", "td"}));
    tp->add_flag("--md-union", tp_union, "Count M_d as the union of both sides");
    tp->add_flag("--expect-connected", tp_expect, "Exit 1 unless the verdict is Connected");
    tp->add_option("--witnesses", tp_wmax, "Witnesses to print");
    tp->callback([&] {
        Session s(common, out);
        const auto t0 = std::chrono::steady_clock::now();
        const BigNat p = require_prime(tp_p);
        const auto fm = s.factor(p - 1), fp = s.factor(p + 1);
        TestOptions o;
        o.mode = tp_mode == "td" ? Mode::Td : Mode::Md;
        o.union_md = tp_union;
        const auto v = test_prime(p, fm, fp, o);
        json w = json::array();
        for (std::size_t i = 0; i < v.witnesses.size() && i < tp_wmax; ++i) {
            const auto& x = v.witnesses[i];
            w.push_back({{"d", x.d.get_str()}, {"side", side_str(x.side)}, {"interval", x.interval}, {"value", x.value}});
        }
        s.emit({{"command", "test-prime"},
                {"p", p.get_str()},
                {"mode", to_string(v.mode)},
                {"md_union", v.union_md},
                {"outcome", to_string(v.outcome)},
                {"witnesses", w},
                {"witnesses_total", v.witnesses.size()},
                {"failing_count", v.failing_count},
                {"max_Md", v.max_value},
                {"tau_minus", v.tau_minus},
                {"tau_plus", v.tau_plus},
                {"p_minus_1", factors_json(fm)},
                {"p_plus_1", factors_json(fp)},
                {"endgame_minus", endgame_bound(p, -1, fm).value},
                {"endgame_plus", endgame_bound(p, 1, fp).value},
                {"second_interval_skipped", v.second_interval_skipped},
                {"elapsed_ms", ms_since(t0)}});
        if (tp_expect && v.outcome != Outcome::Connected) code = 1;
    });

    // sweep
    auto* sw = app.add_subcommand("sweep", "Search reduced numbers for the largest failing candidate");
    std::string sw_from, sw_to;
    bool sw_serial = false;
    std::size_t sw_batch = SweepOptions{}.batch;
    sw->add_option("--from", sw_from, "Lower bound a (expression)")->required();
    sw->add_option("--to", sw_to, "Upper bound b (expression)")->required();
    sw->add_flag("--serial", sw_serial, "Evaluate candidates without OpenMP");
    sw->add_option("--batch", sw_batch, "Candidates per round");
    sw->callback([&] {
        Session s(common, out);
        const auto t0 = std::chrono::steady_clock::now();
        const BigNat a = parse_arg(sw_from), b = parse_arg(sw_to);
        if (a < 2 || b < a) throw Usage("sweep needs 2 <= from <= to");
        SweepOptions o;
        o.parallel = !sw_serial;
        o.batch = sw_batch;
        const auto st = algorithm1_sweep(a, b, o);
        json j{{"command", "sweep"},
               {"from", a.get_str()},
               {"to", short_decimal(b)},
               {"a", st.a.get_str()},
               {"a_digits", st.a.get_str().size()},
               {"reduced_in_range", st.stats.reduced_in_range},
               {"prefilter_survivors", st.stats.prefilter_survivors},
               {"float_survivors", st.stats.float_survivors},
               {"exact_evaluations", st.stats.exact_evaluations},
               {"rounds", st.stats.rounds},
               {"elapsed_ms", ms_since(t0)}};
        if (st.largest_failing) {
            j["largest_failing"] = st.largest_failing->get_str();
            j["largest_failing_expr"] = render_primorial_expr(factorize(*st.largest_failing));
            j["a_expr"] = render_primorial_expr(factorize(*st.largest_failing)) + "+1";
        }
        j["certified_above_b"] = st.a > b;
        s.emit(j);
    });

    // reduced
    auto* rd = app.add_subcommand("reduced", "List or count reduced numbers up to a limit");
    std::string rd_limit;
    bool rd_count = false;
    rd->add_option("--limit", rd_limit, "Upper limit (expression)")->required();
    rd->add_flag("--count-only", rd_count, "Print only the count");
    rd->callback([&] {
        Session s(common, out);
        const auto t0 = std::chrono::steady_clock::now();
        const BigNat lim = parse_arg(rd_limit);
        if (rd_count) {
            const auto st = for_each_reduced_odd_part(lim, [](const OddPart&) {});
            s.emit({{"command", "reduced"},
                    {"limit", short_decimal(lim)},
                    {"count", st.numbers.get_str()},
                    {"odd_parts", st.odd_parts},
                    {"elapsed_ms", ms_since(t0)}});
            return;
        }
        for (auto& r : enumerate_reduced(lim)) {
            const auto f = r.factorization();
            s.raw() << (f.empty() ? std::string("1") : render_primorial_expr(f)) << '\n';
        }
    });

    // bruteforce
    auto* bf = app.add_subcommand("bruteforce", "Build Markoff mod-p graphs exhaustively");
    std::string bf_p;
    std::uint32_t bf_up = 0, bf_from = 5;
    bool bf_expect = false;
    bf->add_option("--p", bf_p, "One prime");
    bf->add_option("--up-to", bf_up, "All primes in [--from, up-to]");
    bf->add_option("--from", bf_from, "Smallest prime for --up-to");
    bf->add_flag("--expect-connected", bf_expect, "Exit 1 unless every graph is connected");
    bf->callback([&] {
        Session s(common, out);
        for (auto p : small_primes(bf_p, bf_up, bf_from)) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto g = build_graph(p);
            bool div = p > 3;
            std::uint64_t largest = 0;
            for (auto c : g.component_sizes) {
                div = div && c % p == 0;
                largest = std::max(largest, c);
            }
            const std::uint64_t rest = g.vertices.size() - largest;
            json j{{"command", "bruteforce"},
                   {"p", p},
                   {"vertices", g.vertices.size()},
                   {"components", g.components()},
                   {"component_sizes", g.component_sizes},
                   {"sizes_divisible_by_p", div},
                   {"outside_giant_divisible_by_4p", p > 3 && rest % (4 * std::uint64_t(p)) == 0},
                   {"negation_closed", negation_closure_ok(g)},
                   {"elapsed_ms", ms_since(t0)}};
            if (p <= 200) j["exhaustive_count"] = count_solutions_exhaustive(p);
            s.emit(j);
            if (bf_expect && g.components() != 1) code = 1;
        }
    });

    // table
    auto* tb = app.add_subcommand("table", "Share of primes certified connected near 10^n");
    std::vector<unsigned> tb_n;
    std::uint64_t tb_m = 1000, tb_seed = 1;
    std::string tb_mode = "consecutive";
    bool tb_primes = false;
    tb->add_option("--n", tb_n, "Exponent(s) n")->required();
    tb->add_option("--m", tb_m, "Sample size")->check(CLI::PositiveNumber);
    tb->add_option("--mode", tb_mode, "consecutive or random")->check(CLI::IsMember({"consecutive", "random"}));
    tb->add_option("--seed", tb_seed, "Seed for random mode");
    tb->add_flag("--per-prime", tb_primes, "Also emit one line per prime");
    tb->callback([&] {
        Session s(common, out);
        for (auto n : tb_n) {
            const auto t0 = std::chrono::steady_clock::now();
            TableRequest req;
            req.n = n;
            req.m = tb_m;
            req.mode = tb_mode == "random" ? SampleMode::Random : SampleMode::Consecutive;
            req.seed = tb_seed;
            req.policy = common.policy();
            const auto row = run_table(req, &s.cache());
            if (tb_primes) {
                for (auto& r : row.primes)
                    s.emit({{"command", "table-prime"},
                            {"n", n},
                            {"p", r.p.get_str()},
                            {"excluded", r.excluded},
                            {"connected", r.connected}});
            }
            s.emit({{"command", "table"},
                    {"n", row.n},
                    {"m", tb_m},
                    {"mode", tb_mode},
                    {"seed", tb_seed},
                    {"rng", kRngName},
                    {"tested", row.tested},
                    {"connected", row.connected},
                    {"percentage", row.percentage},
                    {"excluded_unfactorable", row.excluded_unfactorable},
                    {"elapsed_ms", ms_since(t0)}});
        }
    });

    // certify-one-side
    auto* cs = app.add_subcommand("certify-one-side", "Failure certificate from one side's maximal divisors");
    std::string cs_p, cs_side = "+";
    cs->add_option("p", cs_p, "Prime")->required();
    cs->add_option("--side", cs_side, "+ or -")->check(CLI::IsMember({"+", "-"}));
    cs->callback([&] {
        Session s(common, out);
        const auto t0 = std::chrono::steady_clock::now();
        const BigNat p = require_prime(cs_p);
        const int side = cs_side == "-" ? -1 : 1;
        const auto f = s.factor(p + side);
        json j{{"command", "certify-one-side"}, {"p", p.get_str()}, {"side", cs_side}, {"factors", factors_json(f)}};
        try {
            const auto w = certify_failure_one_side(p, side, f);
            if (w)
                j["witness"] = {{"d", w->d.get_str()}, {"m", w->m.get_str()}, {"m_exact", w->exact}};
            else
                j["witness"] = nullptr;
        } catch (const CapExceeded& e) {
            j["witness"] = nullptr;
            j["undetermined"] = e.what();
        }
        j["elapsed_ms"] = ms_since(t0);
        s.emit(j);
    });

    // corvaja-check
    auto* cv = app.add_subcommand("corvaja-check", "Class counts against (3/2) max((6td)^(1/3), 4td/p)");
    std::string cv_p;
    std::uint32_t cv_up = 0;
    unsigned cv_samples = 20;
    std::uint64_t cv_seed = 1;
    cv->add_option("--p", cv_p, "One prime");
    cv->add_option("--up-to", cv_up, "All primes 5..up-to");
    cv->add_option("--samples", cv_samples, "Choices of s per r");
    cv->add_option("--seed", cv_seed, "Seed");
    cv->callback([&] {
        Session s(common, out);
        for (auto p : small_primes(cv_p, cv_up, 5)) {
            if (p <= 3) throw Usage("corvaja-check needs p > 3");
            const auto r = corvaja_sweep(p, cv_samples, cv_seed, factorize_u64(p - 1), factorize_u64(p + 1));
            s.emit({{"command", "corvaja-check"},
                    {"p", p},
                    {"seed", cv_seed},
                    {"rng", "mt19937_64"},
                    {"samples", cv_samples},
                    {"cases", r.cases},
                    {"violations", r.violations},
                    {"skipped_order4", r.skipped_order4},
                    {"worst_ratio", r.worst_ratio}});
            if (r.violations) code = 1;
        }
    });

    // fib-orbit
    auto* fo = app.add_subcommand("fib-orbit", "Orbit (3, 3F_{2n-1}, 3F_{2n+1}) reaches order p-1 or p+1");
    std::string fo_p;
    std::uint32_t fo_up = 0;
    fo->add_option("--p", fo_p, "One prime");
    fo->add_option("--up-to", fo_up, "All primes 5..up-to");
    fo->callback([&] {
        Session s(common, out);
        for (auto p : small_primes(fo_p, fo_up, 5)) {
            if (p <= 3) throw Usage("fib-orbit needs p > 3");
            const auto r = fibonacci_orbit_check(p, factorize_u64(p - 1), factorize_u64(p + 1));
            s.emit({{"command", "fib-orbit"}, {"p", p}, {"found", r.found}, {"period", r.period}, {"first_n", r.first_n}});
            if (!r.found) code = 1;
        }
    });

    // parse-expr
    auto* pe = app.add_subcommand("parse-expr", "Evaluate a primorial expression");
    std::string pe_expr;
    pe->add_option("expr", pe_expr, "Expression such as 5#*2^2")->required();
    pe->callback([&] {
        Session s(common, out);
        s.raw() << parse_arg(pe_expr).get_str() << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    } catch (const Usage& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return code;
}

}  // namespace mkf

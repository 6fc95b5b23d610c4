#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "markoff/arith.hpp"

namespace mkf {

namespace {

class ExprParser {
public:
    explicit ExprParser(const std::string& s) : s_(s) {}

    BigNat parse() {
        BigNat v = term();
        skip();
        while (pos_ < s_.size() && s_[pos_] == '*') {
            ++pos_;
            v *= term();
            skip();
        }
        if (pos_ != s_.size()) throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "'", pos_);
        return v;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string integer() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("expected integer", start);
        return s_.substr(start, pos_ - start);
    }

    BigNat term() {
        const std::size_t at = pos_;
        const std::string base = integer();
        skip();
        if (pos_ < s_.size() && s_[pos_] == '#') {
            ++pos_;
            if (base.size() > 9) throw ParseError("primorial argument too large", at);
            return primorial(static_cast<unsigned>(std::stoul(base)));
        }
        if (pos_ < s_.size() && s_[pos_] == '^') {
            ++pos_;
            const std::size_t eat = pos_;
            const std::string ex = integer();
            if (ex.size() > 9) throw ParseError("exponent too large", eat);
            BigNat r;
            mpz_pow_ui(r.get_mpz_t(), BigNat(base).get_mpz_t(), std::stoul(ex));
            return r;
        }
        return BigNat(base);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

BigNat parse_primorial_expr(const std::string& s) { return ExprParser(s).parse(); }

BigNat parse_number(const std::string& s) {
    // "1e532", "4e10": mantissa times a power of ten.
    const auto e = s.find_first_of("eE");
    if (e != std::string::npos && s.find_first_of("#^*") == std::string::npos) {
        const std::string mant = s.substr(0, e), ex = s.substr(e + 1);
        if (mant.empty() || ex.empty() || !std::all_of(mant.begin(), mant.end(), ::isdigit) ||
            !std::all_of(ex.begin(), ex.end(), ::isdigit))
            throw ParseError("malformed power of ten", e);
        BigNat r;
        mpz_ui_pow_ui(r.get_mpz_t(), 10, std::stoul(ex));
        return r * BigNat(mant);
    }
    return parse_primorial_expr(s);
}

std::string render_primorial_expr(const Factorization& f) {
    if (f.empty()) return "1";
    for (auto& x : f.factors())
        if (!x.p.fits_ulong_p()) return f.str();

    std::map<unsigned long, unsigned> exp;
    unsigned top = 0;
    for (auto& x : f.factors()) {
        exp[x.p.get_ui()] = x.e;
        top = std::max(top, x.e);
    }
    const unsigned long maxp = exp.rbegin()->first;
    const auto primes = primes_up_to(static_cast<std::uint32_t>(maxp));

    std::vector<unsigned long> terms;  // one primorial per level
    std::map<unsigned long, unsigned> left;
    for (unsigned t = 1; t <= top; ++t) {
        std::size_t count = 0;
        unsigned long hi = 0;
        for (auto& [p, e] : exp)
            if (e >= t) {
                ++count;
                hi = p;
            }
        const std::size_t below = static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.end(), hi) - primes.begin());
        if (hi >= 5 && count == below) {
            terms.push_back(hi);
        } else {
            for (auto& [p, e] : exp)
                if (e >= t) left[p] += 1;
        }
    }
    std::sort(terms.rbegin(), terms.rend());
    std::ostringstream os;
    bool first = true;
    for (auto t : terms) {
        os << (first ? "" : "*") << t << '#';
        first = false;
    }
    for (auto it = left.rbegin(); it != left.rend(); ++it) {
        os << (first ? "" : "*") << it->first;
        if (it->second > 1) os << '^' << it->second;
        first = false;
    }
    return os.str();
}

}  // namespace mkf

#include <cctype>
#include <fstream>
#include <sstream>

#include "markoff/arith.hpp"

namespace mkf {

namespace {

std::string strip(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

std::optional<Factorization> FactorCache::parse_line(const std::string& raw, BigNat* n_out) {
    const std::string line = strip(raw);
    if (line.empty() || line[0] == '#') return std::nullopt;
    const auto eq = line.find('=');
    if (eq == std::string::npos) return std::nullopt;
    const std::string lhs = line.substr(0, eq);
    if (!all_digits(lhs)) return std::nullopt;
    std::vector<PrimePower> pp;
    std::stringstream rhs(line.substr(eq + 1));
    std::string item;
    while (std::getline(rhs, item, ',')) {
        const auto caret = item.find('^');
        const std::string base = item.substr(0, caret);
        const std::string ex = caret == std::string::npos ? "1" : item.substr(caret + 1);
        if (!all_digits(base) || !all_digits(ex) || ex.size() > 6) return std::nullopt;
        pp.push_back({BigNat(base), static_cast<unsigned>(std::stoul(ex))});
    }
    auto f = Factorization::from_pairs(std::move(pp));
    BigNat n(lhs);
    if (f.value() != n || !f.valid()) return std::nullopt;
    if (n_out) *n_out = n;
    return f;
}

std::string FactorCache::format_line(const Factorization& f) {
    std::ostringstream os;
    os << f.value().get_str() << '=';
    for (std::size_t i = 0; i < f.factors().size(); ++i) {
        if (i) os << ',';
        os << f.factors()[i].p.get_str() << '^' << f.factors()[i].e;
    }
    return os.str();
}

std::size_t FactorCache::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return 0;
    std::string line;
    std::size_t added = 0;
    while (std::getline(in, line)) {
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        BigNat n;
        if (auto f = parse_line(line, &n)) {
            insert(*f);
            ++added;
        } else {
            rejected_.push_back(line);
        }
    }
    return added;
}

std::optional<Factorization> FactorCache::find(const BigNat& n) const {
    std::lock_guard lock(mu_);
    auto it = map_.find(n.get_str());
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

void FactorCache::insert(const Factorization& f) {
    std::lock_guard lock(mu_);
    map_[f.value().get_str()] = f;
}

void FactorCache::append_to(const std::string& path, const Factorization& f) {
    insert(f);
    std::lock_guard lock(mu_);
    std::ofstream out(path, std::ios::app);
    out << format_line(f) << '\n';
}

}  // namespace mkf

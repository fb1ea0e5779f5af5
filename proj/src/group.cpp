#include "zerosum/group.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace zerosum {

long mod_pow(long base, long exp, long mod) {
    if (mod == 1) return 0;
    long result = 1 % mod;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if (exp & 1) result = result * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return result;
}

long mod_inverse(long a, long mod) {
    // extended Euclid; caller guarantees gcd(a, mod) = 1
    long t = 0, new_t = 1, r = mod, new_r = ((a % mod) + mod) % mod;
    while (new_r != 0) {
        long q = r / new_r;
        std::swap(t, new_t); new_t -= q * t;
        std::swap(r, new_r); new_r -= q * r;
    }
    if (r != 1) throw std::invalid_argument("mod_inverse: not coprime");
    return ((t % mod) + mod) % mod;
}

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

static long smallest_prime_divisor(long n) {
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return d;
    return n;
}

ParamReport validate_params(long p, long m, long r) {
    ParamReport rep;
    if (p < 2) rep.violations.push_back("p must be at least 2");
    if (m < 1) rep.violations.push_back("m must be at least 1");
    if (r < 0 || r >= std::max<long>(m, 1))
        rep.violations.push_back("r must lie in [0, m-1]");
    if (!rep.violations.empty()) return rep;

    if (!is_prime(p)) rep.violations.push_back("p is not prime");
    if (is_prime(p) && m > 1 && smallest_prime_divisor(p * m) != p)
        rep.violations.push_back("p is not the smallest prime divisor of p*m");
    long one_mod_m = m == 1 ? 0 : 1;
    if (mod_pow(r, p, m) != one_mod_m)
        rep.violations.push_back("r^p is not congruent to 1 mod m");
    if (std::gcd(p * (r - 1), m) != 1)
        rep.violations.push_back("gcd(p*(r-1), m) is not 1");
    if (!rep.violations.empty()) return rep;

    // Consequence of the accepted constraints; checked, never assumed.
    if (m % p != 1 % p)
        rep.violations.push_back("internal consistency: m mod p != 1");
    if (!rep.violations.empty()) return rep;

    MetacyclicParams params;
    params.p = p;
    params.m = m;
    params.r = m == 1 ? 0 : r % m;
    params.r_order_mod_m = 1;
    if (m > 1) {
        long acc = params.r % m, ord = 1;
        while (acc != 1) {
            acc = acc * params.r % m;
            ++ord;
            if (ord > m) throw std::logic_error("order computation overran m");
        }
        params.r_order_mod_m = ord;
    }
    rep.ok = true;
    rep.params = params;
    return rep;
}

// ---------------------------------------------------------------------------

int FiniteGroup::mul_formula(int a, int b) const {
    switch (kind_) {
        case GroupKind::Cyclic:
            return (a + b) % n_;
        case GroupKind::AbelianProduct: {
            int out = 0, stride = 1;
            int av = a, bv = b;
            for (int f : factors_) {
                out += stride * ((av % f + bv % f) % f);
                stride *= f;
                av /= f;
                bv /= f;
            }
            return out;
        }
        case GroupKind::Metacyclic: {
            const long m = mc_.m, p = mc_.p;
            long a1 = a / m, b1 = a % m;
            long a2 = b / m, b2 = b % m;
            // (a1,b1)*(a2,b2) = (a1+a2, b1*r^a2 + b2)
            long aa = (a1 + a2) % p;
            long bb = (b1 * mod_pow(mc_.r, a2, m) + b2) % m;
            return static_cast<int>(aa * m + bb);
        }
        case GroupKind::Table:
            return table_[static_cast<size_t>(a) * n_ + b];
    }
    return 0;
}

void FiniteGroup::finish_construction() {
    if (n_ > 4096 && kind_ == GroupKind::Table)
        throw std::invalid_argument("table groups beyond order 4096 are unsupported");
    if (kind_ != GroupKind::Table && n_ <= 4096 && table_.empty()) {
        table_.resize(static_cast<size_t>(n_) * n_);
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                table_[static_cast<size_t>(a) * n_ + b] = static_cast<uint16_t>(mul_formula(a, b));
    }
    if (!table_.empty()) {
        rtable_.resize(static_cast<size_t>(n_) * n_);
        for (int h = 0; h < n_; ++h)
            for (int q = 0; q < n_; ++q)
                rtable_[static_cast<size_t>(h) * n_ + q] = table_[static_cast<size_t>(q) * n_ + h];
    }

    inv_.assign(n_, -1);
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
            if (mul(a, b) == 0 && mul(b, a) == 0) {
                inv_[a] = b;
                break;
            }
        }
        if (inv_[a] < 0)
            throw std::invalid_argument("element " + std::to_string(a) + " has no inverse");
    }
}

FiniteGroup FiniteGroup::cyclic(int n) {
    if (n < 1) throw std::invalid_argument("cyclic group order must be positive");
    FiniteGroup g;
    g.kind_ = GroupKind::Cyclic;
    g.n_ = n;
    g.abelian_ = true;
    g.spec_ = "cyclic:" + std::to_string(n);
    g.finish_construction();
    return g;
}

FiniteGroup FiniteGroup::abelian(const std::vector<int>& factors) {
    if (factors.empty()) throw std::invalid_argument("abelian product needs at least one factor");
    FiniteGroup g;
    g.kind_ = GroupKind::AbelianProduct;
    g.factors_ = factors;
    long n = 1;
    std::string spec = "abelian:";
    for (size_t i = 0; i < factors.size(); ++i) {
        if (factors[i] < 1) throw std::invalid_argument("abelian factor must be positive");
        n *= factors[i];
        if (n > 1 << 20) throw std::invalid_argument("abelian product order too large");
        spec += (i ? "x" : "") + std::to_string(factors[i]);
    }
    g.n_ = static_cast<int>(n);
    g.abelian_ = true;
    g.spec_ = spec;
    g.finish_construction();
    return g;
}

FiniteGroup FiniteGroup::metacyclic(const MetacyclicParams& params) {
    FiniteGroup g;
    g.kind_ = GroupKind::Metacyclic;
    g.mc_ = params;
    g.n_ = static_cast<int>(params.p * params.m);
    g.abelian_ = params.m == 1;
    g.spec_ = "metacyclic:p=" + std::to_string(params.p) + ",m=" + std::to_string(params.m) +
              ",r=" + std::to_string(params.r);
    g.finish_construction();
    return g;
}

FiniteGroup FiniteGroup::from_table(const std::vector<std::vector<int>>& table) {
    const int n = static_cast<int>(table.size());
    if (n < 1) throw std::invalid_argument("empty multiplication table");
    for (const auto& row : table) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("multiplication table is not square");
        for (int v : row)
            if (v < 0 || v >= n) throw std::invalid_argument("table entry out of range");
    }

    // Locate the identity, then relabel so it gets index 0.
    int id = -1;
    for (int e = 0; e < n && id < 0; ++e) {
        bool ok = true;
        for (int a = 0; a < n && ok; ++a)
            ok = table[e][a] == a && table[a][e] == a;
        if (ok) id = e;
    }
    if (id < 0) throw std::invalid_argument("table has no identity element");

    std::vector<int> to_new(n), to_old(n);
    for (int i = 0; i < n; ++i) {
        int j = i == 0 ? id : (i == id ? 0 : i);
        to_new[j] = i;
        to_old[i] = j;
    }

    FiniteGroup g;
    g.kind_ = GroupKind::Table;
    g.n_ = n;
    g.spec_ = "table:n=" + std::to_string(n);
    g.table_.resize(static_cast<size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            g.table_[static_cast<size_t>(a) * n + b] =
                static_cast<uint16_t>(to_new[table[to_old[a]][to_old[b]]]);

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
                    throw std::invalid_argument(
                        "table is not associative at triple (" + std::to_string(to_old[a]) + ", " +
                        std::to_string(to_old[b]) + ", " + std::to_string(to_old[c]) + ")");

    g.abelian_ = true;
    for (int a = 0; a < n && g.abelian_; ++a)
        for (int b = a + 1; b < n; ++b)
            if (g.mul(a, b) != g.mul(b, a)) {
                g.abelian_ = false;
                break;
            }
    g.finish_construction();
    return g;
}

FiniteGroup FiniteGroup::parse_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("group spec needs a kind prefix: " + spec);
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);

    auto parse_int = [](const std::string& s) {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
        return v;
    };

    if (kind == "cyclic") return cyclic(static_cast<int>(parse_int(rest)));

    if (kind == "abelian") {
        std::vector<int> factors;
        std::stringstream ss(rest);
        std::string tok;
        while (std::getline(ss, tok, 'x')) factors.push_back(static_cast<int>(parse_int(tok)));
        return abelian(factors);
    }

    if (kind == "metacyclic") {
        long p = -1, m = -1, r = -1;
        std::stringstream ss(rest);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("bad metacyclic field: " + tok);
            const std::string key = tok.substr(0, eq);
            const long val = parse_int(tok.substr(eq + 1));
            if (key == "p") p = val;
            else if (key == "m") m = val;
            else if (key == "r") r = val;
            else throw std::invalid_argument("unknown metacyclic field: " + key);
        }
        if (p < 0 || m < 0 || r < 0)
            throw std::invalid_argument("metacyclic spec needs p=, m=, r=");
        ParamReport rep = validate_params(p, m, r);
        if (!rep.ok) {
            std::string msg = "invalid metacyclic parameters:";
            for (const auto& v : rep.violations) msg += " " + v + ";";
            throw std::invalid_argument(msg);
        }
        return metacyclic(*rep.params);
    }

    if (kind == "table") {
        if (rest.empty() || rest[0] != '@')
            throw std::invalid_argument("table spec must be table:@path");
        std::ifstream in(rest.substr(1));
        if (!in) throw std::invalid_argument("cannot open table file " + rest.substr(1));
        std::vector<int> flat;
        int v;
        while (in >> v) flat.push_back(v);
        const auto n = static_cast<size_t>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
        if (n * n != flat.size() || n == 0)
            throw std::invalid_argument("table file is not a square matrix");
        std::vector<std::vector<int>> table(n, std::vector<int>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) table[i][j] = flat[i * n + j];
        return from_table(table);
    }

    throw std::invalid_argument("unknown group kind: " + kind);
}

int FiniteGroup::pow(int a, long e) const {
    if (e < 0) return pow(inverse(a), -e);
    int acc = 0, base = a;
    while (e > 0) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

int FiniteGroup::element_order(int a) const {
    int acc = a, ord = 1;
    while (acc != 0) {
        acc = mul(acc, a);
        ++ord;
    }
    return ord;
}

const MetacyclicParams& FiniteGroup::metacyclic_params() const {
    if (kind_ != GroupKind::Metacyclic)
        throw std::logic_error("group is not metacyclic");
    return mc_;
}

int FiniteGroup::x() const {
    metacyclic_params();
    return static_cast<int>(mc_.m);
}

int FiniteGroup::y() const {
    metacyclic_params();
    if (mc_.m == 1) return 0;
    return 1;
}

std::string FiniteGroup::element_name(int g) const {
    if (g == 0) return "1";
    if (kind_ == GroupKind::Metacyclic) {
        int a = coset_exponent(g), b = normal_exponent(g);
        std::string out;
        if (a == 1) out = "x";
        else if (a > 1) out = "x^" + std::to_string(a);
        if (b > 0) {
            if (!out.empty()) out += "*";
            out += b == 1 ? "y" : "y^" + std::to_string(b);
        }
        return out;
    }
    return "g" + std::to_string(g);
}

int FiniteGroup::parse_element(const std::string& token) const {
    if (token == "1" || token == "e") return 0;
    if (token.empty()) throw std::invalid_argument("empty element token");
    if (token[0] == 'g') {
        int idx = std::stoi(token.substr(1));
        if (idx < 0 || idx >= n_) throw std::invalid_argument("element index out of range: " + token);
        return idx;
    }
    if (kind_ == GroupKind::Metacyclic) {
        // x, y, x^a, y^b, x^a*y^b
        long a = 0, b = 0;
        std::stringstream ss(token);
        std::string part;
        while (std::getline(ss, part, '*')) {
            if (part.empty()) throw std::invalid_argument("bad element token: " + token);
            long e = 1;
            char base = part[0];
            auto caret = part.find('^');
            if (caret != std::string::npos) e = std::stol(part.substr(caret + 1));
            if (base == 'x') a += e;
            else if (base == 'y') b += e;
            else throw std::invalid_argument("bad element token: " + token);
        }
        a %= mc_.p; if (a < 0) a += mc_.p;
        b %= mc_.m; if (b < 0) b += mc_.m;
        return encode(static_cast<int>(a), static_cast<int>(b));
    }
    throw std::invalid_argument("cannot parse element token '" + token + "' for " + spec_);
}

Subgroup normal_subgroup(const FiniteGroup& g) {
    const auto& mc = g.metacyclic_params();
    Subgroup s;
    s.parent = &g;
    s.members = ElemSet(g.order());
    for (int b = 0; b < mc.m; ++b) s.members.set(b);
    return s;
}

ElemSet normal_coset(const FiniteGroup& g, int i) {
    const auto& mc = g.metacyclic_params();
    ElemSet out(g.order());
    for (int b = 0; b < mc.m; ++b) out.set(g.encode(i, b));
    return out;
}

QuotientMap quotient_map(const FiniteGroup& g) {
    return QuotientMap{&g, normal_subgroup(g),
                       FiniteGroup::cyclic(static_cast<int>(g.metacyclic_params().p))};
}

std::vector<int> conjugation_orbit(const FiniteGroup& g, int u) {
    const auto& mc = g.metacyclic_params();
    if (!g.in_normal_subgroup(u))
        throw std::invalid_argument("conjugation_orbit: element is not in the normal subgroup");
    std::vector<int> orbit;
    orbit.reserve(mc.p);
    long b = g.normal_exponent(u);
    for (long s = 0; s < mc.p; ++s) {
        orbit.push_back(g.encode(0, static_cast<int>(b)));
        b = mc.m == 1 ? 0 : b * mc.r % mc.m;
    }
    return orbit;
}

std::vector<Subgroup> subgroups_of_normal(const FiniteGroup& g) {
    const auto& mc = g.metacyclic_params();
    std::vector<long> divisors;
    for (long d = 1; d <= mc.m; ++d)
        if (mc.m % d == 0) divisors.push_back(d);
    std::vector<Subgroup> out;
    for (long d : divisors) {
        Subgroup s;
        s.parent = &g;
        s.members = ElemSet(g.order());
        const long step = mc.m / d;  // generated by y^(m/d)
        for (long k = 0; k < d; ++k) s.members.set(static_cast<int>(k * step % mc.m));
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<MetacyclicParams> enumerate_valid_params(long pm_max) {
    std::vector<MetacyclicParams> out;
    for (long p = 2; p <= pm_max; ++p) {
        if (!is_prime(p)) continue;
        for (long m = 1; p * m <= pm_max; ++m) {
            const long r_hi = m == 1 ? 0 : m - 1;
            for (long r = 0; r <= r_hi; ++r) {
                ParamReport rep = validate_params(p, m, r);
                if (rep.ok) out.push_back(*rep.params);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const MetacyclicParams& a, const MetacyclicParams& b) {
        return std::tuple(a.p * a.m, a.p, a.r) < std::tuple(b.p * b.m, b.p, b.r);
    });
    return out;
}

std::optional<std::string> check_group_axioms(const FiniteGroup& g) {
    const int n = g.order();
    for (int a = 0; a < n; ++a) {
        if (g.mul(0, a) != a || g.mul(a, 0) != a)
            return "identity fails at element " + std::to_string(a);
        if (g.mul(a, g.inverse(a)) != 0 || g.mul(g.inverse(a), a) != 0)
            return "inverse fails at element " + std::to_string(a);
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
                    return "associativity fails at (" + std::to_string(a) + ", " +
                           std::to_string(b) + ", " + std::to_string(c) + ")";
    return std::nullopt;
}

}  // namespace zerosum

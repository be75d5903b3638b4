#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "heun/rational.hpp"

namespace heun {

/// Interned variable names. The monomial order fixes z < lambda < mu < t
/// ahead of every named parameter; parameters compare alphabetically.
class VarTable {
public:
    static VarTable& instance() {
        static VarTable t;
        return t;
    }

    int intern(const std::string& name) {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = ids_.find(name);
        if (it != ids_.end()) return it->second;
        int id = static_cast<int>(names_.size());
        names_.push_back(name);
        kinds_.push_back(kind_of(name));
        ids_.emplace(name, id);
        return id;
    }

    const std::string& name(int id) const { return names_[id]; }
    int kind(int id) const { return kinds_[id]; }

    /// true if a precedes b in the canonical variable order
    bool before(int a, int b) const {
        if (a == b) return false;
        if (kinds_[a] != kinds_[b]) return kinds_[a] < kinds_[b];
        return names_[a] < names_[b];
    }

private:
    static int kind_of(const std::string& n) {
        if (n == "z") return 0;
        if (n == "lambda") return 1;
        if (n == "mu") return 2;
        if (n == "t") return 3;
        return 4;
    }

    mutable std::mutex mu_;
    std::vector<std::string> names_;
    std::vector<int> kinds_;
    std::unordered_map<std::string, int> ids_;
};

struct Var {
    int id = -1;
    Var() = default;
    explicit Var(const std::string& name) : id(VarTable::instance().intern(name)) {}
    const std::string& name() const { return VarTable::instance().name(id); }
    bool operator==(const Var& o) const { return id == o.id; }
    bool operator!=(const Var& o) const { return id != o.id; }
};

inline bool var_before(int a, int b) { return VarTable::instance().before(a, b); }

/// Sparse exponent vector, entries (var id, exponent > 0) sorted by the
/// canonical variable order.
struct Monomial {
    std::vector<std::pair<int, int>> e;

    int total_degree() const {
        int d = 0;
        for (auto& [v, k] : e) d += k;
        return d;
    }
    int exponent(int var) const {
        for (auto& [v, k] : e)
            if (v == var) return k;
        return 0;
    }
    bool is_one() const { return e.empty(); }

    bool operator==(const Monomial& o) const { return e == o.e; }

    static Monomial one() { return {}; }
    static Monomial of(Var v, int k = 1) {
        Monomial m;
        if (k < 0) throw std::invalid_argument("Monomial: negative exponent");
        if (k > 0) m.e.push_back({v.id, k});
        return m;
    }

    Monomial operator*(const Monomial& o) const {
        Monomial r;
        r.e.reserve(e.size() + o.e.size());
        std::size_t i = 0, j = 0;
        while (i < e.size() && j < o.e.size()) {
            if (e[i].first == o.e[j].first) {
                r.e.push_back({e[i].first, e[i].second + o.e[j].second});
                ++i, ++j;
            } else if (var_before(e[i].first, o.e[j].first)) {
                r.e.push_back(e[i++]);
            } else {
                r.e.push_back(o.e[j++]);
            }
        }
        while (i < e.size()) r.e.push_back(e[i++]);
        while (j < o.e.size()) r.e.push_back(o.e[j++]);
        return r;
    }

    /// this / o, or nullopt when not divisible
    std::optional<Monomial> divide(const Monomial& o) const {
        Monomial r;
        std::size_t i = 0, j = 0;
        while (j < o.e.size()) {
            if (i >= e.size()) return std::nullopt;
            if (e[i].first == o.e[j].first) {
                int d = e[i].second - o.e[j].second;
                if (d < 0) return std::nullopt;
                if (d > 0) r.e.push_back({e[i].first, d});
                ++i, ++j;
            } else if (var_before(e[i].first, o.e[j].first)) {
                r.e.push_back(e[i++]);
            } else {
                return std::nullopt;
            }
        }
        while (i < e.size()) r.e.push_back(e[i++]);
        return r;
    }
};

/// Graded lexicographic order (total degree first, then lex with the
/// canonical variable order, earlier variable = more significant).
struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        int da = a.total_degree(), db = b.total_degree();
        if (da != db) return da < db;
        std::size_t i = 0, j = 0;
        while (i < a.e.size() && j < b.e.size()) {
            int va = a.e[i].first, vb = b.e[j].first;
            if (va == vb) {
                if (a.e[i].second != b.e[j].second) return a.e[i].second < b.e[j].second;
                ++i, ++j;
            } else if (var_before(va, vb)) {
                // a has positive exponent on an earlier variable
                return false;
            } else {
                return true;
            }
        }
        if (i < a.e.size()) return false;
        if (j < b.e.size()) return true;
        return false;
    }
};

/// Exact multivariate polynomial over Q. Canonical by construction: the
/// term map is grlex-sorted and never stores zero coefficients.
class MPoly {
public:
    using TermMap = std::map<Monomial, Rat, MonoLess>;

    MPoly() = default;
    MPoly(const Rat& c) {
        if (!c.is_zero()) terms_.emplace(Monomial::one(), c);
    }
    MPoly(int c) : MPoly(Rat(c)) {}
    static MPoly var(Var v, int k = 1) {
        MPoly p;
        if (k == 0) return MPoly(1);
        p.terms_.emplace(Monomial::of(v, k), Rat(1));
        return p;
    }
    static MPoly var(const std::string& name, int k = 1) { return var(Var(name), k); }
    static MPoly term(const Rat& c, const Monomial& m) {
        MPoly p;
        if (!c.is_zero()) p.terms_.emplace(m, c);
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
    }
    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        if (!is_constant()) throw std::logic_error("MPoly: not a constant");
        return terms_.begin()->second;
    }
    std::size_t term_count() const { return terms_.size(); }

    /// grlex-leading term
    const std::pair<const Monomial, Rat>& leading() const {
        if (terms_.empty()) throw std::logic_error("MPoly: leading term of 0");
        return *terms_.rbegin();
    }
    Rat leading_coeff() const { return terms_.empty() ? Rat(0) : terms_.rbegin()->second; }

    int total_degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.total_degree(); }

    int degree(Var v) const {
        int d = -1;
        for (auto& [m, c] : terms_) d = std::max(d, m.exponent(v.id));
        if (terms_.empty()) return -1;  // degree of 0 reported as -1
        return std::max(d, 0);
    }

    bool depends_on(Var v) const {
        for (auto& [m, c] : terms_)
            if (m.exponent(v.id) > 0) return true;
        return false;
    }

    /// smallest exponent of v over all terms (throws on the zero polynomial)
    int valuation(Var v) const {
        if (terms_.empty()) throw std::logic_error("MPoly::valuation of 0");
        int val = -1;
        for (auto& [m, c] : terms_) {
            int k = m.exponent(v.id);
            val = (val < 0) ? k : std::min(val, k);
            if (val == 0) break;
        }
        return val;
    }

    std::vector<int> vars_used() const {
        std::vector<int> r;
        for (auto& [m, c] : terms_)
            for (auto& [v, k] : m.e)
                if (std::find(r.begin(), r.end(), v) == r.end()) r.push_back(v);
        std::sort(r.begin(), r.end(), [](int a, int b) { return var_before(a, b); });
        return r;
    }

    MPoly operator-() const {
        MPoly r;
        for (auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    MPoly& operator+=(const MPoly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    MPoly& operator-=(const MPoly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
    friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }

    friend MPoly operator*(const MPoly& a, const MPoly& b) {
        MPoly r;
        if (a.is_zero() || b.is_zero()) return r;
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    MPoly& operator*=(const MPoly& o) { return *this = *this * o; }

    MPoly& operator*=(const Rat& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, cc] : terms_) cc *= c;
        return *this;
    }
    friend MPoly operator*(MPoly a, const Rat& c) { return a *= c; }
    friend MPoly operator*(const Rat& c, MPoly a) { return a *= c; }
    MPoly& operator/=(const Rat& c) {
        if (c.is_zero()) throw std::domain_error("MPoly: division by zero constant");
        for (auto& [m, cc] : terms_) cc /= c;
        return *this;
    }
    friend MPoly operator/(MPoly a, const Rat& c) { return a /= c; }

    MPoly pow(int k) const {
        if (k < 0) throw std::invalid_argument("MPoly::pow: negative exponent");
        MPoly r(1), base = *this;
        while (k > 0) {
            if (k & 1) r *= base;
            base = (k >>= 1) ? base * base : base;
        }
        return r;
    }

    friend bool operator==(const MPoly& a, const MPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const MPoly& a, const MPoly& b) { return !(a == b); }

    MPoly derivative(Var v) const {
        MPoly r;
        for (auto& [m, c] : terms_) {
            int k = m.exponent(v.id);
            if (k == 0) continue;
            Monomial m2;
            for (auto& [vv, kk] : m.e) {
                if (vv == v.id) {
                    if (kk > 1) m2.e.push_back({vv, kk - 1});
                } else {
                    m2.e.push_back({vv, kk});
                }
            }
            r.add_term(m2, c * Rat(k));
        }
        return r;
    }

    /// coefficient of v^k, a polynomial in the remaining variables
    MPoly coeff_of(Var v, int k) const {
        MPoly r;
        for (auto& [m, c] : terms_) {
            if (m.exponent(v.id) != k) continue;
            Monomial m2;
            for (auto& [vv, kk] : m.e)
                if (vv != v.id) m2.e.push_back({vv, kk});
            r.add_term(m2, c);
        }
        return r;
    }

    /// dense coefficient list [c0..cd] of this viewed in v
    std::vector<MPoly> coeffs_in(Var v) const {
        int d = std::max(degree(v), 0);
        std::vector<MPoly> r(static_cast<std::size_t>(d) + 1);
        for (auto& [m, c] : terms_) {
            int k = m.exponent(v.id);
            Monomial m2;
            for (auto& [vv, kk] : m.e)
                if (vv != v.id) m2.e.push_back({vv, kk});
            r[static_cast<std::size_t>(k)].add_term(m2, c);
        }
        return r;
    }

    static MPoly from_coeffs(Var v, const std::vector<MPoly>& cs) {
        MPoly r;
        for (std::size_t k = 0; k < cs.size(); ++k) {
            MPoly t = cs[k] * MPoly::var(v, static_cast<int>(k));
            r += t;
        }
        return r;
    }

    /// substitute a polynomial value for a variable (polynomial result);
    /// rational-function substitution lives with RatFunc
    MPoly subst(Var v, const MPoly& value) const {
        auto cs = coeffs_in(v);
        MPoly r, p(1);
        for (std::size_t k = 0; k < cs.size(); ++k) {
            if (!cs[k].is_zero()) r += cs[k] * p;
            if (k + 1 < cs.size()) p *= value;
        }
        return r;
    }

    MPoly subst(Var v, const Rat& value) const { return subst(v, MPoly(value)); }

    /// rename a variable (the target must not occur)
    MPoly rename(Var from, Var to) const {
        if (depends_on(to)) throw std::logic_error("MPoly::rename: target variable present");
        MPoly r;
        for (auto& [m, c] : terms_) {
            Monomial m2;
            for (auto& [vv, kk] : m.e) m2.e.push_back({vv == from.id ? to.id : vv, kk});
            std::sort(m2.e.begin(), m2.e.end(),
                      [](auto& a, auto& b) { return var_before(a.first, b.first); });
            r.add_term(m2, c);
        }
        return r;
    }

    /// rational content: gcd of all coefficients (positive), 0 for the zero poly
    Rat content() const {
        Rat g(0);
        for (auto& [m, c] : terms_) g = Rat::gcd(g, c);
        return g;
    }

    /// this with content removed and leading coefficient made positive
    MPoly primitive_part() const {
        if (is_zero()) return *this;
        Rat g = content();
        if (leading_coeff().sign() < 0) g = -g;
        return *this / g;
    }

    /// exact division: returns quotient iff divisor divides exactly
    std::optional<MPoly> divide_exact(const MPoly& d) const {
        if (d.is_zero()) throw std::domain_error("MPoly: division by zero");
        MPoly rem = *this, q;
        auto& dl = *d.terms_.rbegin();
        while (!rem.is_zero()) {
            auto& rl = *rem.terms_.rbegin();
            auto mq = rl.first.divide(dl.first);
            if (!mq) return std::nullopt;
            Rat cq = rl.second / dl.second;
            MPoly t = MPoly::term(cq, *mq);
            q += t;
            rem -= t * d;
        }
        return q;
    }

    bool divides(const MPoly& other) const { return other.divide_exact(*this).has_value(); }

    /// evaluate with every variable assigned; throws if one is missing
    Rat eval(const std::map<int, Rat>& point) const {
        Rat r(0);
        for (auto& [m, c] : terms_) {
            Rat t = c;
            for (auto& [v, k] : m.e) {
                auto it = point.find(v);
                if (it == point.end()) throw std::logic_error("MPoly::eval: unassigned variable");
                Rat p(1);
                for (int i = 0; i < k; ++i) p *= it->second;
                t *= p;
            }
            r += t;
        }
        return r;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        // highest grlex term first
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const Rat& c = it->second;
            Rat ac = c.abs();
            if (first) {
                if (c.sign() < 0) os << "-";
                first = false;
            } else {
                os << (c.sign() < 0 ? " - " : " + ");
            }
            if (it->first.is_one()) {
                os << ac;
            } else {
                bool coeff_shown = !ac.is_one();
                if (coeff_shown) os << ac;
                bool first_var = true;
                for (auto& [v, k] : it->first.e) {
                    if (coeff_shown || !first_var) os << "*";
                    os << VarTable::instance().name(v);
                    if (k > 1) os << "^" << k;
                    first_var = false;
                }
            }
        }
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const MPoly& p) { return os << p.str(); }

private:
    void add_term(const Monomial& m, const Rat& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    TermMap terms_;
};

inline Var zvar() { return Var("z"); }
inline Var lambdavar() { return Var("lambda"); }
inline Var muvar() { return Var("mu"); }
inline Var tvar() { return Var("t"); }

}  // namespace heun

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "heun/errors.hpp"
#include "heun/mpoly.hpp"
#include "heun/mpoly_gcd.hpp"

namespace heun {

/// Exact rational function over Q in the kernel's variables. Canonical form:
/// gcd(num, den) constant and the grlex-leading coefficient of den equal 1,
/// so equal functions have identical stored representations.
class RatFunc {
public:
    RatFunc() : num_(0), den_(1) {}
    RatFunc(const Rat& c) : num_(c), den_(1) {}
    RatFunc(int c) : num_(c), den_(1) {}
    RatFunc(const MPoly& p) : num_(p), den_(1) {}
    RatFunc(MPoly num, MPoly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

    static RatFunc var(const std::string& name, int k = 1) { return RatFunc(MPoly::var(name, k)); }
    static RatFunc var(Var v, int k = 1) { return RatFunc(MPoly::var(v, k)); }

    const MPoly& num() const { return num_; }
    const MPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rat constant_value() const {
        if (!is_constant()) throw std::logic_error("RatFunc: not a constant");
        return num_.constant_value() / den_.constant_value();
    }
    const MPoly& to_mpoly() const {
        if (!is_polynomial()) throw std::logic_error("RatFunc: not a polynomial");
        return num_;
    }
    bool depends_on(Var v) const { return num_.depends_on(v) || den_.depends_on(v); }

    RatFunc operator-() const {
        RatFunc r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
        MPoly g = mpoly_gcd(a.den_, b.den_);
        if (g.is_constant()) return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
        MPoly da = *a.den_.divide_exact(g);
        MPoly db = *b.den_.divide_exact(g);
        return RatFunc(a.num_ * db + b.num_ * da, a.den_ * db);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero() || b.is_zero()) return RatFunc();
        // cross-cancel before multiplying
        MPoly g1 = mpoly_gcd(a.num_, b.den_);
        MPoly g2 = mpoly_gcd(b.num_, a.den_);
        MPoly n1 = g1.is_constant() ? a.num_ : *a.num_.divide_exact(g1);
        MPoly d2 = g1.is_constant() ? b.den_ : *b.den_.divide_exact(g1);
        MPoly n2 = g2.is_constant() ? b.num_ : *b.num_.divide_exact(g2);
        MPoly d1 = g2.is_constant() ? a.den_ : *a.den_.divide_exact(g2);
        RatFunc r;
        r.num_ = n1 * n2;
        r.den_ = d1 * d2;
        r.scale_den();
        return r;
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw DivisionByZero("rational function division");
        RatFunc binv;
        binv.num_ = b.den_;
        binv.den_ = b.num_;
        binv.scale_den();
        return a * binv;
    }

    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

    friend RatFunc operator+(const RatFunc& a, const Rat& c) { return a + RatFunc(c); }
    friend RatFunc operator*(const RatFunc& a, const Rat& c) {
        RatFunc r;
        r.num_ = a.num_ * c;
        r.den_ = a.den_;
        return r;
    }
    friend RatFunc operator*(const Rat& c, const RatFunc& a) { return a * c; }

    RatFunc pow(int k) const {
        if (k == 0) return RatFunc(1);
        RatFunc base = *this;
        if (k < 0) {
            base = RatFunc(1) / base;
            k = -k;
        }
        RatFunc r;
        r.num_ = base.num_.pow(k);
        r.den_ = base.den_.pow(k);
        r.scale_den();
        return r;
    }

    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    RatFunc derivative(Var v) const {
        if (!den_.depends_on(v)) {
            RatFunc r;
            r.num_ = num_.derivative(v);
            r.den_ = den_;
            r.reduce();
            return r;
        }
        MPoly n = num_.derivative(v) * den_ - num_ * den_.derivative(v);
        return RatFunc(std::move(n), den_ * den_);
    }

    /// substitute an arbitrary rational function for a variable
    RatFunc subst(Var v, const RatFunc& value) const {
        if (!depends_on(v)) return *this;
        RatFunc n = subst_poly(num_, v, value);
        RatFunc d = subst_poly(den_, v, value);
        if (d.is_zero()) throw DivisionByZero("substitution makes denominator vanish identically");
        return n / d;
    }
    RatFunc subst(Var v, const Rat& value) const { return subst(v, RatFunc(value)); }

    RatFunc rename(Var from, Var to) const {
        RatFunc r;
        r.num_ = num_.rename(from, to);
        r.den_ = den_.rename(from, to);
        r.scale_den();  // the grlex leader may change under renaming
        return r;
    }

    /// evaluate at a full assignment (throws DivisionByZero on a pole)
    Rat eval(const std::map<int, Rat>& point) const {
        Rat d = den_.eval(point);
        if (d.is_zero()) throw DivisionByZero("evaluation at a pole");
        return num_.eval(point) / d;
    }

    std::string str() const {
        if (is_polynomial()) {
            if (den_.constant_value().is_one()) return num_.str();
            return "(" + num_.str() + ")/" + den_.constant_value().str();
        }
        return "(" + num_.str() + ")/(" + den_.str() + ")";
    }
    friend std::ostream& operator<<(std::ostream& os, const RatFunc& f) { return os << f.str(); }

private:
    static RatFunc subst_poly(const MPoly& p, Var v, const RatFunc& value) {
        auto cs = p.coeffs_in(v);
        // Horner, tracking the value's numerator/denominator separately:
        // p(g) = sum c_k g^k = (sum c_k N^k D^(d-k)) / D^d
        const MPoly& N = value.num();
        const MPoly& D = value.den();
        int d = static_cast<int>(cs.size()) - 1;
        MPoly acc(0);
        for (int k = d; k >= 0; --k) {
            acc = acc * N + cs[static_cast<std::size_t>(k)] * D.pow(d - k);
        }
        return RatFunc(std::move(acc), D.pow(d));
    }

    void reduce() {
        MPoly g = mpoly_gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = *num_.divide_exact(g);
            den_ = *den_.divide_exact(g);
        }
        scale_den();
    }

    void scale_den() {
        if (den_.is_zero()) throw DivisionByZero("zero denominator");
        if (num_.is_zero()) {
            den_ = MPoly(1);
            return;
        }
        Rat lc = den_.leading_coeff();
        if (!lc.is_one()) {
            den_ /= lc;
            num_ /= lc;
        }
    }

    void normalize() {
        if (den_.is_zero()) throw DivisionByZero("zero denominator");
        if (num_.is_zero()) {
            den_ = MPoly(1);
            return;
        }
        reduce();
    }

    MPoly num_, den_;
};

inline RatFunc operator-(const RatFunc& a, const Rat& c) { return a - RatFunc(c); }
inline RatFunc operator+(const Rat& c, const RatFunc& a) { return a + RatFunc(c); }
inline RatFunc operator-(const Rat& c, const RatFunc& a) { return RatFunc(c) - a; }

}  // namespace heun

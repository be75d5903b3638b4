#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace heun {

/// Arbitrary-precision rational number. Thin value wrapper around GMP's
/// mpq_class kept in canonical form: gcd(|num|, den) = 1 and den > 0.
class Rat {
public:
    Rat() : v_(0) {}
    Rat(int n) : v_(n) {}
    Rat(long n) : v_(static_cast<long int>(n)) {}
    Rat(int num, int den) : v_(num, den) {
        if (den == 0) throw std::domain_error("Rat: zero denominator");
        v_.canonicalize();
    }
    explicit Rat(const mpq_class& q) : v_(q) { v_.canonicalize(); }
    explicit Rat(const mpz_class& n) : v_(n) {}

    /// Parses "p", "-p" or "p/q".
    static Rat parse(const std::string& s) {
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("Rat: bad literal '" + s + "'");
        if (q.get_den() == 0) throw std::domain_error("Rat: zero denominator in '" + s + "'");
        q.canonicalize();
        return Rat(q);
    }

    const mpq_class& mpq() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw std::domain_error("Rat: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

    Rat abs() const { return Rat(mpq_class(::abs(v_))); }

    /// gcd in the rational sense: gcd(a/b, c/d) = gcd(a,c)/lcm(b,d).
    /// Used to extract contents of polynomials.
    static Rat gcd(const Rat& a, const Rat& b) {
        if (a.is_zero()) return b.abs();
        if (b.is_zero()) return a.abs();
        mpz_class gn, lb;
        mpz_gcd(gn.get_mpz_t(), a.num().get_mpz_t(), b.num().get_mpz_t());
        mpz_lcm(lb.get_mpz_t(), a.den().get_mpz_t(), b.den().get_mpz_t());
        mpq_class r(gn, lb);
        r.canonicalize();
        return Rat(r);
    }

    /// Exact square root if it exists (both |num| and den perfect squares,
    /// value nonnegative); returns false otherwise.
    bool sqrt_exact(Rat& out) const {
        if (sign() < 0) return false;
        mpz_class n = num(), d = den();
        if (mpz_perfect_square_p(n.get_mpz_t()) == 0) return false;
        if (mpz_perfect_square_p(d.get_mpz_t()) == 0) return false;
        mpz_class sn, sd;
        mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
        mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
        out = Rat(mpq_class(sn, sd));
        return true;
    }

    /// Largest integer n with n <= value.
    mpz_class floor() const {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
        return q;
    }

    double to_double() const { return v_.get_d(); }

    std::string str() const {
        std::ostringstream os;
        os << v_;
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.v_; }

    std::size_t hash() const {
        // cheap: fold low limbs of num and den
        std::size_t h = mpz_get_ui(v_.get_num().get_mpz_t());
        h = h * 1000003u + mpz_get_ui(v_.get_den().get_mpz_t());
        if (sign() < 0) h = ~h;
        return h;
    }

private:
    mpq_class v_;
};

}  // namespace heun

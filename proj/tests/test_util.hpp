#pragma once

#include <random>
#include <vector>

#include "heun/mpoly.hpp"
#include "heun/ratfunc.hpp"

namespace heun::testutil {

/// deterministic random polynomials for property tests
class PolyGen {
public:
    explicit PolyGen(unsigned seed) : rng_(seed) {}

    Rat rat(int lo = -9, int hi = 9) {
        std::uniform_int_distribution<int> num(lo, hi);
        std::uniform_int_distribution<int> den(1, 6);
        return Rat(num(rng_), den(rng_));
    }

    Rat nonzero_rat(int lo = -9, int hi = 9) {
        Rat r;
        do {
            r = rat(lo, hi);
        } while (r.is_zero());
        return r;
    }

    int uniform(int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(rng_);
    }

    /// random polynomial in the given variables with total degree <= deg
    MPoly poly(const std::vector<Var>& vars, int deg, int terms) {
        MPoly p;
        for (int i = 0; i < terms; ++i) {
            Monomial m;
            int budget = uniform(0, deg);
            for (auto v : vars) {
                if (budget <= 0) break;
                int e = uniform(0, budget);
                if (e > 0) m = m * Monomial::of(v, e);
                budget -= e;
            }
            p += MPoly::term(rat(), m);
        }
        return p;
    }

    MPoly nonzero_poly(const std::vector<Var>& vars, int deg, int terms) {
        MPoly p;
        do {
            p = poly(vars, deg, terms);
        } while (p.is_zero());
        return p;
    }

    /// univariate in v of exact degree deg
    MPoly uni(Var v, int deg) {
        MPoly p = MPoly::term(nonzero_rat(), Monomial::of(v, deg));
        for (int k = 0; k < deg; ++k) p += MPoly::term(rat(), Monomial::of(v, k));
        return p;
    }

    RatFunc ratfunc(const std::vector<Var>& vars, int deg, int terms) {
        MPoly n = poly(vars, deg, terms);
        MPoly d = nonzero_poly(vars, deg, terms);
        return RatFunc(n, d);
    }

    std::mt19937& rng() { return rng_; }

private:
    std::mt19937 rng_;
};

/// truncated power-series helpers over Rat, independent of the kernel's
/// Laurent code; used as an oracle
using Series = std::vector<Rat>;  // s[k] = coefficient of x^k

inline Series series_mul(const Series& a, const Series& b, std::size_t n) {
    Series r(n, Rat(0));
    for (std::size_t i = 0; i < a.size() && i < n; ++i)
        for (std::size_t j = 0; j < b.size() && i + j < n; ++j) r[i + j] += a[i] * b[j];
    return r;
}

/// 1 / (c0 + c1 x + ...) with c0 != 0, to n terms
inline Series series_inv(const Series& c, std::size_t n) {
    Series r(n, Rat(0));
    r[0] = Rat(1) / c[0];
    for (std::size_t k = 1; k < n; ++k) {
        Rat acc(0);
        for (std::size_t j = 1; j <= k; ++j)
            if (j < c.size()) acc += c[j] * r[k - j];
        r[k] = -acc / c[0];
    }
    return r;
}

}  // namespace heun::testutil

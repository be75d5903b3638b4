#pragma once

#include <map>
#include <string>
#include <vector>

#include "heun/errors.hpp"
#include "heun/ratfunc.hpp"

namespace heun {

/// A point on the Riemann sphere: a finite value (any z-free rational
/// expression, so symbolic points like t or lambda are allowed) or infinity.
struct Point {
    bool infinite = false;
    RatFunc value;  // meaningful when finite

    static Point finite(const RatFunc& v) { return Point{false, v}; }
    static Point finite(const Rat& v) { return Point{false, RatFunc(v)}; }
    static Point finite(int v) { return Point{false, RatFunc(v)}; }
    static Point inf() { return Point{true, RatFunc()}; }

    bool operator==(const Point& o) const {
        return infinite == o.infinite && (infinite || value == o.value);
    }
    std::string str() const { return infinite ? "inf" : value.str(); }
};

/// How to treat parameter-dependent leading coefficients: Generic assumes
/// named parameters are transcendental (nonzero polynomial => nonzero value),
/// Strict refuses to decide and throws UndecidableLeadingCoefficient.
enum class ParamPolicy { Generic, Strict };

using AssumptionLog = std::vector<std::string>;

namespace detail {

inline void note_nonzero(const MPoly& c, ParamPolicy policy, AssumptionLog* log) {
    if (c.is_constant()) return;
    if (policy == ParamPolicy::Strict)
        throw UndecidableLeadingCoefficient("leading coefficient depends on parameters: " +
                                            c.str());
    if (log) log->push_back(c.str() + " != 0");
}

}  // namespace detail

/// Truncated Laurent expansion around a finite center or infinity. Finite
/// center: coefficients of (z - z0)^k. Infinity: coefficients of z^k.
struct LaurentExpansion {
    Point center;
    std::map<int, RatFunc> coeffs;  // k -> coefficient, k in [k_min, k_max]
    int k_min = 0, k_max = -1;
    bool exact_below = true;  // all coefficients below k_min vanish

    RatFunc coeff(int k) const {
        auto it = coeffs.find(k);
        return it == coeffs.end() ? RatFunc() : it->second;
    }
};

/// Laurent coefficients of f in var around the given point, exact for
/// k in [k_min, k_max].
inline LaurentExpansion laurent(const RatFunc& f, Var var, const Point& point, int k_min,
                                int k_max, ParamPolicy policy = ParamPolicy::Generic,
                                AssumptionLog* log = nullptr) {
    LaurentExpansion out;
    out.center = point;
    out.k_min = k_min;
    out.k_max = k_max;
    if (f.is_zero()) {
        for (int k = k_min; k <= k_max; ++k) out.coeffs[k] = RatFunc();
        return out;
    }

    if (point.infinite) {
        // z = 1/w; coefficient of z^k is the w-expansion coefficient at -k
        Var w("~w");
        RatFunc g = f.subst(var, RatFunc(MPoly(1), MPoly::var(w)));
        g = g.rename(w, var);
        LaurentExpansion inner =
            laurent(g, var, Point::finite(Rat(0)), -k_max, -k_min, policy, log);
        for (int k = k_min; k <= k_max; ++k) out.coeffs[k] = inner.coeff(-k);
        out.exact_below = false;  // "below" in z means k < k_min, which is the tail here
        return out;
    }

    if (point.value.depends_on(var))
        throw ZeroDenominatorAtLocalization("expansion center depends on the series variable");

    Var u("~u");
    RatFunc shifted = f.subst(var, RatFunc(MPoly::var(u)) + point.value);
    const MPoly& N = shifted.num();
    const MPoly& D = shifted.den();
    if (D.is_zero()) throw ZeroDenominatorAtLocalization("denominator vanishes identically");

    int vN = N.valuation(u), vD = D.valuation(u);
    auto nc = N.coeffs_in(u);
    auto dc = D.coeffs_in(u);
    detail::note_nonzero(nc[static_cast<std::size_t>(vN)], policy, log);
    detail::note_nonzero(dc[static_cast<std::size_t>(vD)], policy, log);

    int lead = vN - vD;  // lowest order of f in u
    out.exact_below = (lead >= k_min);
    // c'_j for j = 0.. : coefficients of (N/u^vN) / (D/u^vD)
    int need = k_max - lead;  // highest j required
    std::vector<RatFunc> c;
    if (need >= 0) {
        c.resize(static_cast<std::size_t>(need) + 1);
        RatFunc d0 = RatFunc(dc[static_cast<std::size_t>(vD)]);
        for (int j = 0; j <= need; ++j) {
            RatFunc acc = (vN + j < static_cast<int>(nc.size()))
                              ? RatFunc(nc[static_cast<std::size_t>(vN + j)])
                              : RatFunc();
            for (int i = 0; i < j; ++i) {
                int di = vD + j - i;
                if (di < static_cast<int>(dc.size()))
                    acc -= c[static_cast<std::size_t>(i)] * RatFunc(dc[static_cast<std::size_t>(di)]);
            }
            c[static_cast<std::size_t>(j)] = acc / d0;
        }
    }
    for (int k = k_min; k <= k_max; ++k) {
        int j = k - lead;
        out.coeffs[k] = (j >= 0) ? c[static_cast<std::size_t>(j)] : RatFunc();
    }
    return out;
}

/// Degree of the singularity of f at a point: order of the pole at a finite
/// point (negative if f vanishes there), top power at infinity. For a
/// polynomial, degree at infinity is its ordinary degree.
inline int degree_at(const RatFunc& f, Var var, const Point& point,
                     ParamPolicy policy = ParamPolicy::Generic, AssumptionLog* log = nullptr) {
    if (f.is_zero()) throw ZeroFunction("degree_at of the zero function");

    if (point.infinite) {
        // f(1/w): a pole of order k at w = 0 means top power z^k at infinity
        Var w("~w");
        RatFunc g = f.subst(var, RatFunc(MPoly(1), MPoly::var(w)));
        g = g.rename(w, var);
        return degree_at(g, var, Point::finite(Rat(0)), policy, log);
    }
    if (point.value.depends_on(var))
        throw ZeroDenominatorAtLocalization("point depends on the variable");

    Var u("~u");
    RatFunc shifted = f.subst(var, RatFunc(MPoly::var(u)) + point.value);
    const MPoly& N = shifted.num();
    const MPoly& D = shifted.den();
    int vN = N.valuation(u), vD = D.valuation(u);
    detail::note_nonzero(N.coeffs_in(u)[static_cast<std::size_t>(vN)], policy, log);
    detail::note_nonzero(D.coeffs_in(u)[static_cast<std::size_t>(vD)], policy, log);
    return vD - vN;
}

/// f composed with the homography z = (d w - b)/(-c w + a), ad - bc != 0,
/// returned in the same variable name.
inline RatFunc substitute_moebius(const RatFunc& f, Var var, const Rat& a, const Rat& b,
                                  const Rat& c, const Rat& d) {
    if ((a * d - b * c).is_zero()) throw SingularHomography("ad - bc = 0");
    Var w("~w");
    MPoly wm = MPoly::var(w);
    RatFunc image(MPoly(d) * wm - MPoly(b), MPoly(-c) * wm + MPoly(a));
    RatFunc g = f.subst(var, image);
    return g.rename(w, var);
}

/// Kernel self-tests from the appendix lemma of identities: checks every
/// identity applicable to deg(xi) as an exact identity in z and lambda.
inline bool appendix_identities_check(const MPoly& xi, const Rat& s) {
    Var z = zvar(), lam = lambdavar();
    int d = xi.degree(z);
    if (d > 3) throw DegreeBoundViolated("deg xi = " + std::to_string(d) + " > 3");

    RatFunc zf = RatFunc::var(z), lf = RatFunc::var(lam);
    RatFunc zs = zf - RatFunc(s), ls = lf - RatFunc(s), zl = zf - lf;

    // two fixed partial-fraction identities
    RatFunc lhs1 = (ls / zl) * (RatFunc(1) / zs - RatFunc(1) / ls + zl / (ls * ls));
    RatFunc rhs1 = RatFunc(1) / ls - RatFunc(1) / zs;
    if (lhs1 != rhs1) return false;

    RatFunc lhs2 = RatFunc(2) / zs - RatFunc(2) / ls +
                   zl * (RatFunc(1) / (zs * zs) + RatFunc(1) / (ls * ls));
    RatFunc rhs2 = zl.pow(3) / (zs.pow(2) * ls.pow(2));
    if (lhs2 != rhs2) return false;

    RatFunc xiz(xi);
    RatFunc xil = RatFunc(xi.subst(z, MPoly::var(lam)));
    RatFunc dxiz(xi.derivative(z));
    RatFunc dxil = RatFunc(xi.derivative(z).subst(z, MPoly::var(lam)));
    RatFunc xis = RatFunc(xi.subst(z, s));
    RatFunc psi = xiz / zs;
    RatFunc psil = xil / ls;
    RatFunc dpsi = psi.derivative(z);

    if (d <= 2) {
        RatFunc xi2(xi.derivative(z).derivative(z));  // constant
        RatFunc lhs = xiz - xil - zl * dxiz;
        RatFunc rhs = RatFunc(Rat(-1, 2)) * xi2 * zl * zl;
        if (lhs != rhs) return false;

        RatFunc lhsp = psi - psil - zl * dpsi;
        RatFunc rhsp = -(xis * zl * zl) / (zs * zs * ls);
        if (lhsp != rhsp) return false;
    }
    if (d <= 3) {
        RatFunc xi3(xi.derivative(z).derivative(z).derivative(z));  // constant
        RatFunc lhs = RatFunc(2) * (xiz - xil) - zl * (dxiz + dxil);
        RatFunc rhs = RatFunc(Rat(-1, 6)) * xi3 * zl.pow(3);
        if (lhs != rhs) return false;

        RatFunc dpsil = psil.derivative(lam);
        RatFunc lhsp = RatFunc(2) * (psi - psil) - zl * (dpsi + dpsil);
        RatFunc rhsp = xis * zl.pow(3) / (zs.pow(2) * ls.pow(2));
        if (lhsp != rhsp) return false;
    }
    return true;
}

}  // namespace heun

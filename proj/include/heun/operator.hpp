#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "heun/laurent.hpp"
#include "heun/ratfunc.hpp"

namespace heun {

/// The principal operator d^2/dz^2 + p(z) d/dz + q(z).
struct PrincipalOperator {
    RatFunc p, q;

    bool operator==(const PrincipalOperator& o) const { return p == o.p && q == o.q; }
    std::string str() const { return "d2 + (" + p.str() + ") d + (" + q.str() + ")"; }
};

/// Conjugation A -> e^(-r) A e^(r) for a scalar gauge factor with logarithmic
/// derivative rprime: p gains 2 r', q gains p r' + r'^2 + r''.
inline PrincipalOperator conjugate(const PrincipalOperator& A, const RatFunc& rprime) {
    Var z = zvar();
    PrincipalOperator out;
    out.p = A.p + RatFunc(2) * rprime;
    out.q = A.q + A.p * rprime + rprime * rprime + rprime.derivative(z);
    return out;
}

/// z = phi(w), phi a homography (or any rational change of variable with
/// nonvanishing derivative); returns the principal operator in w, with the
/// variable renamed back to z.
inline PrincipalOperator change_variable(const PrincipalOperator& A, const RatFunc& phi_of_w,
                                         Var w) {
    Var z = zvar();
    RatFunc phi = phi_of_w;
    RatFunc dphi = phi.derivative(w);
    if (dphi.is_zero()) throw SingularHomography("constant substitution");
    RatFunc ddphi = dphi.derivative(w);
    RatFunc phat = A.p.subst(z, phi);
    RatFunc qhat = A.q.subst(z, phi);
    PrincipalOperator out;
    out.p = (-(ddphi / dphi) + dphi * phat).rename(w, z);
    out.q = (dphi * dphi * qhat).rename(w, z);
    return out;
}

/// Raw gauge step r' = kappa/(z - z0), i.e. conjugation by (z - z0)^kappa:
/// solutions of the input are (z - z0)^kappa times solutions of the output,
/// so output indices at z0 are the input's shifted by -kappa. Rank is
/// preserved when > 1.
struct PowerStep {
    RatFunc site;  // finite point
    RatFunc kappa;

    PrincipalOperator apply(const PrincipalOperator& A) const {
        RatFunc zs = RatFunc::var(zvar()) - site;
        return conjugate(A, kappa / zs);
    }
    std::string str() const {
        return "power(site=" + site.str() + ", kappa=" + kappa.str() + ")";
    }
};

/// Exponential sandwich. Finite site, k >= 2: r' = kappa (z - z0)^(-k).
/// Infinite site, k >= 1: r' = kappa z^k. Leaves p_{-1}, q_{-1}, q_{-2}
/// at the site unchanged, hence also its indices.
struct ExpStep {
    Point site;
    int k = 2;
    RatFunc kappa;

    PrincipalOperator apply(const PrincipalOperator& A) const {
        RatFunc zf = RatFunc::var(zvar());
        if (site.infinite) {
            // k = 0 is the entire gauge e^(kappa z)
            if (k < 0) throw std::invalid_argument("ExpStep at infinity needs k >= 0");
            return conjugate(A, kappa * zf.pow(k));
        }
        if (k < 2) throw std::invalid_argument("finite ExpStep needs k >= 2");
        return conjugate(A, kappa * (zf - site.value).pow(-k));
    }
    std::string str() const {
        return "exp(site=" + site.str() + ", k=" + std::to_string(k) +
               ", kappa=" + kappa.str() + ")";
    }
};

/// Change of variable z = (d w - b)/(-c w + a), ad - bc != 0.
struct MoebiusStep {
    RatFunc a, b, c, d;

    RatFunc phi() const {
        Var w("~w");
        RatFunc wf = RatFunc::var(w);
        return (d * wf - b) / (-(c * wf) + a);
    }
    PrincipalOperator apply(const PrincipalOperator& A) const {
        if ((a * d - b * c).is_zero()) throw SingularHomography("ad - bc = 0");
        return change_variable(A, phi(), Var("~w"));
    }
    /// image of a point under the forward map w = (a z + b)/(c z + d)
    Point map_point(const Point& pt) const {
        if (pt.infinite) {
            if (c.is_zero()) return Point::inf();
            return Point::finite(a / c);
        }
        RatFunc den = c * pt.value + d;
        if (den.is_zero()) return Point::inf();
        return Point::finite((a * pt.value + b) / den);
    }
    static MoebiusStep translate(const RatFunc& z0) {
        // z = w + z0  <->  w = z - z0
        return MoebiusStep{RatFunc(1), -z0, RatFunc(0), RatFunc(1)};
    }
    static MoebiusStep affine(const RatFunc& scale, const RatFunc& shift) {
        // z = scale * w + shift  <->  w = (z - shift)/scale
        return MoebiusStep{RatFunc(1) / scale, -(shift / scale), RatFunc(0), RatFunc(1)};
    }
    static MoebiusStep inversion() {
        // z = 1/w
        return MoebiusStep{RatFunc(0), RatFunc(1), RatFunc(1), RatFunc(0)};
    }
    std::string str() const {
        return "moebius(a=" + a.str() + ", b=" + b.str() + ", c=" + c.str() + ", d=" + d.str() +
               ")";
    }
};

/// z = y^2 around 0; the result is the principal operator in y (renamed z).
struct QuadraticStep {
    PrincipalOperator apply(const PrincipalOperator& A) const {
        Var z = zvar(), y("~y");
        RatFunc yf = RatFunc::var(y);
        RatFunc p2 = A.p.subst(z, yf * yf);
        RatFunc q2 = A.q.subst(z, yf * yf);
        PrincipalOperator out;
        out.p = (RatFunc(2) * yf * (p2 - RatFunc(MPoly(1), MPoly(2) * MPoly::var(y, 2))))
                    .rename(y, z);
        out.q = (RatFunc(4) * yf * yf * q2).rename(y, z);
        return out;
    }
    std::string str() const { return "quadratic(z = y^2)"; }
};

using TransformStep = std::variant<PowerStep, ExpStep, MoebiusStep, QuadraticStep>;

inline PrincipalOperator apply_step(const PrincipalOperator& A, const TransformStep& s) {
    return std::visit([&](auto& st) { return st.apply(A); }, s);
}
inline std::string step_str(const TransformStep& s) {
    return std::visit([](auto& st) { return st.str(); }, s);
}

/// Ordered list of transformations; replaying on the original operator
/// reproduces the transformed operator exactly.
struct TransformRecord {
    std::vector<TransformStep> steps;

    PrincipalOperator replay(PrincipalOperator A) const {
        for (auto& s : steps) A = apply_step(A, s);
        return A;
    }
    void push(TransformStep s) { steps.push_back(std::move(s)); }
    void append(const TransformRecord& other) {
        steps.insert(steps.end(), other.steps.begin(), other.steps.end());
    }
    bool empty() const { return steps.empty(); }
    std::string str() const {
        std::string out;
        for (auto& s : steps) {
            if (!out.empty()) out += "; ";
            out += step_str(s);
        }
        return out.empty() ? "(identity)" : out;
    }
};

/// Power sandwich normalized so the indices at z0 shift by +kappa (and the
/// indices at infinity by -kappa): conjugation by (z - z0)^(-kappa).
inline PrincipalOperator sandwich_power(const PrincipalOperator& A, const RatFunc& z0,
                                        const RatFunc& kappa) {
    return PowerStep{z0, -kappa}.apply(A);
}

inline PrincipalOperator sandwich_exp(const PrincipalOperator& A, const Point& site,
                                      const RatFunc& kappa, int k) {
    return ExpStep{site, k, kappa}.apply(A);
}

}  // namespace heun

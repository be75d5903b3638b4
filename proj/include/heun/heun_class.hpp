#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "heun/sing_analysis.hpp"

namespace heun {

/// sigma kept in factored form: lead * prod (z - root_i)^mult_i
struct SigmaFactored {
    RatFunc lead = RatFunc(1);
    std::vector<std::pair<RatFunc, int>> roots;  // z-free root, multiplicity

    int degree() const {
        int d = 0;
        for (auto& [r, m] : roots) d += m;
        return d;
    }
    MPoly poly() const {
        if (lead.is_zero()) throw NotHeunClass("sigma = 0");
        RatFunc p = lead;
        RatFunc zf = RatFunc::var(zvar());
        for (auto& [r, m] : roots) p *= (zf - r).pow(m);
        if (!p.is_polynomial()) throw NotHeunClass("sigma roots must be z-free");
        return p.to_mpoly();
    }
    static SigmaFactored constant(const Rat& c) { return SigmaFactored{RatFunc(c), {}}; }
    static SigmaFactored from_roots(std::vector<RatFunc> rs, const RatFunc& lead = RatFunc(1)) {
        SigmaFactored s;
        s.lead = lead;
        for (auto& r : rs) {
            bool merged = false;
            for (auto& [e, m] : s.roots)
                if (e == r) {
                    ++m;
                    merged = true;
                }
            if (!merged) s.roots.push_back({r, 1});
        }
        return s;
    }
};

/// Heun class operator sigma d2 + tau d + eta with eta = xi/sigma,
/// deg sigma <= 3, deg tau <= 2, deg xi <= 4.
struct HeunOperator {
    SigmaFactored sigma;
    MPoly tau;  // in z (coefficients may hold parameters and t)
    MPoly xi;   // in z

    void validate() const {
        Var z = zvar();
        MPoly s = sigma.poly();
        if (s.is_zero()) throw NotHeunClass("sigma = 0");
        if (s.degree(z) > 3) throw NotHeunClass("deg sigma > 3");
        if (!tau.is_zero() && tau.degree(z) > 2) throw NotHeunClass("deg tau > 2");
        if (!xi.is_zero() && xi.degree(z) > 4) throw NotHeunClass("deg xi > 4");
    }

    RatFunc eta() const { return RatFunc(xi, sigma.poly()); }

    PrincipalOperator principal() const {
        MPoly s = sigma.poly();
        return PrincipalOperator{RatFunc(tau, s), RatFunc(xi, s * s)};
    }

    bool grounded() const {
        RatFunc e = eta();
        return e.is_polynomial() && (e.is_zero() || e.num().degree(zvar()) <= 1);
    }

    std::vector<Point> finite_singular_candidates() const {
        std::vector<Point> pts;
        for (auto& [r, m] : sigma.roots) pts.push_back(Point::finite(r));
        return pts;
    }

    static HeunOperator make(SigmaFactored s, MPoly tau, MPoly xi) {
        HeunOperator op{std::move(s), std::move(tau), std::move(xi)};
        op.validate();
        return op;
    }
    /// convenience: build from eta when eta is polynomial
    static HeunOperator make_eta(SigmaFactored s, const MPoly& tau, const MPoly& eta) {
        MPoly xi = eta * s.poly();
        return make(std::move(s), tau, xi);
    }
};

// ---------------------------------------------------------------------------
// M_n class membership
// ---------------------------------------------------------------------------

struct MnMembership {
    bool in_class = false;
    bool grounded = false;
    MPoly sigma, tau, xi;  // a witness triple when in_class
};

/// Decides whether d2 + p d + q can be written with polynomials as
/// d2 + (tau/sigma) d + xi/sigma^2, deg sigma <= n, deg tau <= n-1,
/// deg xi <= 2n-2; grounded additionally needs eta = xi/sigma polynomial
/// of degree <= n-2. Uses the minimal sigma built from the denominators.
inline MnMembership mn_class_membership(const PrincipalOperator& A, int n) {
    Var z = zvar();
    MnMembership out;
    const MPoly& d1 = A.p.den();
    const MPoly& d2 = A.q.den();

    // minimal sigma: d2 needs ceil(e/2) copies of each i-fold factor
    MPoly sig(1);
    auto sf = squarefree_decomposition(d2, z);
    for (std::size_t i = 0; i < sf.size(); ++i) {
        int need = (static_cast<int>(i) + 2) / 2;  // ceil((i+1)/2)
        sig *= sf[i].pow(need);
    }
    // the z-free content of d2 is absorbed into the leading normalization
    sig = mpoly_lcm(sig.is_constant() ? MPoly(1) : sig, d1.is_constant() ? MPoly(1) : d1);
    if (sig.is_zero()) sig = MPoly(1);

    RatFunc tau = A.p * RatFunc(sig);
    RatFunc xi = A.q * RatFunc(sig * sig);
    if (!tau.is_polynomial() || !xi.is_polynomial()) return out;
    MPoly taup = tau.is_zero() ? MPoly(0) : tau.to_mpoly();
    MPoly xip = xi.is_zero() ? MPoly(0) : xi.to_mpoly();
    if (sig.degree(z) > n) return out;
    if (!taup.is_zero() && taup.degree(z) > n - 1) return out;
    if (!xip.is_zero() && xip.degree(z) > 2 * n - 2) return out;
    out.in_class = true;
    out.sigma = sig;
    out.tau = taup;
    out.xi = xip;
    RatFunc eta = A.q * RatFunc(sig);
    out.grounded = eta.is_polynomial() &&
                   (eta.is_zero() || eta.to_mpoly().degree(z) <= n - 2);
    return out;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

struct HeunTypeSymbol {
    std::vector<Rank> finite;  // sorted descending
    Rank at_inf;

    int rounded_total() const {
        int s = at_inf.rounded();
        for (auto& r : finite) s += r.rounded();
        return s;
    }
    static std::string bucket(const Rank& r) {
        return r.rounded() == 1 ? std::string("1") : r.str();
    }
    std::string str() const {
        bool wide = bucket(at_inf).size() > 1;
        for (auto& r : finite) wide = wide || bucket(r).size() > 1;
        std::string s = "(";
        for (std::size_t i = 0; i < finite.size(); ++i) {
            if (i) s += wide ? " " : "";
            s += bucket(finite[i]);
        }
        s += ";" + bucket(at_inf) + ")";
        return s;
    }
};

struct Classification {
    HeunTypeSymbol symbol;
    std::string name;             // one of the ten type names, or a Riemann label
    bool riemann_reducible = false;
    std::string riemann_row;      // named Riemann-class operator if identified
    std::vector<SingularityReport> reports;
    AssumptionLog assumed_nonzero;  // parameter constraints taken as generic
};

namespace detail {

inline std::string riemann_row_name(const std::vector<std::string>& fb, const std::string& ib) {
    auto is = [&](std::initializer_list<const char*> fin, const char* inf) {
        if (ib != inf || fb.size() != fin.size()) return false;
        std::vector<std::string> a(fin.begin(), fin.end()), b = fb;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    };
    if (is({"1", "1"}, "1")) return "2F1";
    if (is({"2"}, "1")) return "2F0";
    if (is({"1"}, "2")) return "1F1";
    if (is({"1"}, "3/2")) return "0F1";
    if (is({}, "3")) return "Hermite";
    if (is({}, "5/2")) return "Airy";
    if (is({"1"}, "1")) return "Euler";
    if (is({}, "2")) return "Helmholtz";
    if (is({}, "1")) return "Laplace";
    if (is({"3/2"}, "1")) return "0F1";  // z times a Riemann-class operator
    return "riemann";
}

inline std::string heun_type_name(const std::vector<std::string>& fb, const std::string& ib) {
    auto is = [&](std::initializer_list<const char*> fin, const char* inf) {
        if (ib != inf || fb.size() != fin.size()) return false;
        std::vector<std::string> a(fin.begin(), fin.end()), b = fb;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    };
    if (is({"1", "1", "1"}, "1")) return "standard Heun";
    if (is({"1", "1"}, "2") || is({"2", "1"}, "1")) return "non-degenerate confluent Heun";
    if (is({"1", "1"}, "3/2") || is({"3/2", "1"}, "1")) return "degenerate confluent Heun";
    if (is({"2"}, "2")) return "non-degenerate doubly confluent Heun";
    if (is({"2"}, "3/2") || is({"3/2"}, "2")) return "degenerate doubly confluent Heun";
    if (is({"3/2"}, "3/2")) return "doubly degenerate doubly confluent Heun";
    if (is({"1"}, "3") || is({"3"}, "1")) return "non-degenerate biconfluent Heun";
    if (is({"1"}, "5/2") || is({"5/2"}, "1")) return "degenerate biconfluent Heun";
    if (is({}, "4")) return "non-degenerate triconfluent Heun";
    if (is({}, "7/2")) return "degenerate triconfluent Heun";
    return "";
}

}  // namespace detail

inline Classification classify(const HeunOperator& op,
                               ParamPolicy policy = ParamPolicy::Generic) {
    op.validate();
    PrincipalOperator A = op.principal();
    Classification out;
    out.reports = find_singularities(A, op.finite_singular_candidates(), policy,
                                     &out.assumed_nonzero);
    for (auto& r : out.reports) {
        if (r.location.infinite)
            out.symbol.at_inf = r.rk;
        else
            out.symbol.finite.push_back(r.rk);
    }
    std::sort(out.symbol.finite.begin(), out.symbol.finite.end(),
              [](const Rank& a, const Rank& b) { return a.twice > b.twice; });

    std::vector<std::string> fb;
    for (auto& r : out.symbol.finite) fb.push_back(HeunTypeSymbol::bucket(r));
    std::string ib = HeunTypeSymbol::bucket(out.symbol.at_inf);

    if (out.symbol.rounded_total() <= 3) {
        out.riemann_reducible = true;
        out.riemann_row = detail::riemann_row_name(fb, ib);
        out.name = "riemann (" + out.riemann_row + ")";
        return out;
    }
    out.name = detail::heun_type_name(fb, ib);
    if (out.name.empty()) out.name = "unrecognized Heun class type " + out.symbol.str();
    return out;
}

// ---------------------------------------------------------------------------
// Swap with infinity
// ---------------------------------------------------------------------------

namespace detail {

/// w^k * P(1/w), valid when deg P <= k
inline MPoly reversed(const MPoly& P, int k, Var z) {
    if (P.is_zero()) return MPoly(0);
    if (P.degree(z) > k) throw NotHeunClass("degree too high to reverse");
    auto cs = P.coeffs_in(z);
    MPoly out;
    for (std::size_t j = 0; j < cs.size(); ++j)
        out += cs[j] * MPoly::var(z, k - static_cast<int>(j));
    return out;
}

/// factored form of w^k * sigma(1/w) for sigma = lead prod (z - r)^m; the
/// result has a zero root of multiplicity k - deg(sigma)
inline SigmaFactored reversed_sigma(const SigmaFactored& s, int k) {
    SigmaFactored out;
    out.lead = s.lead;
    int zero_mult = k - s.degree();
    if (zero_mult < 0) throw NotHeunClass("reversal produced a pole");
    for (auto& [r, m] : s.roots) {
        if (r.is_zero()) continue;  // already accounted for in the degree
        // (1/w - r)^m = (-r)^m w^{-m} (w - 1/r)^m
        out.lead *= (-r).pow(m);
        out.roots.push_back({RatFunc(1) / r, m});
    }
    if (zero_mult > 0) out.roots.insert(out.roots.begin(), {RatFunc(0), zero_mult});
    return out;
}

}  // namespace detail

/// w = 1/z for an operator with sigma(0) = 0 (sigma = z rho):
/// sigma~ = w^3 rho(1/w), tau~ = w^2 (2 rho(1/w) - tau(1/w)), eta~ = eta(1/w).
inline HeunOperator swap_infinity(const HeunOperator& op) {
    Var z = zvar();
    MPoly s = op.sigma.poly();
    if (!s.subst(z, Rat(0)).is_zero()) throw RootNotAtOrigin("sigma(0) != 0");
    MPoly rho = *s.divide_exact(MPoly::var(z));

    SigmaFactored sf = op.sigma;
    bool removed = false;
    for (auto& [r, m] : sf.roots)
        if (r.is_zero() && m > 0 && !removed) {
            --m;
            removed = true;
        }
    if (!removed) throw RootNotAtOrigin("factored sigma has no root at 0");
    sf.roots.erase(std::remove_if(sf.roots.begin(), sf.roots.end(),
                                  [](auto& rm) { return rm.second == 0; }),
                   sf.roots.end());

    SigmaFactored nsigma = detail::reversed_sigma(sf, 3);
    MPoly ntau = MPoly(2) * detail::reversed(rho, 2, z) - detail::reversed(op.tau, 2, z);
    // eta~ = eta(1/w) = xi(1/w)/sigma(1/w); xi~ = eta~ * sigma~ = w^4 xi(1/w)
    MPoly nxi = detail::reversed(op.xi, 4, z);
    return HeunOperator::make(nsigma, ntau, nxi);
}

/// Mapping properties of the swap (each entry: condition on the input,
/// degree claim on the output, and whether the two sides agree).
struct SwapMappingReport {
    struct Entry {
        std::string label;
        bool lhs, rhs;
        bool agree() const { return lhs == rhs; }
    };
    std::vector<Entry> entries;
    bool all_agree() const {
        for (auto& e : entries)
            if (!e.agree()) return false;
        return true;
    }
};

inline SwapMappingReport swap_mapping_properties(const HeunOperator& op) {
    Var z = zvar();
    HeunOperator sw = swap_infinity(op);
    MPoly s = op.sigma.poly();
    MPoly ns = sw.sigma.poly();
    auto degz = [&](const MPoly& p) { return p.is_zero() ? -1 : p.degree(z); };
    SwapMappingReport rep;
    bool xi0 = op.xi.subst(z, Rat(0)).is_zero();
    bool sp0 = s.derivative(z).subst(z, Rat(0)).is_zero();
    bool tau0 = op.tau.subst(z, Rat(0)).is_zero();
    bool xip0 = op.xi.derivative(z).subst(z, Rat(0)).is_zero();
    rep.entries.push_back({"sigma*eta(0)=0 <=> deg sigma~eta~ <= 3", xi0, degz(sw.xi) <= 3});
    rep.entries.push_back({"sigma'(0)=0 <=> deg sigma~ <= 2", sp0, degz(ns) <= 2});
    rep.entries.push_back({"sigma'(0)=0 & tau(0)=0 <=> deg sigma~ <=2 & deg tau~ <=1",
                           sp0 && tau0, degz(ns) <= 2 && degz(sw.tau) <= 1});
    rep.entries.push_back({"sigma'(0)=0 & xi(0)=xi'(0)=0 <=> deg sigma~ <=2 & deg xi~ <=2",
                           sp0 && xi0 && xip0, degz(ns) <= 2 && degz(sw.xi) <= 2});
    return rep;
}

/// Grounded swap: w = 1/z followed by the power sandwich w^alpha with alpha a
/// root of (rho''/2) a(a+1) - (tau''/2) a + eta' = 0, keeping the operator
/// grounded.
inline HeunOperator swap_infinity_grounded(const HeunOperator& op) {
    Var z = zvar();
    if (!op.grounded()) throw NotHeunClass("input not grounded");
    MPoly s = op.sigma.poly();
    if (!s.subst(z, Rat(0)).is_zero()) throw RootNotAtOrigin("sigma(0) != 0");
    MPoly rho = *s.divide_exact(MPoly::var(z));
    MPoly eta = *op.xi.divide_exact(s);

    Rat half(1, 2);
    RatFunc A2(rho.derivative(z).derivative(z) * half);      // rho''/2
    RatFunc T2(op.tau.derivative(z).derivative(z) * half);   // tau''/2
    RatFunc E1(eta.derivative(z));                           // eta'
    // (rho''/2) a^2 + (rho''/2 - tau''/2) a + eta' = 0
    RatFunc alpha;
    if (A2.is_zero()) {
        RatFunc lin = A2 - T2;
        if (lin.is_zero()) {
            if (!E1.is_zero()) throw NotHeunClass("no grounded swap exponent exists");
            alpha = RatFunc(0);
        } else {
            alpha = -(E1 / lin);
        }
    } else {
        RatFunc b = (A2 - T2) / A2, c = E1 / A2;
        auto ip = detail::roots_of_quadratic(b, c);
        if (!ip.explicit_roots) throw IrrationalBranch(ip.note);
        alpha = ip.rho1;
    }

    HeunOperator sw = swap_infinity(op);
    // tau~1 = 2(alpha+1) w^2 rho(1/w) - w^2 tau(1/w)
    MPoly w2rho = detail::reversed(rho, 2, z);
    RatFunc ntau = RatFunc(2) * (alpha + RatFunc(1)) * RatFunc(w2rho) -
                   RatFunc(detail::reversed(op.tau, 2, z));
    // eta~1 = w a((a+1) rho(0) - tau(0)) + a((a+1) rho'(0) - tau'(0)) + eta(0)
    RatFunc rho0(rho.subst(z, Rat(0))), tau0(op.tau.subst(z, Rat(0)));
    RatFunc rho1(rho.derivative(z).subst(z, Rat(0))), tau1(op.tau.derivative(z).subst(z, Rat(0)));
    RatFunc neta = RatFunc::var(z) * alpha * ((alpha + RatFunc(1)) * rho0 - tau0) +
                   alpha * ((alpha + RatFunc(1)) * rho1 - tau1) + RatFunc(eta.subst(z, Rat(0)));
    if (!ntau.is_polynomial() || !neta.is_polynomial()) throw NotHeunClass("grounded swap failed");
    MPoly nxi = (neta * RatFunc(sw.sigma.poly())).to_mpoly();
    return HeunOperator::make(sw.sigma, ntau.to_mpoly(), nxi);
}

// ---------------------------------------------------------------------------
// Normal forms (classification-preserving reduction pipeline)
// ---------------------------------------------------------------------------

struct NormalForm {
    std::string row;  // e.g. "(111;1)a", "(2;2)a", "(;7/2)", "riemann"
    HeunOperator op;
    TransformRecord trace;           // on the principal operator
    AssumptionLog constraints;       // nonzero assumptions taken en route
    std::string branch_note;         // recorded quadratic-branch choices
};

namespace detail {

/// rebuild (tau, xi) for a known sigma from a principal operator
inline HeunOperator triple_from_principal(const PrincipalOperator& A, const SigmaFactored& sf) {
    MPoly s = sf.poly();
    RatFunc tau = A.p * RatFunc(s);
    RatFunc xi = A.q * RatFunc(s * s);
    if (!tau.is_polynomial() || !xi.is_polynomial())
        throw NotHeunClass("operator left the Heun class");
    return HeunOperator::make(sf, tau.is_zero() ? MPoly(0) : tau.to_mpoly(),
                              xi.is_zero() ? MPoly(0) : xi.to_mpoly());
}

/// pick a root of x^2 + bx + c; branch 1 is the +sqrt root
inline RatFunc quadratic_branch(const RatFunc& b, const RatFunc& c, std::string& note,
                                const std::string& what) {
    auto ip = roots_of_quadratic(b, c);
    if (!ip.explicit_roots)
        throw IrrationalBranch(what + ": " + ip.note);
    note += what + ": branch 1 of x^2 + (" + b.str() + ")x + (" + c.str() + "); ";
    return ip.rho1;
}

/// coefficient of z^k in eta = xi/sigma, when it is a Laurent polynomial
inline RatFunc eta_coeff(const HeunOperator& op, int k) {
    Var z = zvar();
    RatFunc e = op.eta();
    return laurent(e, z, Point::finite(0), k, k).coeff(k);
}

/// ground the operator at a simple finite sigma-root (one index becomes 0)
inline void ground_at(PrincipalOperator& A, TransformRecord& tr, const RatFunc& root,
                      std::string& note) {
    auto [b, c] = indicial_quadratic(A, Point::finite(root));
    if (c.is_zero()) return;  // an index is already 0
    RatFunc rho = quadratic_branch(b, c, note, "grounding at " + root.str());
    PowerStep st{root, rho};  // conjugation by (z-root)^rho moves rho to 0
    A = st.apply(A);
    tr.push(st);
}

}  // namespace detail

/// Reduces a Heun class operator to one of the normal-form rows (disjoint
/// sigma shapes are handled separately; repeated-root cubics are swapped to
/// lower-degree sigmas first). Riemann-reducible inputs end at row "riemann".
inline NormalForm to_normal_form(const HeunOperator& input,
                                 ParamPolicy policy = ParamPolicy::Generic) {
    Var z = zvar();
    input.validate();

    NormalForm nf;
    PrincipalOperator A = input.principal();
    SigmaFactored sf = input.sigma;

    // --- move sigma into one of: z(z-1)(z-t), z(z-1), z^2, z, 1 -------------
    int d = sf.degree();
    auto rts = sf.roots;

    auto apply_affine = [&](const RatFunc& scale, const RatFunc& shift) {
        // z = scale*w + shift
        MoebiusStep st = MoebiusStep::affine(scale, shift);
        A = st.apply(A);
        nf.trace.push(st);
        SigmaFactored ns;
        ns.lead = sf.lead;
        for (auto& [r, m] : sf.roots) {
            ns.roots.push_back({(r - shift) / scale, m});
            ns.lead *= scale.pow(m);
        }
        // principal rescaling absorbs constants; normalize the lead to keep
        // sigma monic-by-construction for the normal rows
        ns.lead = RatFunc(1);
        sf = ns;
    };

    auto apply_swap = [&]() {
        // requires a sigma root at 0; acts as z = 1/w on the principal level
        MoebiusStep st = MoebiusStep::inversion();
        A = st.apply(A);
        nf.trace.push(st);
        SigmaFactored inner = sf;
        for (auto& [r, m] : inner.roots)
            if (r.is_zero()) {
                --m;
                break;
            }
        inner.roots.erase(std::remove_if(inner.roots.begin(), inner.roots.end(),
                                         [](auto& rm) { return rm.second == 0; }),
                          inner.roots.end());
        sf = detail::reversed_sigma(inner, 3);
        sf.lead = RatFunc(1);
    };

    if (d == 3 && rts.size() == 3) {
        // roots -> 0, 1, t in the order given
        RatFunc r0 = rts[0].first, r1 = rts[1].first;
        apply_affine(r1 - r0, r0);
    } else if (d == 3 && rts.size() == 2) {
        // double root -> 0, simple root -> 1, then swap (0 <-> infinity)
        RatFunc dr = (rts[0].second == 2) ? rts[0].first : rts[1].first;
        RatFunc sr = (rts[0].second == 2) ? rts[1].first : rts[0].first;
        apply_affine(sr - dr, dr);
        apply_swap();  // sigma becomes -w(w-1); roots {0, 1} survive
    } else if (d == 3 && rts.size() == 1) {
        apply_affine(RatFunc(1), rts[0].first);  // triple root -> 0
        apply_swap();                            // sigma becomes w
    } else if (d == 2 && rts.size() == 2) {
        RatFunc r0 = rts[0].first, r1 = rts[1].first;
        apply_affine(r1 - r0, r0);
    } else if (d == 2 && rts.size() == 1) {
        apply_affine(RatFunc(1), rts[0].first);
    } else if (d == 1) {
        apply_affine(RatFunc(1), rts[0].first);
    } else if (d == 0) {
        sf.lead = RatFunc(1);
    }

    HeunOperator cur = detail::triple_from_principal(A, sf);
    d = sf.degree();
    std::size_t nroots = sf.roots.size();

    auto push_step = [&](const TransformStep& st) {
        A = apply_step(A, st);
        nf.trace.push(st);
        cur = detail::triple_from_principal(A, sf);
    };
    auto tau_coeff = [&](int k) {
        Var zz = zvar();
        auto cs = cur.tau.coeffs_in(zz);
        return (k < static_cast<int>(cs.size())) ? RatFunc(cs[static_cast<std::size_t>(k)])
                                                 : RatFunc();
    };
    auto finish = [&](const std::string& row) {
        nf.row = row;
        nf.op = cur;
        Classification cl = classify(cur, policy);
        if (cl.riemann_reducible) nf.row = "riemann";
        return nf;
    };
    auto note_nonzero = [&](const RatFunc& v, const std::string& what) {
        if (v.is_zero()) return false;
        if (!v.is_constant()) nf.constraints.push_back(what + " = " + v.str() + " != 0");
        return true;
    };

    if (d == 3) {
        // sigma = z(z-1)(z-t): ground the three finite points
        RatFunc tval = sf.roots[2].first;
        detail::ground_at(A, nf.trace, RatFunc(0), nf.branch_note);
        detail::ground_at(A, nf.trace, RatFunc(1), nf.branch_note);
        detail::ground_at(A, nf.trace, tval, nf.branch_note);
        cur = detail::triple_from_principal(A, sf);
        return finish("(111;1)a");
    }

    if (d == 2 && nroots == 2) {
        // sigma = z(z-1)
        detail::ground_at(A, nf.trace, RatFunc(0), nf.branch_note);
        detail::ground_at(A, nf.trace, RatFunc(1), nf.branch_note);
        cur = detail::triple_from_principal(A, sf);
        // eta is now a polynomial of degree <= 2; kill b2 with r' = kappa
        RatFunc b2 = detail::eta_coeff(cur, 2);
        if (!b2.is_zero()) {
            RatFunc kap =
                detail::quadratic_branch(tau_coeff(2), b2, nf.branch_note, "killing eta_2");
            push_step(ExpStep{Point::inf(), 0, kap});
        }
        RatFunc a2 = tau_coeff(2);
        if (note_nonzero(a2, "a2")) return finish("(11;2)a");
        RatFunc b1 = detail::eta_coeff(cur, 1);
        if (note_nonzero(b1, "b1")) return finish("(11;3/2)");
        return finish("riemann");
    }

    if (d == 2 && nroots == 1) {
        // sigma = z^2
        RatFunc b2 = detail::eta_coeff(cur, 2);
        if (!b2.is_zero()) {
            RatFunc kap =
                detail::quadratic_branch(tau_coeff(2), b2, nf.branch_note, "killing eta_2");
            push_step(ExpStep{Point::inf(), 0, kap});
        }
        RatFunc bm2 = detail::eta_coeff(cur, -2);
        if (!bm2.is_zero()) {
            RatFunc kap =
                detail::quadratic_branch(tau_coeff(0), bm2, nf.branch_note, "killing eta_-2");
            push_step(ExpStep{Point::finite(0), 2, kap});
        }
        RatFunc a0 = tau_coeff(0), a2 = tau_coeff(2);
        if (note_nonzero(a0, "a0")) {
            RatFunc bm1 = detail::eta_coeff(cur, -1);
            if (!bm1.is_zero()) push_step(PowerStep{RatFunc(0), -(bm1 / a0)});
            if (note_nonzero(tau_coeff(2), "a2")) return finish("(2;2)a");
            if (note_nonzero(detail::eta_coeff(cur, 1), "b1")) return finish("(2;3/2)");
            return finish("riemann");
        }
        if (note_nonzero(a2, "a2")) {
            RatFunc b1 = detail::eta_coeff(cur, 1);
            if (!b1.is_zero()) push_step(PowerStep{RatFunc(0), -(b1 / a2)});
            if (note_nonzero(detail::eta_coeff(cur, -1), "b-1")) return finish("(3/2;2)");
            return finish("riemann");
        }
        RatFunc b1 = detail::eta_coeff(cur, 1), bm1 = detail::eta_coeff(cur, -1);
        if (!b1.is_zero() && !bm1.is_zero()) {
            RatFunc a1 = tau_coeff(1);
            if (!a1.is_zero()) push_step(PowerStep{RatFunc(0), -(a1 * Rat(1, 2))});
            note_nonzero(detail::eta_coeff(cur, 1), "b1");
            note_nonzero(detail::eta_coeff(cur, -1), "b-1");
            return finish("(3/2;3/2)");
        }
        return finish("riemann");
    }

    if (d == 1) {
        // sigma = z
        detail::ground_at(A, nf.trace, RatFunc(0), nf.branch_note);
        cur = detail::triple_from_principal(A, sf);
        RatFunc b3 = detail::eta_coeff(cur, 3);
        if (!b3.is_zero()) {
            RatFunc kap =
                detail::quadratic_branch(tau_coeff(2), b3, nf.branch_note, "killing eta_3");
            push_step(ExpStep{Point::inf(), 1, kap});
        }
        RatFunc a2 = tau_coeff(2);
        if (note_nonzero(a2, "a2")) {
            RatFunc b2 = detail::eta_coeff(cur, 2);
            if (!b2.is_zero()) push_step(ExpStep{Point::inf(), 0, -(b2 / a2)});
            return finish("(1;3)a");
        }
        RatFunc b2 = detail::eta_coeff(cur, 2);
        if (note_nonzero(b2, "b2")) {
            RatFunc a1 = tau_coeff(1);
            if (!a1.is_zero()) push_step(ExpStep{Point::inf(), 0, -(a1 * Rat(1, 2))});
            return finish("(1;5/2)");
        }
        return finish("riemann");
    }

    // d == 0: sigma = 1
    {
        RatFunc b4 = detail::eta_coeff(cur, 4);
        if (!b4.is_zero()) {
            // r' = kappa z^2: eta_4 gains tau_2 kappa + kappa^2
            RatFunc kap =
                detail::quadratic_branch(tau_coeff(2), b4, nf.branch_note, "killing eta_4");
            push_step(ExpStep{Point::inf(), 2, kap});
        }
        RatFunc a2 = tau_coeff(2);
        if (note_nonzero(a2, "a2")) {
            RatFunc b3 = detail::eta_coeff(cur, 3);
            if (!b3.is_zero()) push_step(ExpStep{Point::inf(), 1, -(b3 / a2)});
            RatFunc b2 = detail::eta_coeff(cur, 2);
            if (!b2.is_zero()) push_step(ExpStep{Point::inf(), 0, -(b2 / a2)});
            // affine shift kills a1 while keeping a2
            RatFunc a1 = tau_coeff(1);
            if (!a1.is_zero()) {
                MoebiusStep st = MoebiusStep::affine(
                    RatFunc(1), -(a1 / (RatFunc(2) * tau_coeff(2))));
                A = st.apply(A);
                nf.trace.push(st);
                cur = detail::triple_from_principal(A, sf);
            }
            return finish("(;4)");
        }
        RatFunc a1 = tau_coeff(1);
        if (!a1.is_zero()) push_step(ExpStep{Point::inf(), 1, -(a1 * Rat(1, 2))});
        RatFunc a0 = tau_coeff(0);
        if (!a0.is_zero()) push_step(ExpStep{Point::inf(), 0, -(a0 * Rat(1, 2))});
        RatFunc b3 = detail::eta_coeff(cur, 3);
        if (note_nonzero(b3, "b3")) {
            RatFunc b2 = detail::eta_coeff(cur, 2);
            if (!b2.is_zero()) {
                MoebiusStep st =
                    MoebiusStep::affine(RatFunc(1), -(b2 / (RatFunc(3) * b3)));
                A = st.apply(A);
                nf.trace.push(st);
                cur = detail::triple_from_principal(A, sf);
            }
            return finish("(;7/2)");
        }
        return finish("riemann");
    }
}

/// a)->b) conversion for rows (11;2), (1;3), (2;2): the power sandwich
/// killing b1 z and producing b_{-1} z^{-1}
inline HeunOperator normal_form_b(const HeunOperator& a_form) {
    Var z = zvar();
    RatFunc b1 = detail::eta_coeff(a_form, 1);
    auto cs = a_form.tau.coeffs_in(z);
    if (cs.size() < 3 || cs[2].is_zero()) throw NotHeunClass("a2 = 0: no b) form");
    RatFunc a2(cs[2]);
    PrincipalOperator A = a_form.principal();
    A = PowerStep{RatFunc(0), -(b1 / a2)}.apply(A);
    return detail::triple_from_principal(A, a_form.sigma);
}

}  // namespace heun

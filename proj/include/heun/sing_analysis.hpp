#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heun/laurent.hpp"
#include "heun/mpoly_gcd.hpp"
#include "heun/operator.hpp"

namespace heun {

/// square root of a rational function when it exists in the rational field
inline std::optional<RatFunc> ratfunc_sqrt(const RatFunc& f) {
    if (f.is_zero()) return RatFunc();
    auto s = mpoly_sqrt(f.num() * f.den());
    if (!s) return std::nullopt;
    return RatFunc(*s) / RatFunc(f.den());
}

namespace detail {

constexpr int kNegInf = std::numeric_limits<int>::min() / 4;

inline int deg_or_neginf(const RatFunc& f, Var v, const Point& pt, ParamPolicy policy,
                         AssumptionLog* log) {
    if (f.is_zero()) return kNegInf;
    return degree_at(f, v, pt, policy, log);
}

}  // namespace detail

/// ranks are half-integers, stored doubled
struct Rank {
    int twice = 0;
    bool is_integer() const { return twice % 2 == 0; }
    int rounded() const { return twice >= 0 ? (twice + 1) / 2 : twice / 2; }
    Rat value() const { return Rat(twice, 2); }
    bool operator==(const Rank& o) const { return twice == o.twice; }
    std::string str() const {
        if (is_integer()) return std::to_string(twice / 2);
        return std::to_string(twice) + "/2";
    }
};

inline bool is_regular_point(const PrincipalOperator& A, const Point& pt,
                             ParamPolicy policy = ParamPolicy::Generic,
                             AssumptionLog* log = nullptr) {
    Var z = zvar();
    using detail::deg_or_neginf;
    if (!pt.infinite) {
        return deg_or_neginf(A.p, z, pt, policy, log) <= 0 &&
               deg_or_neginf(A.q, z, pt, policy, log) <= 0;
    }
    RatFunc two_over_z(MPoly(2), MPoly::var(z));
    return deg_or_neginf(A.p - two_over_z, z, pt, policy, log) <= -2 &&
           deg_or_neginf(A.q, z, pt, policy, log) <= -4;
}

/// rank of the operator at a point, with the special rank-1/2 detection
inline Rank rank(const PrincipalOperator& A, const Point& pt,
                 ParamPolicy policy = ParamPolicy::Generic, AssumptionLog* log = nullptr) {
    Var z = zvar();
    using detail::deg_or_neginf;
    if (is_regular_point(A, pt, policy, log)) return Rank{0};

    if (!pt.infinite) {
        RatFunc half_pole = RatFunc(Rat(1, 2)) / (RatFunc::var(z) - pt.value);
        int dq = deg_or_neginf(A.q, z, pt, policy, log);
        if (deg_or_neginf(A.p - half_pole, z, pt, policy, log) <= 0 && dq <= 1) return Rank{1};
        int dp = deg_or_neginf(A.p, z, pt, policy, log);
        int twice = std::max({2 * dp, dq, 2});
        return Rank{twice};
    }
    RatFunc three_halves(MPoly(3), MPoly(2) * MPoly::var(z));
    int dq = deg_or_neginf(A.q, z, pt, policy, log);
    if (deg_or_neginf(A.p - three_halves, z, pt, policy, log) <= -2 && dq <= -3) return Rank{1};
    int dp = deg_or_neginf(A.p, z, pt, policy, log);
    int twice = std::max({2 * (dp + 2), dq + 4, 2});
    return Rank{twice};
}

inline int rounded_rank(const PrincipalOperator& A, const Point& pt,
                        ParamPolicy policy = ParamPolicy::Generic, AssumptionLog* log = nullptr) {
    return rank(A, pt, policy, log).rounded();
}

/// the two local exponents at a singular point
struct IndexPair {
    bool explicit_roots = false;
    RatFunc rho1, rho2;  // valid when explicit_roots
    RatFunc sum;         // always valid
    std::string note;    // descriptor when roots are not rational
};

namespace detail {

inline RatFunc lcoeff(const RatFunc& f, Var z, const Point& pt, int k) {
    if (f.is_zero()) return RatFunc();
    return laurent(f, z, pt, k, k).coeff(k);
}

/// indicial quadratic x^2 + bx + c at a Fuchsian point; returns (b, c)
inline std::pair<RatFunc, RatFunc> indicial_quadratic(const PrincipalOperator& A, const Point& pt) {
    Var z = zvar();
    RatFunc pm1 = lcoeff(A.p, z, pt, -1);
    RatFunc qm2 = lcoeff(A.q, z, pt, -2);
    if (!pt.infinite) return {pm1 - RatFunc(1), qm2};
    // roots of x(x+1) - p_{-1} x + q_{-2}
    return {RatFunc(1) - pm1, qm2};
}

inline IndexPair roots_of_quadratic(const RatFunc& b, const RatFunc& c) {
    IndexPair out;
    out.sum = -b;
    RatFunc disc = b * b - RatFunc(4) * c;
    auto s = ratfunc_sqrt(disc);
    if (s) {
        out.explicit_roots = true;
        out.rho1 = (-b + *s) * Rat(1, 2);
        out.rho2 = (-b - *s) * Rat(1, 2);
    } else {
        out.note = "indicial roots irrational: x^2 + (" + b.str() + ")x + (" + c.str() + ")";
    }
    return out;
}

}  // namespace detail

struct SingularityReport {
    Point location;
    Rank rk;
    int rounded = 0;
    bool fuchsian = false;
    bool grounded = false;
    std::optional<Rank> absolute_rank;
    std::optional<IndexPair> indices;
};

/// Singular points among the candidates (plus infinity, always examined).
/// Partial reports: ranks only.
inline std::vector<SingularityReport> find_singularities(const PrincipalOperator& A,
                                                         const std::vector<Point>& candidates,
                                                         ParamPolicy policy = ParamPolicy::Generic,
                                                         AssumptionLog* log = nullptr) {
    Var z = zvar();
    std::vector<SingularityReport> out;
    auto examine = [&](const Point& pt) {
        for (auto& r : out)
            if (r.location == pt) return;
        if (is_regular_point(A, pt, policy, log)) return;
        SingularityReport rep;
        rep.location = pt;
        rep.rk = rank(A, pt, policy, log);
        rep.rounded = rep.rk.rounded();
        rep.fuchsian = (rep.rounded == 1);
        if (!pt.infinite) {
            using detail::deg_or_neginf;
            rep.grounded = deg_or_neginf(A.p, z, pt, policy, log) >=
                           deg_or_neginf(A.q, z, pt, policy, log);
        }
        out.push_back(std::move(rep));
    };
    for (auto& pt : candidates) {
        if (pt.infinite) continue;
        examine(pt);
    }
    examine(Point::inf());
    return out;
}

/// rational roots of the denominators of p and q (parameter-free operators)
inline std::vector<Point> rational_pole_candidates(const PrincipalOperator& A) {
    Var z = zvar();
    std::vector<Point> pts;
    auto add_roots = [&](const MPoly& d) {
        if (d.is_constant()) return;
        for (int v : d.vars_used())
            if (v != z.id) throw UndecidableLeadingCoefficient(
                "denominator has parameters; supply singular points explicitly");
        // rational root theorem on integer-cleared coefficients
        auto cs = d.coeffs_in(z);
        mpz_class denlcm = 1;
        for (auto& c : cs)
            if (!c.is_zero()) mpz_lcm(denlcm.get_mpz_t(), denlcm.get_mpz_t(),
                                      c.constant_value().den().get_mpz_t());
        std::vector<mpz_class> ic(cs.size());
        for (std::size_t i = 0; i < cs.size(); ++i)
            ic[i] = cs[i].is_zero() ? mpz_class(0)
                                    : mpz_class(cs[i].constant_value().num() * denlcm /
                                                cs[i].constant_value().den());
        std::size_t lo = 0;
        while (lo < ic.size() && ic[lo] == 0) ++lo;  // factor out z^lo: root 0
        if (lo > 0) pts.push_back(Point::finite(0));
        if (lo >= ic.size() - 1) return;
        mpz_class a0 = abs(ic[lo]), ad = abs(ic.back());
        auto divisors = [](const mpz_class& n) {
            std::vector<mpz_class> ds;
            for (mpz_class i = 1; i * i <= n; ++i)
                if (n % i == 0) {
                    ds.push_back(i);
                    ds.push_back(n / i);
                }
            return ds;
        };
        for (auto& pn : divisors(a0))
            for (auto& qn : divisors(ad))
                for (int sgn : {1, -1}) {
                    Rat root(mpq_class(sgn * pn, qn));
                    Rat val(0), pw(1);
                    for (std::size_t i = lo; i < ic.size(); ++i) {
                        val += Rat(ic[i]) * pw;
                        pw *= root;
                    }
                    if (val.is_zero()) {
                        Point cand = Point::finite(root);
                        bool dup = false;
                        for (auto& e : pts) dup = dup || e == cand;
                        if (!dup) pts.push_back(cand);
                    }
                }
    };
    add_roots(A.p.den());
    add_roots(A.q.den());
    return pts;
}

// ---------------------------------------------------------------------------
// Local power-series recurrence engine at z = 0
// ---------------------------------------------------------------------------

struct SeriesOutcome {
    bool nontrivial = false;         // some v_k nonzero
    bool obstructed = false;         // an inconsistent constraint row appeared
    int obstruction_row = 0;         // z-order of the failing row
    RatFunc obstruction_value;
    std::vector<RatFunc> v;          // coefficients v_0..v_N
    std::vector<int> free_indices;   // indices assigned from seeds
    std::vector<std::pair<int, RatFunc>> constraint_rows;  // rows with vanishing pivot
};

/// Solves (d^2 + p d + q) sum v_k z^k = 0 order by order around z = 0 up to
/// v_N. Free coefficients take their values from `seeds` (default 0).
inline SeriesOutcome solve_local_series(const PrincipalOperator& A, int N,
                                        const std::map<int, RatFunc>& seeds = {},
                                        ParamPolicy policy = ParamPolicy::Generic) {
    Var z = zvar();
    AssumptionLog log;
    int P = A.p.is_zero() ? 0 : std::max(0, degree_at(A.p, z, Point::finite(0), policy, &log));
    int Q = A.q.is_zero() ? 0 : std::max(0, degree_at(A.q, z, Point::finite(0), policy, &log));

    auto pw = A.p.is_zero() ? LaurentExpansion{}
                            : laurent(A.p, z, Point::finite(0), -P, N + 2, policy, &log);
    auto qw = A.q.is_zero() ? LaurentExpansion{}
                            : laurent(A.q, z, Point::finite(0), -Q, N + 2, policy, &log);
    auto pc = [&](int j) { return A.p.is_zero() ? RatFunc() : pw.coeff(j); };
    auto qc = [&](int j) { return A.q.is_zero() ? RatFunc() : qw.coeff(j); };

    SeriesOutcome out;
    out.v.assign(static_cast<std::size_t>(N) + 1, RatFunc());
    std::vector<bool> assigned(static_cast<std::size_t>(N) + 1, false);

    auto seed_value = [&](int k) {
        auto it = seeds.find(k);
        return it == seeds.end() ? RatFunc() : it->second;
    };

    int n_start = std::min({-P, -Q, 0});
    auto j_top = [&](int n) { return std::max({n + 2, n + 1 + P, n + Q}); };

    // initial free coefficients: below the first pivot
    for (int k = 0; k < j_top(n_start) && k <= N; ++k) {
        out.v[static_cast<std::size_t>(k)] = seed_value(k);
        assigned[static_cast<std::size_t>(k)] = true;
        out.free_indices.push_back(k);
    }

    auto row_coeff = [&](int n, int k) {
        RatFunc c;
        if (k == n + 2) c += RatFunc(Rat((n + 2) * (n + 1)));
        if (k >= 1) c += RatFunc(Rat(k)) * pc(n + 1 - k);
        c += qc(n - k);
        return c;
    };

    for (int n = n_start; j_top(n) <= N; ++n) {
        int kt = j_top(n);
        if (kt < 0) continue;
        RatFunc pivot = row_coeff(n, kt);
        RatFunc rest;
        for (int k = 0; k < kt; ++k) {
            if (k > N) break;
            RatFunc c = row_coeff(n, k);
            if (!c.is_zero()) rest += c * out.v[static_cast<std::size_t>(k)];
        }
        if (!pivot.is_zero()) {
            out.v[static_cast<std::size_t>(kt)] = -(rest / pivot);
            assigned[static_cast<std::size_t>(kt)] = true;
        } else {
            out.constraint_rows.push_back({n, rest});
            if (!rest.is_zero()) {
                out.obstructed = true;
                out.obstruction_row = n;
                out.obstruction_value = rest;
                return out;
            }
            out.v[static_cast<std::size_t>(kt)] = seed_value(kt);
            assigned[static_cast<std::size_t>(kt)] = true;
            out.free_indices.push_back(kt);
        }
    }
    for (auto& val : out.v) out.nontrivial = out.nontrivial || !val.is_zero();
    return out;
}

/// u'' + p u' + q u for a rational u (used in residual checks)
inline RatFunc apply_operator(const PrincipalOperator& A, const RatFunc& u) {
    Var z = zvar();
    return u.derivative(z).derivative(z) + A.p * u.derivative(z) + A.q * u;
}

// ---------------------------------------------------------------------------
// Power series solvability (Proposition-style case split)
// ---------------------------------------------------------------------------

struct FrobeniusOutcome {
    int case_id = 0;  // 1..5
    bool exists = false;
    SeriesOutcome series;
    // case 2: the quadratic n(n-1) + n p_{-1} + q_{-2} must vanish at a
    // positive integer; case 4: the linear p_{-m} n + q_{-m-1} likewise
    RatFunc obstruction_b, obstruction_c;  // case 2: n^2 + b n + c
    std::vector<int> admissible_n;         // positive integer roots found (constant case)
};

inline FrobeniusOutcome frobenius_attempt(const PrincipalOperator& A, int N,
                                          const RatFunc& v0 = RatFunc(1),
                                          const RatFunc& v1 = RatFunc(),
                                          ParamPolicy policy = ParamPolicy::Generic) {
    Var z = zvar();
    using detail::deg_or_neginf;
    int m = deg_or_neginf(A.p, z, Point::finite(0), policy, nullptr);
    int l = deg_or_neginf(A.q, z, Point::finite(0), policy, nullptr);

    FrobeniusOutcome out;
    std::map<int, RatFunc> seeds{{0, v0}, {1, v1}};

    auto integer_roots_of = [](const RatFunc& b, const RatFunc& c) {
        std::vector<int> ns;
        if (!b.is_constant() || !c.is_constant()) return ns;
        for (int n = 1; n <= 64; ++n) {
            Rat val = Rat(n) * Rat(n) + b.constant_value() * Rat(n) + c.constant_value();
            if (val.is_zero()) ns.push_back(n);
        }
        return ns;
    };

    if (m <= 0 && l <= 0) {
        out.case_id = 1;
        out.series = solve_local_series(A, N, seeds, policy);
        out.exists = !out.series.obstructed;
        return out;
    }
    if (m <= 1 && l <= 2) {
        out.case_id = 2;
        RatFunc pm1 = detail::lcoeff(A.p, z, Point::finite(0), -1);
        RatFunc qm2 = detail::lcoeff(A.q, z, Point::finite(0), -2);
        out.obstruction_b = pm1 - RatFunc(1);
        out.obstruction_c = qm2;
        out.admissible_n = integer_roots_of(out.obstruction_b, out.obstruction_c);
        std::map<int, RatFunc> s2{{0, v0}};
        for (int n : out.admissible_n) s2[n] = RatFunc(1);
        out.series = solve_local_series(A, N, s2, policy);
        out.exists = !out.series.obstructed && out.series.nontrivial;
        return out;
    }
    if (m >= 2 && l <= m) {
        out.case_id = 3;
        out.series = solve_local_series(A, N, seeds, policy);
        out.exists = !out.series.obstructed && out.series.nontrivial;
        return out;
    }
    if (m >= 2 && l == m + 1) {
        out.case_id = 4;
        RatFunc pmm = detail::lcoeff(A.p, z, Point::finite(0), -m);
        RatFunc qml = detail::lcoeff(A.q, z, Point::finite(0), -m - 1);
        // p_{-m} n + q_{-m-1} = 0
        out.obstruction_b = pmm;
        out.obstruction_c = qml;
        if (pmm.is_constant() && qml.is_constant() && !pmm.constant_value().is_zero()) {
            Rat nval = -(qml.constant_value() / pmm.constant_value());
            if (nval.is_integer() && nval > Rat(0)) {
                int n = static_cast<int>(nval.num().get_si());
                out.admissible_n.push_back(n);
            }
        }
        std::map<int, RatFunc> s4;
        for (int n : out.admissible_n) s4[n] = RatFunc(1);
        out.series = solve_local_series(A, N, s4, policy);
        out.exists = !out.series.obstructed && out.series.nontrivial;
        return out;
    }
    out.case_id = 5;
    out.series = solve_local_series(A, N, {}, policy);
    out.exists = false;
    return out;
}

// ---------------------------------------------------------------------------
// Reduction at a singular point (grounded / half-integer normal shapes)
// ---------------------------------------------------------------------------

struct ReduceBranch {
    TransformRecord trace;        // at the local coordinate (point moved to 0)
    PrincipalOperator reduced;    // grounded (integer case) or deg p <= 0 shape
    RatFunc index;                // accumulated power-sandwich exponent
};

struct ReduceResult {
    TransformRecord preamble;    // moves the point to 0
    PrincipalOperator at_zero;   // operator after the preamble
    Rank absolute_rank;
    bool half_integer_case = false;
    std::vector<ReduceBranch> branches;  // 2 in the integer case, 1 otherwise
};

namespace detail {

/// whole reduction runs at 0; applies transformation III while the leading
/// coefficients collide, then II (both branches) or I
inline ReduceResult reduce_at_zero(const PrincipalOperator& A0, ParamPolicy policy) {
    Var z = zvar();
    ReduceResult out;
    out.at_zero = A0;

    Rank r0 = rank(A0, Point::finite(0), policy, nullptr);
    if (r0.twice <= 2) throw RankBelowTwo("rank at the point is " + r0.str());
    int guard = 2 * r0.rounded() + 4;

    PrincipalOperator B = A0;
    TransformRecord common;
    RatFunc zf = RatFunc::var(z);

    for (int iter = 0;; ++iter) {
        if (iter > guard) throw InternalError("reduction did not terminate");
        Rank r = rank(B, Point::finite(0), policy, nullptr);
        if (r.twice <= 2) throw RankBelowTwo("absolute rank fell to " + r.str());

        if (!r.is_integer()) {
            // Transformation I: cancel the principal part of p
            int m = (r.twice + 1) / 2;  // rank = m - 1/2
            if (!B.p.is_zero()) {
                auto exp = laurent(B.p, z, Point::finite(0), -(m - 1), -1, policy, nullptr);
                for (int j = -(m - 1); j <= -1; ++j) {
                    RatFunc pj = exp.coeff(j);
                    if (pj.is_zero()) continue;
                    RatFunc kap = RatFunc(Rat(-1, 2)) * pj;
                    TransformStep st;
                    if (j == -1)
                        st = PowerStep{RatFunc(0), kap};
                    else
                        st = ExpStep{Point::finite(0), -j, kap};
                    B = apply_step(B, st);
                    common.push(st);
                }
            }
            ReduceBranch br;
            br.trace = common;
            br.reduced = B;
            // index shift: powers applied so far
            RatFunc shift;
            for (auto& s : common.steps)
                if (auto* pw = std::get_if<PowerStep>(&s)) shift += pw->kappa;
            br.index = shift;
            out.absolute_rank = rank(B, Point::finite(0), policy, nullptr);
            out.half_integer_case = true;
            out.branches.push_back(std::move(br));
            return out;
        }

        int m = r.twice / 2;
        RatFunc pmm = lcoeff(B.p, z, Point::finite(0), -m);
        RatFunc qm2m = lcoeff(B.q, z, Point::finite(0), -2 * m);
        RatFunc disc = pmm * pmm - RatFunc(4) * qm2m;

        if (disc.is_zero()) {
            // Transformation III: kill the top of p (and of q, which matches)
            TransformStep st = ExpStep{Point::finite(0), m, RatFunc(Rat(-1, 2)) * pmm};
            B = apply_step(B, st);
            common.push(st);
            Rank rafter = rank(B, Point::finite(0), policy, nullptr);
            if (rafter.twice >= r.twice)
                throw InternalError("transformation III did not reduce the rank");
            continue;
        }

        auto sq = ratfunc_sqrt(disc);
        if (!sq)
            throw IrrationalBranch("discriminant " + disc.str() +
                                   " has no rational square root");

        // Transformation II, both branches
        for (int sign : {+1, -1}) {
            RatFunc w_first = (-pmm + RatFunc(sign) * (*sq)) * Rat(1, 2);
            RatFunc pivot = pmm + RatFunc(2) * w_first;  // = +-sqrt(disc), nonzero
            PrincipalOperator C = B;
            TransformRecord tr = common;
            if (!w_first.is_zero()) {
                TransformStep st = ExpStep{Point::finite(0), m, w_first};
                C = apply_step(C, st);
                tr.push(st);
            }
            // solve w_{j+1} for j = -m+1..-1 so that q coefficients
            // -2m+1..-m-1 vanish
            for (int j = -m + 1; j <= -1; ++j) {
                RatFunc cbeta = lcoeff(C.q, z, Point::finite(0), -m + j);
                RatFunc wnext = -(cbeta / pivot);
                TransformStep st;
                if (j == -1)
                    st = PowerStep{RatFunc(0), wnext};
                else
                    st = ExpStep{Point::finite(0), -j, wnext};
                if (!wnext.is_zero()) {
                    C = apply_step(C, st);
                    tr.push(st);
                }
            }
            // grounded shape check: deg p = m >= deg q
            int dp = deg_or_neginf(C.p, z, Point::finite(0), policy, nullptr);
            int dq = deg_or_neginf(C.q, z, Point::finite(0), policy, nullptr);
            if (dp != m || dq > dp) throw InternalError("transformation II failed to ground");
            ReduceBranch br;
            br.trace = tr;
            br.reduced = C;
            RatFunc shift;
            for (auto& s : tr.steps)
                if (auto* pw = std::get_if<PowerStep>(&s)) shift += pw->kappa;
            br.index = shift;
            out.branches.push_back(std::move(br));
        }
        out.absolute_rank = Rank{2 * m};
        out.half_integer_case = false;
        return out;
    }
}

}  // namespace detail

/// Brings the operator to its reduced form at the given singular point
/// (moved to 0 first): grounded with deg p >= deg q in the integer case
/// (both sandwich branches returned), or deg p <= 0 with rank read off q in
/// the half-integer case. The absolute rank is the reduced rank.
inline ReduceResult reduce_at(const PrincipalOperator& A, const Point& pt,
                              ParamPolicy policy = ParamPolicy::Generic) {
    PrincipalOperator B = A;
    TransformRecord pre;
    if (pt.infinite) {
        MoebiusStep inv = MoebiusStep::inversion();
        B = inv.apply(B);
        pre.push(inv);
    } else if (!pt.value.is_zero()) {
        MoebiusStep tr = MoebiusStep::translate(pt.value);
        B = tr.apply(B);
        pre.push(tr);
    }
    ReduceResult out = detail::reduce_at_zero(B, policy);
    out.preamble = pre;
    out.at_zero = B;
    return out;
}

/// z = y^2 at a half-integer-rank singularity placed at 0
inline PrincipalOperator quadratic_substitution(const PrincipalOperator& A) {
    return QuadraticStep{}.apply(A);
}

// ---------------------------------------------------------------------------
// Indices
// ---------------------------------------------------------------------------

inline IndexPair indices(const PrincipalOperator& A, const Point& pt,
                         ParamPolicy policy = ParamPolicy::Generic) {
    Var z = zvar();
    Rank r = rank(A, pt, policy, nullptr);

    if (r.rounded() <= 1) {
        auto [b, c] = detail::indicial_quadratic(A, pt);
        return detail::roots_of_quadratic(b, c);
    }

    RatFunc pm1 = detail::lcoeff(A.p, z, pt, -1);
    if (!r.is_integer()) {
        // equal pair, from the index-sum identity specialized to equal roots
        IndexPair out;
        RatFunc s = pt.infinite ? pm1 - RatFunc(2) + RatFunc(r.value())
                                : -pm1 + RatFunc(r.value());
        out.explicit_roots = true;
        out.rho1 = out.rho2 = s * Rat(1, 2);
        out.sum = s;
        return out;
    }

    // integer rank >= 2: indices are the power parts of the two reduction
    // branches
    try {
        ReduceResult red = reduce_at(A, pt, policy);
        IndexPair out;
        if (red.branches.size() != 2) throw InternalError("expected two branches");
        out.explicit_roots = true;
        out.rho1 = red.branches[0].index;
        out.rho2 = red.branches[1].index;
        out.sum = out.rho1 + out.rho2;
        return out;
    } catch (const IrrationalBranch& e) {
        IndexPair out;
        out.explicit_roots = false;
        out.note = e.what();
        // the sum survives: -p_{-1} + Rk (finite), p_{-1} - 2 + Rk (infinity)
        out.sum = pt.infinite ? pm1 - RatFunc(2) + RatFunc(r.value())
                              : -pm1 + RatFunc(r.value());
        return out;
    }
}

// ---------------------------------------------------------------------------
// Thome formal solutions
// ---------------------------------------------------------------------------

/// Formal solution at a singular point, in the local coordinate u (u = z - z0
/// at a finite point, u = 1/z at infinity):
///     exp( sum_k w_k u^k / k ) * u^index * sum_j v_j u^j
/// with k running over negative integers or half-integers (keys are doubled).
struct FormalSolution {
    bool frobenius = false;                // power-type solution at a Fuchsian point
    std::map<int, RatFunc> exp_part;       // twice-k -> w_k
    RatFunc index;
    std::map<int, RatFunc> series;         // twice-j -> v_j (j >= 0)
    bool log_partner = false;              // Fuchsian logarithmic second solution
};

namespace detail {

/// Reads the accumulated gauge data off a trace recorded at 0. ExpStep(k,
/// kappa) means r' = kappa u^(-k), i.e. w_{1-k} = kappa in the normalization
/// exp(sum_k w_k u^k / k); PowerStep contributes to the index. For a trace
/// recorded on the y-side of y^2 = z, orders and values halve (handled by
/// the caller through y_side).
inline void collect_exp_part(const TransformRecord& tr, bool y_side,
                             std::map<int, RatFunc>& exp_part, RatFunc& index) {
    for (auto& s : tr.steps) {
        if (auto* pw = std::get_if<PowerStep>(&s)) {
            index += y_side ? pw->kappa * Rat(1, 2) : pw->kappa;
        } else if (auto* ex = std::get_if<ExpStep>(&s)) {
            int key = y_side ? (1 - ex->k) : 2 * (1 - ex->k);  // doubled order
            exp_part[key] += y_side ? ex->kappa * Rat(1, 2) : ex->kappa;
        }
    }
}

}  // namespace detail

/// The two Thome solutions at a singular point with rank >= 1 (Fuchsian
/// points give Frobenius solutions, including the logarithmic flag).
inline std::vector<FormalSolution> thome(const PrincipalOperator& A, const Point& pt, int N,
                                         ParamPolicy policy = ParamPolicy::Generic) {
    Var z = zvar();
    Rank r = rank(A, pt, policy, nullptr);
    std::vector<FormalSolution> out;

    // local form at 0
    PrincipalOperator B = A;
    if (pt.infinite) {
        B = MoebiusStep::inversion().apply(B);
    } else if (!pt.value.is_zero()) {
        B = MoebiusStep::translate(pt.value).apply(B);
    }

    if (r.rounded() <= 1) {
        IndexPair idx = indices(A, pt, policy);
        if (!idx.explicit_roots)
            throw IrrationalIndicialRoots(idx.note);
        RatFunc diff = idx.rho1 - idx.rho2;
        bool integer_diff = diff.is_constant() && diff.constant_value().is_integer();
        // larger-index solution always exists
        auto make = [&](const RatFunc& rho, bool& obstructed) {
            PrincipalOperator S = sandwich_power(B, RatFunc(0), -rho);
            auto so = solve_local_series(S, N, {{0, RatFunc(1)}}, policy);
            FormalSolution fs;
            fs.frobenius = true;
            fs.index = rho;
            for (int j = 0; j < static_cast<int>(so.v.size()); ++j)
                if (!so.v[static_cast<std::size_t>(j)].is_zero())
                    fs.series[2 * j] = so.v[static_cast<std::size_t>(j)];
            obstructed = so.obstructed;
            return fs;
        };
        bool obstructed1 = false, obstructed2 = false;
        RatFunc big = idx.rho1, small = idx.rho2;
        if (integer_diff && diff.is_constant() && diff.constant_value().sign() < 0)
            std::swap(big, small);
        FormalSolution f1 = make(big, obstructed1);
        out.push_back(f1);
        if (!integer_diff || diff.is_zero()) {
            if (diff.is_zero()) {
                FormalSolution f2 = f1;
                f2.log_partner = true;
                out.push_back(f2);
            } else {
                bool dummy = false;
                out.push_back(make(small, dummy));
            }
        } else {
            FormalSolution f2 = make(small, obstructed2);
            f2.log_partner = obstructed2;  // inconsistent row => log solution
            out.push_back(f2);
        }
        return out;
    }

    if (r.is_integer()) {
        ReduceResult red = reduce_at(A, pt, policy);
        for (auto& br : red.branches) {
            auto so = solve_local_series(br.reduced, N, {{0, RatFunc(1)}}, policy);
            FormalSolution fs;
            detail::collect_exp_part(br.trace, false, fs.exp_part, fs.index);
            for (int j = 0; j < static_cast<int>(so.v.size()); ++j)
                if (!so.v[static_cast<std::size_t>(j)].is_zero())
                    fs.series[2 * j] = so.v[static_cast<std::size_t>(j)];
            out.push_back(std::move(fs));
        }
        return out;
    }

    // half-integer rank >= 3/2: reduce, then y^2 = z and the integer route
    ReduceResult red = reduce_at(A, pt, policy);
    const ReduceBranch& pre = red.branches.at(0);
    PrincipalOperator Y = quadratic_substitution(pre.reduced);
    ReduceResult redy = detail::reduce_at_zero(Y, policy);
    for (auto& br : redy.branches) {
        auto so = solve_local_series(br.reduced, 2 * N, {{0, RatFunc(1)}}, policy);
        FormalSolution fs;
        detail::collect_exp_part(pre.trace, false, fs.exp_part, fs.index);
        detail::collect_exp_part(br.trace, true, fs.exp_part, fs.index);
        for (int j = 0; j < static_cast<int>(so.v.size()); ++j)
            if (!so.v[static_cast<std::size_t>(j)].is_zero())
                fs.series[j] = so.v[static_cast<std::size_t>(j)];
        out.push_back(std::move(fs));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generalized Fuchs relation
// ---------------------------------------------------------------------------

struct FuchsReport {
    RatFunc lhs;  // sum of all indices
    RatFunc rhs;  // sum of absolute ranks - 2
    bool holds = false;
};

namespace detail {

/// index sum and absolute rank at one singular point
inline std::pair<RatFunc, Rat> index_sum_and_abs(const PrincipalOperator& A, const Point& pt,
                                                 ParamPolicy policy) {
    Var z = zvar();
    Rank r = rank(A, pt, policy, nullptr);
    if (r.rounded() <= 1) {
        auto [b, c] = indicial_quadratic(A, pt);
        RatFunc disc = b * b - RatFunc(4) * c;
        // Rk = 1/2 exactly when the index difference is +-1/2
        Rat abs_rk = (disc == RatFunc(Rat(1, 4))) ? Rat(1, 2) : Rat(1);
        if (r.twice == 1) abs_rk = Rat(1, 2);
        return {-b, abs_rk};
    }
    if (!r.is_integer()) {
        RatFunc pm1 = lcoeff(A.p, z, pt, -1);
        RatFunc s = pt.infinite ? pm1 - RatFunc(2) + RatFunc(r.value())
                                : -pm1 + RatFunc(r.value());
        return {s, r.value()};
    }
    ReduceResult red = reduce_at(A, pt, policy);
    RatFunc s = red.branches.at(0).index + red.branches.at(1).index;
    return {s, red.absolute_rank.value()};
}

}  // namespace detail

inline FuchsReport fuchs_relation_check(const PrincipalOperator& A,
                                        const std::vector<Point>& candidates,
                                        ParamPolicy policy = ParamPolicy::Generic) {
    auto sings = find_singularities(A, candidates, policy, nullptr);
    FuchsReport rep;
    Rat rk_total(0);
    for (auto& s : sings) {
        auto [sum, abs_rk] = detail::index_sum_and_abs(A, s.location, policy);
        rep.lhs += sum;
        rk_total += abs_rk;
    }
    rep.rhs = RatFunc(rk_total - Rat(2));
    rep.holds = (rep.lhs == rep.rhs);
    return rep;
}

// ---------------------------------------------------------------------------
// Nonlogarithmic (apparent) singularities
// ---------------------------------------------------------------------------

/// Decides whether a Fuchsian singular point with integer index difference is
/// nonlogarithmic: the recurrence at the smaller index must pass through the
/// resonance row consistently. Regular points count as nonlogarithmic.
inline bool is_nonlogarithmic(const PrincipalOperator& A, const Point& pt, int N,
                              ParamPolicy policy = ParamPolicy::Generic) {
    if (is_regular_point(A, pt, policy, nullptr)) return true;
    Rank r = rank(A, pt, policy, nullptr);
    if (r.rounded() > 1) throw NotFuchsian("rounded rank " + std::to_string(r.rounded()));

    IndexPair idx = indices(A, pt, policy);
    if (!idx.explicit_roots) throw NonIntegerIndexDifference(idx.note);
    RatFunc diff = idx.rho1 - idx.rho2;
    if (!diff.is_constant() || !diff.constant_value().is_integer())
        throw NonIntegerIndexDifference("index difference " + diff.str());
    int n = static_cast<int>(diff.constant_value().abs().num().get_si());
    if (n == 0) return false;  // equal indices force a logarithm

    PrincipalOperator B = A;
    if (pt.infinite) {
        B = MoebiusStep::inversion().apply(B);
    } else if (!pt.value.is_zero()) {
        B = MoebiusStep::translate(pt.value).apply(B);
    }
    RatFunc small = (diff.constant_value().sign() > 0) ? idx.rho2 : idx.rho1;
    PrincipalOperator S = sandwich_power(B, RatFunc(0), -small);
    auto so = solve_local_series(S, std::max(N, n + 2), {{0, RatFunc(1)}}, policy);
    return !so.obstructed;
}

}  // namespace heun

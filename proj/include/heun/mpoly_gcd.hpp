#pragma once

#include <optional>
#include <random>
#include <vector>

#include "heun/mpoly.hpp"

namespace heun {

MPoly mpoly_gcd(const MPoly& A, const MPoly& B);

namespace detail {

/// dense univariate gcd over Q, monic result (empty = gcd of zeros)
inline std::vector<Rat> uni_gcd(std::vector<Rat> a, std::vector<Rat> b) {
    auto trim = [](std::vector<Rat>& p) {
        while (!p.empty() && p.back().is_zero()) p.pop_back();
    };
    trim(a);
    trim(b);
    while (!b.empty()) {
        while (a.size() >= b.size() && !a.empty()) {
            Rat f = a.back() / b.back();
            std::size_t off = a.size() - b.size();
            for (std::size_t j = 0; j < b.size(); ++j) a[off + j] -= f * b[j];
            a.pop_back();  // leading term cancelled exactly
            trim(a);
        }
        std::swap(a, b);
    }
    if (!a.empty()) {
        Rat lc = a.back();
        for (auto& c : a) c /= lc;
    }
    return a;
}

/// evaluate all variables except `keep` at the given point, producing a
/// dense univariate coefficient vector in `keep`
inline std::vector<Rat> eval_to_uni(const MPoly& p, int keep, const std::map<int, Rat>& point) {
    std::vector<Rat> out;
    for (auto& [m, c] : p.terms()) {
        Rat v = c;
        int e = 0;
        for (auto& [vid, k] : m.e) {
            if (vid == keep) {
                e = k;
                continue;
            }
            auto it = point.find(vid);
            if (it == point.end()) throw std::logic_error("eval_to_uni: unassigned variable");
            Rat pw(1);
            for (int i = 0; i < k; ++i) pw *= it->second;
            v *= pw;
        }
        if (static_cast<std::size_t>(e) >= out.size()) out.resize(static_cast<std::size_t>(e) + 1);
        out[static_cast<std::size_t>(e)] += v;
    }
    while (!out.empty() && out.back().is_zero()) out.pop_back();
    return out;
}

struct UniView {
    Var x;
    std::vector<MPoly> c;  // dense in x
    int deg() const { return static_cast<int>(c.size()) - 1; }
    const MPoly& lc() const { return c.back(); }
    bool zero() const { return c.empty(); }
    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    MPoly to_poly() const { return MPoly::from_coeffs(x, c); }
};

inline UniView view_in(const MPoly& p, Var x) {
    UniView v;
    v.x = x;
    v.c = p.coeffs_in(x);
    v.trim();
    return v;
}

/// a scaled remainder: some lc(b)^k * a mod b in x (enough for a PRS with
/// primitive reduction at every step)
inline UniView prem(UniView a, const UniView& b) {
    int db = b.deg();
    const MPoly lcb = b.lc();
    a.trim();
    while (!a.zero() && a.deg() >= db) {
        int da = a.deg();
        MPoly top = a.c[static_cast<std::size_t>(da)];
        for (auto& cc : a.c) cc = cc * lcb;
        for (int j = 0; j <= db; ++j)
            a.c[static_cast<std::size_t>(da - db + j)] -= top * b.c[static_cast<std::size_t>(j)];
        a.trim();
    }
    return a;
}

/// gcd of the coefficient list (content of a UniView w.r.t. its variable)
inline MPoly content_of(const UniView& v) {
    MPoly g;
    for (auto& cc : v.c) {
        if (cc.is_zero()) continue;
        g = g.is_zero() ? cc : mpoly_gcd(g, cc);
        if (g.is_constant()) break;
    }
    if (g.is_zero()) return MPoly(0);
    return g.primitive_part();
}

inline MPoly prs_gcd(UniView a, UniView b) {
    Var x = a.x;
    if (a.deg() < b.deg()) std::swap(a, b);
    while (true) {
        if (b.zero()) {
            MPoly cont = content_of(a);
            MPoly pp = a.to_poly();
            if (!cont.is_constant()) pp = *pp.divide_exact(cont);
            return pp.primitive_part();
        }
        if (b.deg() == 0) return MPoly(1);
        UniView r = prem(a, b);
        if (!r.zero()) {
            MPoly cont = content_of(r);
            MPoly rp = r.to_poly();
            if (!cont.is_constant()) rp = *rp.divide_exact(cont);
            r = view_in(rp.primitive_part(), x);
        }
        a = std::move(b);
        b = std::move(r);
    }
}

}  // namespace detail

/// gcd of multivariate polynomials over Q; primitive with positive leading
/// coefficient. Evaluation probes certify the coprime case cheaply; the
/// general case runs a primitive PRS with recursive content extraction.
inline MPoly mpoly_gcd(const MPoly& A, const MPoly& B) {
    if (A.is_zero()) return B.is_zero() ? MPoly(0) : B.primitive_part();
    if (B.is_zero()) return A.primitive_part();
    if (A.is_constant() || B.is_constant()) return MPoly(1);

    MPoly a = A.primitive_part(), b = B.primitive_part();
    if (a == b) return a;

    auto va = a.vars_used(), vb = b.vars_used();
    std::vector<int> common;
    for (int v : va)
        if (std::find(vb.begin(), vb.end(), v) != vb.end()) common.push_back(v);
    if (common.empty()) return MPoly(1);

    std::vector<int> allv = va;
    for (int v : vb)
        if (std::find(allv.begin(), allv.end(), v) == allv.end()) allv.push_back(v);

    // Probe each common variable with a random evaluation. When the leading
    // coefficients survive the evaluation, deg_x gcd(A, B) is bounded by the
    // degree of the univariate image gcd.
    std::mt19937 rng(0x5eed1234u);
    std::vector<int> gdeg(common.size(), -1);  // -1 = unknown
    for (std::size_t ci = 0; ci < common.size(); ++ci) {
        Var x{};
        x.id = common[ci];
        for (int attempt = 0; attempt < 3 && gdeg[ci] < 0; ++attempt) {
            std::map<int, Rat> pt;
            for (int v : allv)
                if (v != x.id) pt[v] = Rat(static_cast<int>(rng() % 211) + 2);
            auto ua = detail::eval_to_uni(a, x.id, pt);
            auto ub = detail::eval_to_uni(b, x.id, pt);
            if (static_cast<int>(ua.size()) - 1 != a.degree(x) ||
                static_cast<int>(ub.size()) - 1 != b.degree(x))
                continue;  // a leading coefficient vanished; re-roll
            auto g = detail::uni_gcd(ua, ub);
            gdeg[ci] = static_cast<int>(g.size()) - 1;
        }
    }
    bool all_zero = true, all_known = true;
    for (std::size_t ci = 0; ci < common.size(); ++ci) {
        if (gdeg[ci] != 0) all_zero = false;
        if (gdeg[ci] < 0) all_known = false;
    }
    if (all_known && all_zero) return MPoly(1);

    // If the probe allows the smaller polynomial to divide the larger one,
    // settle that with a single exact division.
    if (all_known) {
        const MPoly* small = &a;
        const MPoly* big = &b;
        if (MonoLess{}(b.leading().first, a.leading().first)) std::swap(small, big);
        bool maybe_divides = true;
        for (std::size_t ci = 0; ci < common.size(); ++ci) {
            Var x{};
            x.id = common[ci];
            if (gdeg[ci] != small->degree(x)) {
                maybe_divides = false;
                break;
            }
        }
        if (maybe_divides && big->divide_exact(*small)) return small->primitive_part();
    }

    // main variable: smallest min-degree among common vars
    Var x{};
    x.id = common[0];
    int best = 1 << 30;
    for (int v : common) {
        Var vv{};
        vv.id = v;
        int m = std::min(a.degree(vv), b.degree(vv));
        if (m < best) {
            best = m;
            x.id = v;
        }
    }

    auto ua = detail::view_in(a, x);
    auto ub = detail::view_in(b, x);
    MPoly ca = detail::content_of(ua), cb = detail::content_of(ub);
    MPoly pa = ca.is_constant() ? a : *a.divide_exact(ca);
    MPoly pb = cb.is_constant() ? b : *b.divide_exact(cb);
    MPoly g = detail::prs_gcd(detail::view_in(pa, x), detail::view_in(pb, x));
    MPoly cg = mpoly_gcd(ca, cb);
    if (!cg.is_constant()) g *= cg;
    return g.primitive_part();
}

inline MPoly mpoly_lcm(const MPoly& a, const MPoly& b) {
    if (a.is_zero() || b.is_zero()) return MPoly(0);
    MPoly g = mpoly_gcd(a, b);
    return (*(a * b).divide_exact(g)).primitive_part();
}

/// Yun's square-free decomposition with respect to x: p = cont * prod a_i^i.
/// Returns the list [a_1, a_2, ...]; the x-free content is not included.
inline std::vector<MPoly> squarefree_decomposition(const MPoly& p, Var x) {
    std::vector<MPoly> out;
    if (p.is_zero() || p.degree(x) <= 0) return out;
    MPoly P = p.primitive_part();
    MPoly dP = P.derivative(x);
    MPoly a = mpoly_gcd(P, dP);
    MPoly b = *P.divide_exact(a);
    MPoly c = *dP.divide_exact(a);
    MPoly d = c - b.derivative(x);
    while (b.degree(x) > 0) {
        MPoly ai = mpoly_gcd(b, d);
        out.push_back(ai.primitive_part());
        b = *b.divide_exact(ai);
        c = *d.divide_exact(ai);
        d = c - b.derivative(x);
    }
    return out;
}

/// exact polynomial square root, if one exists
inline std::optional<MPoly> mpoly_sqrt(const MPoly& p) {
    if (p.is_zero()) return MPoly(0);
    if (p.is_constant()) {
        Rat s;
        if (!p.constant_value().sqrt_exact(s)) return std::nullopt;
        return MPoly(s);
    }
    auto vars = p.vars_used();
    Var x{};
    x.id = vars[0];
    int d = p.degree(x);
    if (d % 2 != 0) return std::nullopt;
    int h = d / 2;
    auto cs = p.coeffs_in(x);
    auto top = mpoly_sqrt(cs[static_cast<std::size_t>(d)]);
    if (!top) return std::nullopt;
    std::vector<MPoly> q(static_cast<std::size_t>(h) + 1);
    q[static_cast<std::size_t>(h)] = *top;
    MPoly two_top = *top * Rat(2);
    for (int m = h - 1; m >= 0; --m) {
        // match the coefficient of x^(h+m) in q^2 against p
        MPoly acc = cs[static_cast<std::size_t>(h + m)];
        for (int i = m + 1; i <= h; ++i) {
            int j = h + m - i;
            if (j <= m || j > h || j < i) continue;
            MPoly prod = q[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j)];
            acc -= (i == j) ? prod : prod * Rat(2);
        }
        auto qm = acc.divide_exact(two_top);
        if (!qm) return std::nullopt;
        q[static_cast<std::size_t>(m)] = *qm;
    }
    MPoly root = MPoly::from_coeffs(x, q);
    if (root * root != p) {
        MPoly neg = -root;
        if (neg * neg != p) return std::nullopt;
        root = neg;
    }
    return root;
}

}  // namespace heun

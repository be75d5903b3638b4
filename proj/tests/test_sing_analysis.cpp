#include <catch2/catch_amalgamated.hpp>

#include "heun/sing_analysis.hpp"
#include "test_util.hpp"

using namespace heun;

namespace {

RatFunc Z() { return RatFunc::var("z"); }

PrincipalOperator make_op(const RatFunc& p, const RatFunc& q) { return PrincipalOperator{p, q}; }

/// independent oracle: indicial roots from the locally expanded quadratic
std::pair<RatFunc, RatFunc> indicial_roots_oracle(const PrincipalOperator& A, const Rat& z0) {
    Var z = zvar();
    Point pt = Point::finite(z0);
    RatFunc pm1 = laurent(A.p, z, pt, -1, -1).coeff(-1);
    RatFunc qm2 = laurent(A.q, z, pt, -2, -2).coeff(-2);
    RatFunc b = pm1 - RatFunc(1);
    auto s = ratfunc_sqrt(b * b - RatFunc(4) * qm2);
    REQUIRE(s);
    return {(-b + *s) * Rat(1, 2), (-b - *s) * Rat(1, 2)};
}

}  // namespace

TEST_CASE("find_singularities: 1d Laplace has only infinity, Fuchsian") {
    PrincipalOperator A = make_op(RatFunc(), RatFunc());
    auto sings = find_singularities(A, {});
    REQUIRE(sings.size() == 1);
    CHECK(sings[0].location.infinite);
    CHECK(sings[0].rk.twice == 2);
    CHECK(sings[0].fuchsian);
}

TEST_CASE("find_singularities: Airy has only infinity, rank 5/2") {
    PrincipalOperator A = make_op(RatFunc(), Z());
    auto sings = find_singularities(A, {Point::finite(0)});
    REQUIRE(sings.size() == 1);
    CHECK(sings[0].location.infinite);
    CHECK(sings[0].rk.twice == 5);
    CHECK(sings[0].rounded == 3);
    CHECK_FALSE(sings[0].fuchsian);
}

TEST_CASE("find_singularities: d2 + (1/z) d is singular at 0 and infinity") {
    PrincipalOperator A = make_op(RatFunc(1) / Z(), RatFunc());
    auto sings = find_singularities(A, rational_pole_candidates(A));
    REQUIRE(sings.size() == 2);
    CHECK(sings[0].location == Point::finite(0));
    CHECK(sings[0].fuchsian);
    CHECK(sings[1].location.infinite);
}

TEST_CASE("rank: the half-integer detection") {
    // d2 + 1/(2z) d + 1/z at 0 -> rank 1/2
    PrincipalOperator A = make_op(RatFunc(Rat(1, 2)) / Z(), RatFunc(1) / Z());
    CHECK(rank(A, Point::finite(0)).twice == 1);
    // without the exact 1/2 residue it is rank 1
    PrincipalOperator B = make_op(RatFunc(Rat(1, 3)) / Z(), RatFunc(1) / Z());
    CHECK(rank(B, Point::finite(0)).twice == 2);
}

TEST_CASE("rank: parameter pole, generic policy") {
    PrincipalOperator A = make_op(RatFunc::var("t") / (Z() * Z()), RatFunc());
    CHECK(rank(A, Point::finite(0)).twice == 4);
    CHECK_THROWS_AS(rank(A, Point::finite(0), ParamPolicy::Strict),
                    UndecidableLeadingCoefficient);
}

TEST_CASE("rank: Airy at infinity is 5/2, rounded 3") {
    PrincipalOperator A = make_op(RatFunc(), Z());
    Rank r = rank(A, Point::inf());
    CHECK(r.twice == 5);
    CHECK(r.rounded() == 3);
}

TEST_CASE("sandwich_power: kappa = 0 is the identity") {
    PrincipalOperator A = make_op(RatFunc(1) / Z(), Z());
    CHECK(sandwich_power(A, RatFunc(0), RatFunc(0)) == A);
}

TEST_CASE("sandwich_power shifts indices by kappa (indicial oracle)") {
    // Euler operator z^2 d2 + c z d in principal form: p = c/z
    RatFunc c = RatFunc::var("c");
    PrincipalOperator A = make_op(c / Z(), RatFunc());
    auto [r1, r2] = indicial_roots_oracle(A, Rat(0));
    CHECK(((r1 == RatFunc(1) - c && r2.is_zero()) || (r2 == RatFunc(1) - c && r1.is_zero())));

    RatFunc kap = RatFunc::var("kappa0");
    PrincipalOperator B = sandwich_power(A, RatFunc(0), kap);
    IndexPair after = indices(B, Point::finite(0));
    REQUIRE(after.explicit_roots);
    CHECK(((after.rho1 == r1 + kap && after.rho2 == r2 + kap) ||
           (after.rho1 == r2 + kap && after.rho2 == r1 + kap)));
}

TEST_CASE("sandwich invariants on a rank-2 point") {
    // p = t/z^2: rank 2 at 0
    RatFunc t = RatFunc::var("t");
    PrincipalOperator A = make_op(t / (Z() * Z()), RatFunc(1) / Z());
    REQUIRE(rank(A, Point::finite(0)).twice == 4);

    // power sandwich preserves rank > 1
    PrincipalOperator B = sandwich_power(A, RatFunc(0), RatFunc(3));
    CHECK(rank(B, Point::finite(0)).twice == 4);

    // exponential sandwich of order k = 2 = rank keeps p_{-1}, q_{-1}, q_{-2}
    PrincipalOperator C = sandwich_exp(A, Point::finite(0), RatFunc::var("c"), 2);
    Var z = zvar();
    for (int k : {-1}) {
        CHECK(laurent(A.p, z, Point::finite(0), k, k).coeff(k) ==
              laurent(C.p, z, Point::finite(0), k, k).coeff(k));
    }
    for (int k : {-1, -2}) {
        CHECK(laurent(A.q, z, Point::finite(0), k, k).coeff(k) ==
              laurent(C.q, z, Point::finite(0), k, k).coeff(k));
    }
}

TEST_CASE("reduce_at: transformation II applies directly, two branches") {
    // p = 3/z^2, q = 2/z^4: p_{-2}^2 = 9 != 8 = 4 q_{-4}
    PrincipalOperator A = make_op(RatFunc(3) / Z().pow(2), RatFunc(2) / Z().pow(4));
    ReduceResult red = reduce_at(A, Point::finite(0));
    CHECK_FALSE(red.half_integer_case);
    CHECK(red.absolute_rank.twice == 4);
    REQUIRE(red.branches.size() == 2);
    Var z = zvar();
    for (auto& br : red.branches) {
        // grounded: deg p = 2 >= deg q, replay reproduces exactly
        CHECK(degree_at(br.reduced.p, z, Point::finite(0)) == 2);
        CHECK(degree_at(br.reduced.q, z, Point::finite(0)) <= 2);
        CHECK(br.trace.replay(A) == br.reduced);
    }
    // the two branch roots of w^2 + 3w + 2 are -1 and -2; traces differ
    CHECK_FALSE(red.branches[0].reduced == red.branches[1].reduced);
}

TEST_CASE("reduce_at: already grounded input keeps an empty record") {
    // p = 1/z^2, q = 1/z: grounded at 0 (deg p >= deg q), rank 2
    PrincipalOperator A = make_op(RatFunc(1) / Z().pow(2), RatFunc(1) / Z());
    ReduceResult red = reduce_at(A, Point::finite(0));
    REQUIRE(red.branches.size() == 2);
    bool has_identity = false;
    for (auto& br : red.branches)
        if (br.trace.empty() && br.reduced == A) has_identity = true;
    CHECK(has_identity);
}

TEST_CASE("reduce_at: degenerate leading pair takes transformation III first") {
    // p = 2/z^2, q = 1/z^4: p_{-2}^2 = 4 q_{-4}
    PrincipalOperator A = make_op(RatFunc(2) / Z().pow(2), RatFunc(1) / Z().pow(4));
    ReduceResult red = reduce_at(A, Point::finite(0));
    CHECK(red.half_integer_case);
    CHECK(red.absolute_rank.twice == 3);  // rank drops to 3/2
    REQUIRE(red.branches.size() == 1);
    CHECK(red.branches[0].trace.replay(A) == red.branches[0].reduced);
    // the reduced shape: deg p <= 0 and rank = deg(q)/2
    Var z = zvar();
    CHECK(degree_at(red.branches[0].reduced.q, z, Point::finite(0)) == 3);
}

TEST_CASE("reduce_at: Fuchsian input is refused") {
    PrincipalOperator A = make_op(RatFunc(1) / Z(), RatFunc());
    CHECK_THROWS_AS(reduce_at(A, Point::finite(0)), RankBelowTwo);
}

TEST_CASE("quadratic substitution: rank-1/2 point becomes regular") {
    PrincipalOperator A = make_op(RatFunc(Rat(1, 2)) / Z(), RatFunc(1) / Z());
    REQUIRE(rank(A, Point::finite(0)).twice == 1);
    PrincipalOperator B = quadratic_substitution(A);
    CHECK(B.q == RatFunc(4));
    CHECK(is_regular_point(B, Point::finite(0)));
}

TEST_CASE("quadratic substitution: p = q = 0 gives d2 - (1/y) d") {
    PrincipalOperator B = quadratic_substitution(make_op(RatFunc(), RatFunc()));
    CHECK(B.p == -(RatFunc(1) / Z()));
    CHECK(B.q.is_zero());
}

TEST_CASE("quadratic substitution: Airy moved to 0, rank 5/2 -> 4") {
    PrincipalOperator Airy = make_op(RatFunc(), Z());
    PrincipalOperator at0 = MoebiusStep::inversion().apply(Airy);
    REQUIRE(rank(at0, Point::finite(0)).twice == 5);
    PrincipalOperator B = quadratic_substitution(at0);
    CHECK(rank(B, Point::finite(0)).twice == 8);
}

TEST_CASE("quadratic substitution output is even in y") {
    testutil::PolyGen gen(11);
    Var z = zvar();
    for (int i = 0; i < 6; ++i) {
        RatFunc p(gen.poly({z}, 2, 3), MPoly::var(z, gen.uniform(1, 2)));
        RatFunc q(gen.poly({z}, 2, 3), MPoly::var(z, gen.uniform(1, 3)));
        PrincipalOperator B = quadratic_substitution(make_op(p, q));
        // invariance under y -> -y: p odd, q even
        CHECK(B.p.subst(z, -RatFunc::var(z)) == -B.p);
        CHECK(B.q.subst(z, -RatFunc::var(z)) == B.q);
    }
}

TEST_CASE("quadratic substitution doubles indices") {
    RatFunc c = RatFunc::var("c");
    PrincipalOperator A = make_op(c / Z(), RatFunc());  // indices {0, 1-c}
    PrincipalOperator B = quadratic_substitution(A);
    IndexPair before = indices(A, Point::finite(0));
    IndexPair after = indices(B, Point::finite(0));
    REQUIRE(before.explicit_roots);
    REQUIRE(after.explicit_roots);
    CHECK(after.sum == RatFunc(2) * before.sum);
    CHECK(((after.rho1 == RatFunc(2) * before.rho1 && after.rho2 == RatFunc(2) * before.rho2) ||
           (after.rho1 == RatFunc(2) * before.rho2 && after.rho2 == RatFunc(2) * before.rho1)));
}

TEST_CASE("indices: Euler I at 0 -> {0, 1-c}") {
    RatFunc c = RatFunc::var("c");
    PrincipalOperator A = make_op(c / Z(), RatFunc());
    IndexPair idx = indices(A, Point::finite(0));
    REQUIRE(idx.explicit_roots);
    CHECK(((idx.rho1.is_zero() && idx.rho2 == RatFunc(1) - c) ||
           (idx.rho2.is_zero() && idx.rho1 == RatFunc(1) - c)));
}

TEST_CASE("indices: grounded irregular point has index 0 and -p_{-1} + Rk") {
    // p = 1/z^2 + 5/z, q = 1/z: grounded rank 2
    PrincipalOperator A = make_op(RatFunc(1) / Z().pow(2) + RatFunc(5) / Z(), RatFunc(1) / Z());
    IndexPair idx = indices(A, Point::finite(0));
    REQUIRE(idx.explicit_roots);
    RatFunc other = RatFunc(-5) + RatFunc(2);  // -p_{-1} + Rk
    CHECK(((idx.rho1.is_zero() && idx.rho2 == other) ||
           (idx.rho2.is_zero() && idx.rho1 == other)));
}

TEST_CASE("indices: rank 3/2 with p_{-1} = 0 gives the equal pair 3/4") {
    PrincipalOperator A = make_op(RatFunc(), RatFunc(1) / Z().pow(3));
    REQUIRE(rank(A, Point::finite(0)).twice == 3);
    IndexPair idx = indices(A, Point::finite(0));
    REQUIRE(idx.explicit_roots);
    CHECK(idx.rho1 == RatFunc(Rat(3, 4)));
    CHECK(idx.rho2 == RatFunc(Rat(3, 4)));
}

TEST_CASE("index-sum identities at analyzed singularities") {
    // finite: rho1 + rho2 = -p_{-1} + Rk; randomized grounded operators
    testutil::PolyGen gen(99);
    Var z = zvar();
    for (int i = 0; i < 12; ++i) {
        // grounded rank-m operator: p = u/z^m with u(0) != 0, q pole <= m
        int m = gen.uniform(2, 3);
        MPoly u = gen.uni(z, m - 1) + MPoly(gen.nonzero_rat());
        if (u.subst(z, Rat(0)).is_zero()) continue;
        RatFunc p(u, MPoly::var(z, m));
        RatFunc q(gen.poly({z}, 1, 2), MPoly::var(z, gen.uniform(0, m)));
        PrincipalOperator A = make_op(p, q);
        Rank r = rank(A, Point::finite(0));
        if (r.twice != 2 * m) continue;
        IndexPair idx = indices(A, Point::finite(0));
        RatFunc pm1 = laurent(A.p, z, Point::finite(0), -1, -1).coeff(-1);
        CHECK(idx.sum == -pm1 + RatFunc(Rat(2 * m, 2)));
    }
}

TEST_CASE("frobenius case 1: regular point, v0 and v1 free") {
    PrincipalOperator A = make_op(Z(), RatFunc(1));
    auto out = frobenius_attempt(A, 8, RatFunc::var("a"), RatFunc::var("b"));
    CHECK(out.case_id == 1);
    CHECK(out.exists);
    CHECK(out.series.v[0] == RatFunc::var("a"));
    CHECK(out.series.v[1] == RatFunc::var("b"));
    // residual of the truncated series vanishes to the expected order
    RatFunc u;
    for (int k = 0; k <= 8; ++k) u += out.series.v[static_cast<std::size_t>(k)] * Z().pow(k);
    RatFunc res = apply_operator(A, u);
    if (!res.is_zero()) {
        CHECK(-degree_at(res, zvar(), Point::finite(0)) >= 7);
    }
}

TEST_CASE("frobenius case 5: no power series solutions") {
    // m = 1, l = 3
    PrincipalOperator A = make_op(RatFunc(1) / Z(), RatFunc(1) / Z().pow(3));
    auto out = frobenius_attempt(A, 8);
    CHECK(out.case_id == 5);
    CHECK_FALSE(out.exists);
    CHECK_FALSE(out.series.nontrivial);
}

TEST_CASE("frobenius case 3: first recurrence row gives v1 = -q_{-2} v0") {
    // m = 2, l = 2, p_{-2} = 1
    RatFunc g = RatFunc::var("g");
    PrincipalOperator A = make_op(RatFunc(1) / Z().pow(2), g / Z().pow(2));
    auto out = frobenius_attempt(A, 6, RatFunc(1));
    CHECK(out.case_id == 3);
    CHECK(out.exists);
    CHECK(out.series.v[1] == -g);
}

TEST_CASE("frobenius case 2: obstruction quadratic reported") {
    // p = 1/z, q = -1/z^2: indicial n(n-1) + n - 1 = n^2 - 1: root n = 1
    PrincipalOperator A = make_op(RatFunc(1) / Z(), RatFunc(-1) / Z().pow(2));
    auto out = frobenius_attempt(A, 6);
    CHECK(out.case_id == 2);
    REQUIRE(out.admissible_n.size() == 1);
    CHECK(out.admissible_n[0] == 1);
    CHECK(out.exists);
    CHECK(out.series.v[0].is_zero());
    CHECK(out.series.v[1] == RatFunc(1));
}

TEST_CASE("frobenius case 4: linear obstruction") {
    // m = 2, l = 3: p = 1/z^2, q = -2/z^3: condition n - 2 = 0 -> n = 2
    PrincipalOperator A = make_op(RatFunc(1) / Z().pow(2), RatFunc(-2) / Z().pow(3));
    auto out = frobenius_attempt(A, 6);
    CHECK(out.case_id == 4);
    REQUIRE(out.admissible_n.size() == 1);
    CHECK(out.admissible_n[0] == 2);
    CHECK(out.exists);
}

TEST_CASE("thome: grounded integer-rank operator has a pure power-series branch") {
    PrincipalOperator A = make_op(RatFunc(1) / Z().pow(2) + RatFunc(1) / Z(), RatFunc(1) / Z());
    auto sols = thome(A, Point::finite(0), 8);
    REQUIRE(sols.size() == 2);
    bool pure_series = false;
    for (auto& s : sols) pure_series = pure_series || s.exp_part.empty();
    CHECK(pure_series);
}

TEST_CASE("thome: half-integer solutions flip sign at half-integer orders") {
    // rank 5/2 at 0: q = -1/z^5 (negative so the branch roots stay rational)
    PrincipalOperator A = make_op(RatFunc(), RatFunc(-1) / Z().pow(5));
    auto sols = thome(A, Point::finite(0), 6);
    REQUIRE(sols.size() == 2);
    // w_{0,k} = (-1)^{2k} w_{1,k}: equal at integer k, opposite at half-integer
    for (auto& [tk, w] : sols[0].exp_part) {
        auto it = sols[1].exp_part.find(tk);
        REQUIRE(it != sols[1].exp_part.end());
        if (tk % 2 == 0)
            CHECK(w == it->second);
        else
            CHECK(w == -it->second);
    }
    // leading exponential order: w_{-2m+1} = sqrt(-q~_{-4m}) with 2m = 4
    // here the reduced q~ is -(4)/y^8 after clearing: check nonzero
    REQUIRE_FALSE(sols[0].exp_part.empty());
    CHECK_FALSE(sols[0].exp_part.begin()->second.is_zero());
    CHECK(sols[0].exp_part.begin()->first % 2 != 0);  // deepest order is half-integer
}

TEST_CASE("thome: truncated residual at a grounded point") {
    PrincipalOperator A = make_op(RatFunc(2) / Z().pow(2) + RatFunc(3) / Z(),
                                  RatFunc(1) / Z().pow(2));
    int N = 10;
    auto sols = thome(A, Point::finite(0), N);
    for (auto& s : sols) {
        if (!s.exp_part.empty() || !s.index.is_zero()) continue;
        RatFunc u;
        for (auto& [tj, v] : s.series) u += v * Z().pow(tj / 2);
        RatFunc res = apply_operator(A, u);
        if (!res.is_zero())
            CHECK(-degree_at(res, zvar(), Point::finite(0)) >= N - 2 * 2);
    }
}

TEST_CASE("fuchs relation: hypergeometric operator") {
    RatFunc a = RatFunc::var("a"), b = RatFunc::var("b"), c = RatFunc::var("c");
    RatFunc sigma = Z() * (RatFunc(1) - Z());
    PrincipalOperator A =
        make_op((c - (a + b + RatFunc(1)) * Z()) / sigma, -(a * b) / sigma);
    auto rep = fuchs_relation_check(A, {Point::finite(0), Point::finite(1)});
    CHECK(rep.lhs == RatFunc(1));
    CHECK(rep.rhs == RatFunc(1));
    CHECK(rep.holds);
}

TEST_CASE("fuchs relation: 1d Laplace") {
    auto rep = fuchs_relation_check(make_op(RatFunc(), RatFunc()), {});
    CHECK(rep.holds);
    CHECK(rep.rhs == RatFunc(-1));
}

TEST_CASE("fuchs relation: grounded Heun normal form, symbolic") {
    RatFunc t = RatFunc::var("t");
    RatFunc sg = Z() * (Z() - RatFunc(1)) * (Z() - t);
    RatFunc tau = RatFunc::var("a2") * Z().pow(2) + RatFunc::var("a1") * Z() + RatFunc::var("a0");
    RatFunc eta = RatFunc::var("b1") * Z() + RatFunc::var("b0");
    PrincipalOperator A = make_op(tau / sg, eta / sg);
    auto rep = fuchs_relation_check(A, {Point::finite(0), Point::finite(1), Point::finite(t)});
    CHECK(rep.holds);
}

TEST_CASE("fuchs relation: randomized grounded M2/M3 operators") {
    testutil::PolyGen gen(314);
    Var z = zvar();
    int done = 0;
    while (done < 30) {
        int n = gen.uniform(2, 3);
        // sigma with n distinct small integer roots
        std::vector<Rat> roots;
        for (int i = 0; i < n; ++i) {
            Rat r;
            bool dup;
            do {
                r = Rat(gen.uniform(-4, 4));
                dup = false;
                for (auto& e : roots) dup = dup || e == r;
            } while (dup);
            roots.push_back(r);
        }
        MPoly sg(1);
        std::vector<Point> pts;
        for (auto& r : roots) {
            sg *= MPoly::var(z) - MPoly(r);
            pts.push_back(Point::finite(r));
        }
        MPoly tau = gen.poly({z}, n - 1, n);
        MPoly eta = gen.poly({z}, n - 2, n - 1);
        PrincipalOperator A = make_op(RatFunc(tau, sg), RatFunc(eta, sg));
        auto rep = fuchs_relation_check(A, pts);
        CHECK(rep.holds);
        ++done;
    }
}

TEST_CASE("is_nonlogarithmic: explicit log solution at 0") {
    // d2 + (1/z) d has solutions 1 and log z
    PrincipalOperator A = make_op(RatFunc(1) / Z(), RatFunc());
    CHECK_FALSE(is_nonlogarithmic(A, Point::finite(0), 10));
}

TEST_CASE("is_nonlogarithmic: regular point counts as nonlogarithmic") {
    PrincipalOperator A = make_op(Z(), RatFunc(1));
    CHECK(is_nonlogarithmic(A, Point::finite(0), 10));
}

TEST_CASE("is_nonlogarithmic: apparent singularity with indices 0,2") {
    // u'' - (2/(z^2)) u has indices {-1, 2}... use instead the classic
    // apparent point: p = -2/z, q = 2/z^2 gives indices {1, 2}; solutions
    // z and z^2 are both analytic
    PrincipalOperator A = make_op(RatFunc(-2) / Z(), RatFunc(2) / Z().pow(2));
    IndexPair idx = indices(A, Point::finite(0));
    REQUIRE(idx.explicit_roots);
    CHECK(is_nonlogarithmic(A, Point::finite(0), 10));
}

TEST_CASE("is_nonlogarithmic: errors") {
    PrincipalOperator A = make_op(RatFunc(), RatFunc(1) / Z().pow(3));
    CHECK_THROWS_AS(is_nonlogarithmic(A, Point::finite(0), 10), NotFuchsian);
    // irrational index difference
    PrincipalOperator B = make_op(RatFunc(), RatFunc(1) / Z().pow(2));
    CHECK_THROWS_AS(is_nonlogarithmic(B, Point::finite(0), 10), NonIntegerIndexDifference);
}

TEST_CASE("transform record replay reproduces composite transforms") {
    testutil::PolyGen gen(55);
    PrincipalOperator A = make_op(RatFunc(3) / Z().pow(2), RatFunc(2) / Z().pow(4));
    TransformRecord rec;
    rec.push(PowerStep{RatFunc(0), RatFunc::var("kappa0")});
    rec.push(ExpStep{Point::finite(0), 2, RatFunc(Rat(1, 2))});
    rec.push(MoebiusStep::translate(RatFunc(1)));
    rec.push(ExpStep{Point::inf(), 1, RatFunc(2)});
    PrincipalOperator B = rec.replay(A);
    PrincipalOperator C = A;
    for (auto& s : rec.steps) C = apply_step(C, s);
    CHECK(B == C);
}

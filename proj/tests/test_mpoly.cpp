#include <catch2/catch_amalgamated.hpp>

#include "heun/mpoly.hpp"
#include "heun/mpoly_gcd.hpp"
#include "test_util.hpp"

using namespace heun;

TEST_CASE("Rat canonical form and arithmetic") {
    Rat a(2, 4);
    CHECK(a == Rat(1, 2));
    CHECK(a.num() == 1);
    CHECK(a.den() == 2);
    CHECK(Rat(-3, -6) == Rat(1, 2));
    CHECK((Rat(1, 3) + Rat(1, 6)) == Rat(1, 2));
    CHECK((Rat(1, 2) * Rat(2, 3)) == Rat(1, 3));
    CHECK_THROWS(Rat(1, 2) / Rat(0));
    CHECK(Rat::parse("-7/21") == Rat(-1, 3));
    CHECK(Rat::gcd(Rat(4, 3), Rat(2, 9)) == Rat(2, 9));

    Rat s;
    CHECK(Rat(9, 4).sqrt_exact(s));
    CHECK(s == Rat(3, 2));
    CHECK_FALSE(Rat(2).sqrt_exact(s));
    CHECK_FALSE(Rat(-1).sqrt_exact(s));
}

TEST_CASE("variable order: z, lambda, mu, t, then parameters alphabetically") {
    Var z("z"), lam("lambda"), mu("mu"), t("t"), a("alpha"), k("kappa0");
    CHECK(var_before(z.id, lam.id));
    CHECK(var_before(lam.id, mu.id));
    CHECK(var_before(mu.id, t.id));
    CHECK(var_before(t.id, a.id));
    CHECK(var_before(a.id, k.id));  // alphabetical among parameters
}

TEST_CASE("MPoly canonical text and grlex order") {
    Var z("z"), t("t");
    MPoly p = MPoly::var(z, 2) - MPoly(3) * MPoly::var(t) + MPoly(1);
    CHECK(p.str() == "z^2 - 3*t + 1");
    MPoly q = MPoly::var(z) * MPoly::var(t) + MPoly::var(z, 2);
    // z^2 > z*t in grlex (same degree, z earlier)
    CHECK(q.leading().first == Monomial::of(z, 2));
    CHECK((p - p).is_zero());
    CHECK(p.degree(z) == 2);
    CHECK(p.degree(t) == 1);
    CHECK(p.total_degree() == 2);
}

TEST_CASE("MPoly substitution and derivative") {
    Var z("z"), t("t");
    MPoly p = MPoly::var(z, 2) + MPoly::var(t) * MPoly::var(z);  // z^2 + t z
    CHECK(p.subst(z, Rat(2)) == MPoly(4) + MPoly(2) * MPoly::var(t));
    CHECK(p.derivative(z) == MPoly(2) * MPoly::var(z) + MPoly::var(t));
    CHECK(p.derivative(t) == MPoly::var(z));
    MPoly comp = p.subst(z, MPoly::var(z) + MPoly(1));
    CHECK(comp == MPoly::var(z, 2) + MPoly(2) * MPoly::var(z) + MPoly(1) +
                      MPoly::var(t) * MPoly::var(z) + MPoly::var(t));
}

TEST_CASE("ring axioms on random triples") {
    testutil::PolyGen gen(42);
    std::vector<Var> vars{Var("z"), Var("t"), Var("kappa0")};
    for (int i = 0; i < 40; ++i) {
        MPoly a = gen.poly(vars, 3, 4), b = gen.poly(vars, 3, 4), c = gen.poly(vars, 3, 4);
        CHECK(a + b == b + a);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("exact division") {
    Var z("z"), t("t");
    MPoly a = (MPoly::var(z) - MPoly(1)) * (MPoly::var(z) - MPoly::var(t));
    auto q = a.divide_exact(MPoly::var(z) - MPoly(1));
    REQUIRE(q);
    CHECK(*q == MPoly::var(z) - MPoly::var(t));
    CHECK_FALSE(a.divide_exact(MPoly::var(z) + MPoly(1)));
}

TEST_CASE("gcd on constructed common factors") {
    testutil::PolyGen gen(7);
    std::vector<Var> vars{Var("z"), Var("lambda"), Var("t")};
    for (int i = 0; i < 25; ++i) {
        MPoly g = gen.nonzero_poly(vars, 2, 3).primitive_part();
        MPoly a = g * gen.nonzero_poly(vars, 2, 3);
        MPoly b = g * gen.nonzero_poly(vars, 2, 3);
        MPoly got = mpoly_gcd(a, b);
        CHECK(got.divide_exact(g.primitive_part()).has_value());
        CHECK(a.divide_exact(got).has_value());
        CHECK(b.divide_exact(got).has_value());
    }
}

TEST_CASE("gcd of coprime polynomials is 1") {
    Var z("z"), t("t");
    MPoly a = MPoly::var(z, 3) + MPoly::var(t);
    MPoly b = MPoly::var(z) * MPoly::var(t) + MPoly(1);
    CHECK(mpoly_gcd(a, b) == MPoly(1));
    CHECK(mpoly_gcd(MPoly::var(z) - MPoly(1), MPoly::var(z) + MPoly(1)) == MPoly(1));
}

TEST_CASE("gcd degenerate cases") {
    Var z("z");
    MPoly p = MPoly(2) * MPoly::var(z) + MPoly(4);
    CHECK(mpoly_gcd(p, MPoly(0)) == MPoly::var(z) + MPoly(2));
    CHECK(mpoly_gcd(MPoly(0), MPoly(0)).is_zero());
    CHECK(mpoly_gcd(p, MPoly(6)) == MPoly(1));
}

TEST_CASE("lcm") {
    Var z("z");
    MPoly a = MPoly::var(z) * (MPoly::var(z) - MPoly(1));
    MPoly b = (MPoly::var(z) - MPoly(1)) * (MPoly::var(z) + MPoly(1));
    MPoly l = mpoly_lcm(a, b);
    CHECK(l.degree(z) == 3);
    CHECK(l.divide_exact(a).has_value());
    CHECK(l.divide_exact(b).has_value());
}

TEST_CASE("squarefree decomposition") {
    Var z("z"), t("t");
    MPoly f = (MPoly::var(z) - MPoly(1)) * (MPoly::var(z) - MPoly::var(t)).pow(2) *
              MPoly::var(z).pow(3);
    auto sf = squarefree_decomposition(f, z);
    REQUIRE(sf.size() == 3);
    CHECK(sf[0] == MPoly::var(z) - MPoly(1));
    CHECK(sf[1] == MPoly::var(z) - MPoly::var(t));
    CHECK(sf[2] == MPoly::var(z));
}

TEST_CASE("polynomial square root") {
    Var z("z"), t("t"), k("kappa0");
    MPoly r = MPoly::var(z, 2) - MPoly::var(t) * MPoly::var(z) + MPoly::var(k);
    auto s = mpoly_sqrt(r * r);
    REQUIRE(s);
    CHECK((*s == r || *s == -r));
    CHECK_FALSE(mpoly_sqrt(MPoly::var(z)));
    CHECK_FALSE(mpoly_sqrt(MPoly::var(z, 2) + MPoly(1)));
    auto c = mpoly_sqrt(MPoly(Rat(49, 16)));
    REQUIRE(c);
    CHECK(*c == MPoly(Rat(7, 4)));
}

TEST_CASE("random gcd stress against multiply-back", "[slow]") {
    testutil::PolyGen gen(1234);
    std::vector<Var> vars{Var("z"), Var("lambda"), Var("t"), Var("kappa0")};
    for (int i = 0; i < 10; ++i) {
        MPoly g = gen.nonzero_poly(vars, 3, 4).primitive_part();
        MPoly a = g * gen.nonzero_poly(vars, 3, 5);
        MPoly b = g * gen.nonzero_poly(vars, 3, 5);
        MPoly got = mpoly_gcd(a, b);
        auto qa = a.divide_exact(got);
        auto qb = b.divide_exact(got);
        REQUIRE(qa);
        REQUIRE(qb);
        CHECK(*qa * got == a);
        CHECK(*qb * got == b);
        CHECK(got.divide_exact(g).has_value());
    }
}

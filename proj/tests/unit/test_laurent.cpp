#include "clustercc/error.hpp"
#include "clustercc/laurent.hpp"

#include "doctest.h"

#include <random>

using namespace clustercc;

namespace {

LaurentPoly P(const std::string& s, int n) { return LaurentPoly::parse(s, n); }

LaurentPoly random_poly(std::mt19937& rng, int n) {
    std::uniform_int_distribution<int> ex(-2, 2), co(-3, 3), count(0, 4);
    LaurentPoly p(n);
    const int terms = count(rng);
    for (int t = 0; t < terms; ++t) {
        IntVector e(n);
        for (auto& x : e) x = ex(rng);
        p.add_term(e, Rational(co(rng), 1 + (t % 2)));
    }
    return p;
}

}  // namespace

TEST_CASE("arithmetic basics") {
    auto f = P("1 + x1", 2);
    CHECK(f + LaurentPoly(2) == f);
    CHECK(P("1 + x1", 2) * P("1 + x2", 2) == P("1 + x1 + x2 + x1 x2", 2));
    // x2^-1 x3 x4 (1 + x1 x3^-1 x4^-1) = x2^-1 x3 x4 + x1 x2^-1
    CHECK(P("x2^-1 x3 x4", 4) * P("1 + x1 x3^-1 x4^-1", 4) == P("x2^-1 x3 x4 + x1 x2^-1", 4));
    CHECK_THROWS_AS(P("x1", 1) + P("x1", 2), Error);
    CHECK((f - f).is_zero());
    CHECK(P("x1 + x2", 2).pow(3) == P("x1^3 + 3*x1^2 x2 + 3*x1 x2^2 + x2^3", 2));
    CHECK(P("2*x1^2", 1).pow(-1) == P("1/2 * x1^-2", 1));
}

TEST_CASE("text and json round trip") {
    auto f = P("3/2 * x1^-1 x3 + -2 * x2^4 + 7", 3);
    CHECK(LaurentPoly::parse(f.to_string(), 3) == f);
    CHECK(LaurentPoly::from_json(f.to_json()) == f);
    CHECK(P("0", 2).to_string() == "0");
    CHECK(P("x1 x1", 1) == P("x1^2", 1));
    CHECK(P("-x1", 1) == P("-1 * x1", 1));
    CHECK_THROWS_AS(P("x3", 2), Error);
    CHECK_THROWS_AS(P("1 + + x1", 2), Error);
}

TEST_CASE("ring axioms on random inputs") {
    std::mt19937 rng(1);
    for (int i = 0; i < 100; ++i) {
        auto a = random_poly(rng, 3), b = random_poly(rng, 3), c = random_poly(rng, 3);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a * b == b * a);
        CHECK(a + b == b + a);
    }
}

TEST_CASE("exact division") {
    std::mt19937 rng(2);
    for (int i = 0; i < 100; ++i) {
        auto a = random_poly(rng, 3), b = random_poly(rng, 3);
        if (b.is_zero()) continue;
        auto q = (a * b).divide(b);
        REQUIRE(q);
        CHECK(*q == a);
    }
    CHECK(!P("1 + x1", 2).divide(P("1 + x2", 2)));
    CHECK(*P("x1^2 + -1", 1).divide(P("x1 + 1", 1)) == P("x1 + -1", 1));
    CHECK(*P("x1^-3 + x1^-2", 1).divide(P("x1 + 1", 1)) == P("x1^-3", 1));
}

TEST_CASE("monomial substitution") {
    auto f = P("1 + x1 + x1 x2", 2);
    CHECK(substitute_monomials(f, MonomialAssignment::identity(2)) == f);

    // y-hat assignment from B = [[0,1],[-1,0],[1,-1]]: yhat_j = prod_i x_i^{b_ij}
    MonomialAssignment yhat;
    yhat.target_vars = 3;
    yhat.exps = {{0, -1, 1}, {1, 0, -1}};
    yhat.scalars = {1, 1};
    CHECK(substitute_monomials(f, yhat) == P("1 + x2^-1 x3 + x1 x2^-1", 3));
    CHECK_THROWS_AS(substitute_monomials(P("x1", 1), yhat), Error);

    // homomorphism property and invertible change of variables
    std::mt19937 rng(4);
    MonomialAssignment s, sinv;
    s.target_vars = sinv.target_vars = 3;
    s.exps = {{1, 1, 0}, {0, 1, 0}, {0, 2, 1}};
    sinv.exps = {{1, -1, 0}, {0, 1, 0}, {0, -2, 1}};
    s.scalars = {2, 1, Rational(1, 3)};
    sinv.scalars = {Rational(1, 2), 1, 3};
    for (int i = 0; i < 50; ++i) {
        auto a = random_poly(rng, 3), b = random_poly(rng, 3);
        CHECK(substitute_monomials(a * b, s) == substitute_monomials(a, s) * substitute_monomials(b, s));
        CHECK(substitute_monomials(a + b, s) == substitute_monomials(a, s) + substitute_monomials(b, s));
        CHECK(substitute_monomials(substitute_monomials(a, s), sinv) == a);
    }
}

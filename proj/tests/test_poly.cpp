#include "doctest.h"

#include <random>

#include "test_util.hpp"

using namespace qem;
using namespace qemtest;

TEST_CASE("parse canonical forms") {
    auto r = ring_q({"x", "y", "z"});

    const Poly q2 = P(r, "x*y - z*(z+1)");
    CHECK(q2.terms().size() == 3);
    CHECK(q2 == P(r, "x*y") - P(r, "z^2") - P(r, "z"));
    CHECK(q2.str() == "x*y - z^2 - z");

    CHECK(P(r, "0").is_zero());
    CHECK(P(r, "0").terms().empty());

    auto rt = ring_q({"t", "x", "y"});
    const Poly p = P(rt, "t^2*y - x*(x+1)");
    CHECK(p.terms().size() == 3);
    CHECK(p.str() == "t^2*y - x^2 - x");

    // implicit multiplication, fractions, whitespace
    CHECK(P(r, "2x ( x + 1 )") == P(r, "2*x^2 + 2*x"));
    CHECK(P(r, "1/2 * x - x/2").is_zero());
    CHECK(P(r, "-x + x").is_zero());
    CHECK(P(r, "(x+y)^2") == P(r, "x^2 + 2*x*y + y^2"));

    CHECK_THROWS_AS(P(r, "x + w"), UnknownVariable);
    CHECK_THROWS_AS(P(r, "x + "), SyntaxError);
    CHECK_THROWS_AS(P(r, "(x"), SyntaxError);
    CHECK_THROWS_AS(P(r, "x/0"), CoefficientError);
    CHECK_THROWS_AS(P(r, "x/(y - y)"), CoefficientError);
    CHECK_THROWS_AS(P(r, "1/x"), SyntaxError); // non-constant divisor
    try {
        P(r, "x + %");
    } catch (const SyntaxError& e) {
        CHECK(e.position == 4);
    }
}

TEST_CASE("arithmetic basics") {
    auto r = ring_q({"x", "y"});
    CHECK(P(r, "(x+y)") * P(r, "(x-y)") == P(r, "x^2 - y^2"));

    std::mt19937 rng(7);
    for (int i = 0; i < 20; ++i) {
        const Poly f = rand_poly(rng, r);
        CHECK(f + Poly::zero(r) == f);
        CHECK(f - f == Poly::zero(r));
        CHECK(f * Poly::one(r) == f);
    }

    auto r2 = ring_fp(2, {"x"});
    CHECK(P(r2, "(x+1)^2") == P(r2, "x^2 + 1"));

    auto rq = ring_q({"x"});
    CHECK_THROWS_AS(P(rq, "x") + P(r2, "x"), RingMismatch);
}

TEST_CASE("printer emits descending graded-lex and round-trips") {
    auto r = ring_q({"t", "x", "y"});
    std::mt19937 rng(99);
    for (int i = 0; i < 100; ++i) {
        const Poly f = rand_poly(rng, r, 6, 4);
        CHECK(parse_poly(f.str(), r) == f);
    }
    // residue coefficients print in [0, p)
    auto r3 = ring_fp(3, {"x"});
    CHECK(P(r3, "-x").str() == "2*x");
    CHECK(parse_poly(P(r3, "-x").str(), r3) == P(r3, "-x"));

    // function-field coefficients round-trip, including fractions
    auto kt = FieldDescriptor::rational_functions(FieldDescriptor::rationals(), "t");
    auto rkt = Ring::make(kt, {"x", "y"});
    const Poly f = parse_poly("(t^2+1)/(t+1)*x - t*y + (t - 1/2)", rkt);
    CHECK(parse_poly(f.str(), rkt) == f);
    const Poly g = parse_poly("-t*x + 1", rkt);
    CHECK(parse_poly(g.str(), rkt) == g);
}

TEST_CASE("substitution identities") {
    auto r = ring_q({"x", "y", "z"});
    auto rt = ring_q({"t"});
    const Poly t = P(rt, "t");

    // image of the line under the first parameterized curve lies on the quadric
    std::map<std::string, Poly> nu{{"x", P(rt, "t*(1+t*t)")}, {"y", t}, {"z", P(rt, "t*t")}};
    CHECK(substitute(P(r, "x*y - z*(z+1)"), nu).is_zero());

    // the quintic space curve admits a cubic-free left inverse
    std::map<std::string, Poly> shastri{{"x", P(rt, "t^3 - 3*t")},
                                        {"y", P(rt, "t^4 - 4*t^2 - 1")},
                                        {"z", P(rt, "t^5 - 10*t")}};
    CHECK(substitute(P(r, "3*z - 12*x - 5*x*y + y*z - x^3"), shastri) == t);

    // quartic relation between the two lower-degree components
    auto rxt = ring_q({"x", "t"});
    std::map<std::string, Poly> gamma{{"x", P(rt, "t^3 - 3*t")},
                                      {"t", P(rt, "t^4 - 4*t^2 - 1")}};
    CHECK(substitute(P(rxt, "x^2*(x^2-4) - t*(t^2+9*t+24)"), gamma) == P(rt, "16"));

    CHECK_THROWS_AS(substitute(P(r, "x + y"), {{"x", t}}), MissingImage);
    // constants need no images
    CHECK(substitute(P(r, "5"), {{"x", t}}) == P(rt, "5"));
}

TEST_CASE("substitution is a ring homomorphism") {
    std::mt19937 rng(12345);
    auto r = ring_q({"x", "y"});
    auto rt = ring_q({"s", "t"});
    for (int i = 0; i < 30; ++i) {
        const Poly f = rand_poly(rng, r), g = rand_poly(rng, r);
        std::map<std::string, Poly> im{{"x", rand_poly(rng, rt)}, {"y", rand_poly(rng, rt)}};
        CHECK(substitute(f + g, im) == substitute(f, im) + substitute(g, im));
        CHECK(substitute(f * g, im) == substitute(f, im) * substitute(g, im));
    }
}

TEST_CASE("derivatives") {
    auto r = ring_q({"x", "y"});
    CHECK(partial_derivative(P(r, "x^2*y"), "x") == P(r, "2*x*y"));
    CHECK(partial_derivative(P(r, "7"), "x").is_zero());
    CHECK_THROWS_AS(partial_derivative(P(r, "x"), "q"), UnknownVariable);

    auto r3 = ring_fp(3, {"x"});
    CHECK(partial_derivative(P(r3, "x^3"), "x").is_zero());

    std::mt19937 rng(5150);
    for (int i = 0; i < 30; ++i) {
        const Poly f = rand_poly(rng, r), g = rand_poly(rng, r);
        CHECK(partial_derivative(f * g, "x") ==
              f * partial_derivative(g, "x") + g * partial_derivative(f, "x"));
    }
}

TEST_CASE("jacobian determinants and the chain rule") {
    auto r = ring_q({"x", "y"});
    CHECK(jacobian_det(P(r, "x"), P(r, "y"), "x", "y") == Poly::one(r));
    CHECK(jacobian_det(P(r, "y"), P(r, "x"), "x", "y") == P(r, "-1"));
    CHECK(jacobian_det(P(r, "x"), P(r, "y + x^2"), "x", "y") == Poly::one(r));

    std::mt19937 rng(777);
    for (int i = 0; i < 20; ++i) {
        // F = (x, y + p(x)), G = affine
        Poly px = rand_poly(rng, r, 3, 3);
        // restrict p to x only
        Poly p_only_x(r);
        for (const auto& [e, c] : px.terms()) {
            Exponents ne = e;
            ne[1] = 0;
            p_only_x.add_term(ne, c);
        }
        const Poly F1 = P(r, "x"), F2 = P(r, "y") + p_only_x;
        const Poly G1 = P(r, "2*x + 3*y + 1"), G2 = P(r, "x + 2*y - 4");
        std::map<std::string, Poly> g_map{{"x", G1}, {"y", G2}};
        const Poly comp1 = substitute(F1, g_map), comp2 = substitute(F2, g_map);
        const Poly lhs = jacobian_det(comp1, comp2, "x", "y");
        const Poly rhs = substitute(jacobian_det(F1, F2, "x", "y"), g_map) *
                         jacobian_det(G1, G2, "x", "y");
        CHECK(lhs == rhs);
    }
}

TEST_CASE("degree data") {
    auto rt = ring_q({"t"});
    const auto d1 = degree_data_in_var(P(rt, "t*(t+1)^2"), "t");
    CHECK(d1.degree == Degree::of(3));
    CHECK(d1.leading == Poly::one(rt));

    auto r = ring_q({"t", "x", "y"});
    const auto d2 = degree_data_in_var(P(r, "t*y - x^2 + x"), "y");
    CHECK(d2.degree == Degree::of(1));
    CHECK(d2.leading == P(r, "t"));

    const auto d0 = degree_data_total(Poly::zero(r));
    CHECK(d0.degree.is_minus_infinity());
    CHECK(Degree::minus_infinity() < Degree::of(-100));

    const auto d3 = degree_data_total(P(r, "t*y - x^2 + x"));
    CHECK(d3.degree == Degree::of(2));
    CHECK(d3.leading == P(r, "t*y - x^2"));
}

TEST_CASE("ring axioms on random polynomials") {
    std::mt19937 rng(31337);
    for (const auto& r : {ring_q({"x", "y", "z"}), ring_fp(5, {"x", "y", "z"})}) {
        for (int i = 0; i < 25; ++i) {
            const Poly f = rand_poly(rng, r), g = rand_poly(rng, r), h = rand_poly(rng, r);
            CHECK(f + g == g + f);
            CHECK(f * g == g * f);
            CHECK((f + g) + h == f + (g + h));
            CHECK((f * g) * h == f * (g * h));
            CHECK(f * (g + h) == f * g + f * h);
        }
    }
}

TEST_CASE("matrix2 determinant") {
    auto r = ring_q({"t", "u", "x", "y"});
    Matrix2 m{P(r, "x"), P(r, "t"), P(r, "u"), P(r, "y")};
    CHECK(m.det() == P(r, "x*y - t*u"));
    const Matrix2 id = Matrix2::identity(r);
    const Matrix2 prod = m.mul(id);
    CHECK(prod.a == m.a);
    CHECK(prod.det() == m.det());
}

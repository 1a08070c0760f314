#include "doctest.h"

#include <random>

#include "qem/field.hpp"

using namespace qem;

namespace {

FieldValue qv(long num, long den = 1) {
    return FieldValue::from_mpq(FieldDescriptor::rationals(), mpq_class(num, den));
}

} // namespace

TEST_CASE("field descriptors") {
    auto q = FieldDescriptor::rationals();
    CHECK(q->kind() == FieldKind::Rationals);
    CHECK(q->characteristic() == 0);
    CHECK(q->name() == "Q");

    auto f7 = FieldDescriptor::prime_field(7);
    CHECK(f7->characteristic() == 7);
    CHECK(f7->name() == "F_7");
    CHECK_THROWS_AS(FieldDescriptor::prime_field(1), UnsupportedField);
    CHECK_THROWS_AS(FieldDescriptor::prime_field(4), UnsupportedField);
    CHECK_THROWS_AS(FieldDescriptor::prime_field(91), UnsupportedField); // 7*13
    CHECK(FieldDescriptor::prime_field(2147483647)->modulus() == 2147483647u);

    auto qt = FieldDescriptor::rational_functions(q, "t");
    CHECK(qt->characteristic() == 0);
    CHECK(qt->name() == "Q(t)");
    CHECK(qt->nesting_depth() == 1);
    auto qts = FieldDescriptor::rational_functions(qt, "s");
    CHECK(qts->nesting_depth() == 2);
    CHECK_THROWS_AS(FieldDescriptor::rational_functions(qts, "w"), UnsupportedField);
    CHECK_THROWS_AS(FieldDescriptor::rational_functions(qt, "t"), UnsupportedField);

    CHECK(qt->same(*FieldDescriptor::rational_functions(FieldDescriptor::rationals(), "t")));
    CHECK(!qt->same(*qts));
    CHECK(!q->same(*f7));
}

TEST_CASE("rational canonical forms") {
    CHECK(FieldValue::from_mpq(FieldDescriptor::rationals(), mpq_class(2, 4)).str() == "1/2");
    CHECK(qv(-6, 4).str() == "-3/2");
    CHECK(qv(3, -9).str() == "-1/3");
    CHECK(qv(0, 5).is_zero());
    CHECK((qv(1, 2) + qv(1, 3)) == qv(5, 6));
    CHECK((qv(1, 2) * qv(2, 3)) == qv(1, 3));
    CHECK(qv(7, 3).inverse() == qv(3, 7));
    CHECK(qv(-2).pow(5) == qv(-32));
    CHECK(qv(2).pow(-2) == qv(1, 4));
    CHECK_THROWS_AS(qv(0).inverse(), CoefficientError);
}

TEST_CASE("prime field canonical forms") {
    auto f5 = FieldDescriptor::prime_field(5);
    const auto a = FieldValue::from_integer(f5, 7);
    CHECK(a.residue() == 2);
    CHECK(FieldValue::from_integer(f5, -1).residue() == 4);
    CHECK(FieldValue::from_integer(f5, 5).is_zero());
    for (long x = 1; x < 5; ++x) {
        const auto v = FieldValue::from_integer(f5, x);
        CHECK((v * v.inverse()).is_one());
    }
    // residue arithmetic near the 2^31 cap stays exact
    auto big = FieldDescriptor::prime_field(2147483647);
    const auto u = FieldValue::from_integer(big, 2147483646); // = -1
    CHECK((u * u).is_one());
}

TEST_CASE("rational function field canonical forms") {
    auto qt = FieldDescriptor::rational_functions(FieldDescriptor::rationals(), "t");
    const auto t = FieldValue::parameter(qt);
    const auto one = FieldValue::one(qt);

    // (t^2 - 1)/(t - 1) reduces to t + 1
    const auto r = (t * t - one) / (t - one);
    CHECK(r == t + one);
    CHECK(r.str() == "t + 1");

    // denominators are monic: 1/(2t) = (1/2)/t
    const auto half_over_t = one / (t + t);
    CHECK(half_over_t.fraction().den.size() == 2);
    CHECK(half_over_t.fraction().den.back().is_one());
    CHECK(half_over_t.str() == "(1/2)/(t)");

    CHECK((t / t).is_one());
    CHECK((t - t).is_zero());
    CHECK(t.pow(3).str() == "t^3");
    CHECK_THROWS_AS((t - t).inverse(), CoefficientError);

    // nested field: F_3(T)(s)
    auto f3T = FieldDescriptor::rational_functions(FieldDescriptor::prime_field(3), "T");
    auto f3Ts = FieldDescriptor::rational_functions(f3T, "s");
    const auto s = FieldValue::parameter(f3Ts);
    const auto T = FieldValue::parameter_by_name(f3Ts, "T");
    const auto v = (s + T).pow(3);
    // char 3 Frobenius: (s + T)^3 = s^3 + T^3
    CHECK(v == s.pow(3) + T.pow(3));
}

TEST_CASE("field axioms on random samples") {
    std::mt19937 rng(20240817);
    auto q = FieldDescriptor::rationals();
    auto f7 = FieldDescriptor::prime_field(7);
    auto qt = FieldDescriptor::rational_functions(q, "t");

    for (const auto& k : {q, f7}) {
        for (int i = 0; i < 200; ++i) {
            const auto a = FieldValue::from_integer(k, long(rng() % 19) - 9);
            const auto b = FieldValue::from_integer(k, long(rng() % 19) - 9);
            const auto c = FieldValue::from_integer(k, long(rng() % 19) - 9);
            CHECK((a + b) * c == a * c + b * c);
            CHECK(a + b == b + a);
            CHECK((a + b) + c == a + (b + c));
            CHECK((a * b) * c == a * (b * c));
            if (!b.is_zero()) CHECK(a / b * b == a);
        }
    }

    // function-field sample checks with polynomial entries
    const auto t = FieldValue::parameter(qt);
    for (int i = 0; i < 50; ++i) {
        auto mk = [&] {
            FieldValue v = FieldValue::from_integer(qt, long(rng() % 7) - 3);
            v = v + t * FieldValue::from_integer(qt, long(rng() % 7) - 3);
            if (rng() % 2) v = v + t * t;
            return v;
        };
        const auto a = mk(), b = mk(), c = mk();
        CHECK((a + b) * c == a * c + b * c);
        CHECK((a - b) + b == a);
        if (!b.is_zero()) CHECK(a / b * b == a);
    }
}

TEST_CASE("univariate helpers") {
    auto q = FieldDescriptor::rationals();
    const auto one = FieldValue::one(q);
    // a = t^2 - 1, b = t - 1 over Q
    UniPoly a = {-one, FieldValue::zero(q), one};
    UniPoly b = {-one, one};
    UniPoly quot, rem;
    uni::divmod(a, b, quot, rem);
    CHECK(uni::is_zero(rem));
    CHECK(quot == UniPoly{one, one});
    CHECK(uni::gcd(a, b) == UniPoly{-one, one});
}

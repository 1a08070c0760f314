#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "qem/embeddings.hpp"
#include "qem/equivalence.hpp"
#include "qem/errors.hpp"
#include "test_util.hpp"

using namespace qem;
using namespace qemtest;

namespace {

// ---------------------------------------------------------------------------
// Independent oracle for the curve functional equation over a prime field.
// Coefficient vectors and plain integer arithmetic only: no Poly, no
// FieldValue, so agreement with nu_equiv is a genuine cross-check.
// ---------------------------------------------------------------------------

using Coeffs = std::vector<std::uint64_t>;

Coeffs oracle_compose(const Coeffs& q, std::uint64_t lam, std::uint64_t mu,
                      std::uint64_t p) {
    Coeffs out(q.size(), 0);
    Coeffs pw{1 % p}; // (lam t + mu)^e, starting with e = 0
    for (std::size_t e = 0; e < q.size(); ++e) {
        if (e) {
            Coeffs next(e + 1, 0);
            for (std::size_t i = 0; i < pw.size(); ++i) {
                next[i] = (next[i] + pw[i] * mu) % p;
                next[i + 1] = (next[i + 1] + pw[i] * lam) % p;
            }
            pw = std::move(next);
        }
        if (q[e] == 0) continue;
        for (std::size_t i = 0; i < pw.size(); ++i)
            out[i] = (out[i] + q[e] * pw[i]) % p;
    }
    for (auto& c : out) c = (c * lam) % p;
    return out;
}

using WitnessSet = std::set<std::pair<std::uint64_t, std::uint64_t>>;

WitnessSet oracle_witnesses(const Coeffs& pc, const Coeffs& qc, std::uint64_t p) {
    WitnessSet ws;
    for (std::uint64_t lam = 1; lam < p; ++lam)
        for (std::uint64_t mu = 0; mu < p; ++mu)
            if (oracle_compose(qc, lam, mu, p) == pc) ws.emplace(lam, mu);
    return ws;
}

Poly poly_from_coeffs(const RingPtr& r, const Coeffs& c) {
    Poly f = Poly::zero(r);
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0)
            f.add_term({static_cast<std::uint32_t>(i)},
                       FieldValue::from_integer(r->field(), static_cast<long>(c[i])));
    return f;
}

WitnessSet verdict_witnesses(const EquivalenceVerdict& v) {
    WitnessSet ws;
    for (const EquivWitness& w : v.witnesses)
        ws.emplace(w.values.at("lambda").residue(), w.values.at("mu").residue());
    return ws;
}

FieldValue fv(const FieldPtr& k, long n) { return FieldValue::from_integer(k, n); }

EmbeddingSpec matrix_spec(const RingPtr& src, const Poly& f12, const Poly& f21,
                          const Poly& f11, const Poly& f22) {
    const FieldPtr& k = src->field();
    const RingPtr amb = Ring::make(k, {"t", "u", "x", "y"});
    EmbeddingSpec spec{Family::RhoLambda, {}, src, amb, {}, {f12, f21, f11, f22}, {}};
    spec.ambient_relation = Poly::variable(amb, "x") * Poly::variable(amb, "y") -
                            Poly::variable(amb, "t") * Poly::variable(amb, "u") -
                            Poly::one(amb);
    return spec;
}

} // namespace

TEST_CASE("nu_equiv agrees with the exhaustive oracle over small prime fields") {
    for (const std::uint32_t p : {3u, 5u}) {
        const RingPtr r = ring_fp(p, {"t"});
        std::mt19937 rng(1000 + p);
        int equivalent_seen = 0;
        for (int trial = 0; trial < 30; ++trial) {
            Coeffs pc(5, 0), qc(5, 0);
            for (auto& c : pc) c = rng() % p;
            for (auto& c : qc) c = rng() % p;
            const Poly pp = poly_from_coeffs(r, pc);
            const Poly qp = poly_from_coeffs(r, qc);
            const WitnessSet expected = oracle_witnesses(pc, qc, p);
            const EquivalenceVerdict v = nu_equiv(pp, qp);
            CHECK(v.equivalent() == !expected.empty());
            if (!pp.is_zero() && !qp.is_zero() && v.equivalent()) {
                CHECK(verdict_witnesses(v) == expected);
                ++equivalent_seen;
            }
        }
        // Forced-equivalent pairs: p is produced by the oracle itself, so
        // nu_equiv must rediscover the planted witness.
        for (int trial = 0; trial < 10; ++trial) {
            Coeffs qc(5, 0);
            for (auto& c : qc) c = rng() % p;
            const std::uint64_t lam = 1 + rng() % (p - 1);
            const std::uint64_t mu = rng() % p;
            const Coeffs pc = oracle_compose(qc, lam, mu, p);
            const Poly pp = poly_from_coeffs(r, pc);
            const Poly qp = poly_from_coeffs(r, qc);
            const EquivalenceVerdict v = nu_equiv(pp, qp);
            REQUIRE(v.equivalent());
            if (!qp.is_zero()) {
                const WitnessSet found = verdict_witnesses(v);
                CHECK(found.count({lam, mu}) == 1);
                CHECK(found == oracle_witnesses(pc, qc, p));
                ++equivalent_seen;
            }
        }
        CHECK(equivalent_seen >= 10);
    }
}

TEST_CASE("nu_equiv over the rationals extracts exact witnesses") {
    const RingPtr r = ring_q({"t"});
    const FieldPtr k = r->field();

    SUBCASE("identical curve of degree 6 has exactly the identity witness") {
        const Poly p = P(r, "t*(t+1)^2*(t+2)^3");
        const EquivalenceVerdict v = nu_equiv(p, p);
        REQUIRE(v.equivalent());
        REQUIRE(v.witnesses.size() == 1);
        CHECK(v.witnesses[0].values.at("lambda") == fv(k, 1));
        CHECK(v.witnesses[0].values.at("mu") == fv(k, 0));
        CHECK(v.flags.empty());
    }
    SUBCASE("scaled curve: 16 t^3 = lambda (lambda t)^3 for lambda = +-2") {
        const EquivalenceVerdict v = nu_equiv(P(r, "16*t^3"), P(r, "t^3"));
        REQUIRE(v.equivalent());
        REQUIRE(v.witnesses.size() == 2);
        const auto& l0 = v.witnesses[0].values.at("lambda");
        const auto& l1 = v.witnesses[1].values.at("lambda");
        CHECK(((l0 == fv(k, 2) && l1 == fv(k, -2)) ||
               (l0 == fv(k, -2) && l1 == fv(k, 2))));
        CHECK(v.witnesses[0].values.at("mu") == fv(k, 0));
        CHECK(v.witnesses[1].values.at("mu") == fv(k, 0));
    }
    SUBCASE("shifted curve finds both sign witnesses") {
        const EquivalenceVerdict v = nu_equiv(P(r, "(t+1)^3"), P(r, "t^3"));
        REQUIRE(v.equivalent());
        REQUIRE(v.witnesses.size() == 2);
        WitnessSet seen;
        for (const auto& w : v.witnesses) {
            const bool plus = w.values.at("lambda") == fv(k, 1) &&
                              w.values.at("mu") == fv(k, 1);
            const bool minus = w.values.at("lambda") == fv(k, -1) &&
                               w.values.at("mu") == fv(k, -1);
            CHECK((plus || minus));
        }
    }
    SUBCASE("t^3 against -t^3 needs lambda^4 = -1: no rational witness") {
        const EquivalenceVerdict v = nu_equiv(P(r, "t^3"), P(r, "-t^3"));
        CHECK(v.outcome == Outcome::NotEquivalent);
        CHECK(v.obstruction_kind == "no-witness");
        REQUIRE(!v.obstruction_data.empty());
        CHECK(v.obstruction_data[0].find("no rational solution") != std::string::npos);
    }
    SUBCASE("same-degree curves with mismatched roots are rejected by expansion") {
        const EquivalenceVerdict v = nu_equiv(P(r, "t*(t+1)^2"), P(r, "t*(t+2)^2"));
        CHECK(v.outcome == Outcome::NotEquivalent);
        CHECK(v.obstruction_kind == "no-witness");
    }
    SUBCASE("degree mismatch is a structured obstruction") {
        const EquivalenceVerdict v = nu_equiv(P(r, "t^3"), P(r, "t^2"));
        CHECK(v.outcome == Outcome::NotEquivalent);
        CHECK(v.obstruction_kind == "degree-mismatch");
        CHECK(v.obstruction_data.size() == 2);
    }
    SUBCASE("zero pair and constant pair are answered but flagged") {
        const EquivalenceVerdict z = nu_equiv(Poly::zero(r), Poly::zero(r));
        REQUIRE(z.equivalent());
        REQUIRE(!z.flags.empty());

        const EquivalenceVerdict c = nu_equiv(P(r, "3"), P(r, "6"));
        REQUIRE(c.equivalent());
        REQUIRE(c.witnesses.size() == 1);
        CHECK(c.witnesses[0].values.at("lambda") ==
              FieldValue::from_mpq(k, mpq_class(1, 2)));
        bool mu_flagged = false;
        for (const auto& f : c.flags)
            if (f.find("mu is arbitrary") != std::string::npos) mu_flagged = true;
        CHECK(mu_flagged);
    }
    SUBCASE("degrees below 3 carry the rigidity flag") {
        const EquivalenceVerdict v = nu_equiv(P(r, "t^2"), P(r, "t^2"));
        REQUIRE(v.equivalent());
        bool flagged = false;
        for (const auto& f : v.flags)
            if (f.find("degree below 3") != std::string::npos) flagged = true;
        CHECK(flagged);
    }
}

TEST_CASE("nu_equiv field dispatch") {
    SUBCASE("F_5: t^3 against itself has the four diagonal witnesses") {
        const RingPtr r = ring_fp(5, {"t"});
        const EquivalenceVerdict v = nu_equiv(P(r, "t^3"), P(r, "t^3"));
        REQUIRE(v.equivalent());
        const WitnessSet expected{{1, 0}, {2, 0}, {3, 0}, {4, 0}};
        CHECK(verdict_witnesses(v) == expected);
    }
    SUBCASE("large prime fields are refused, not silently truncated") {
        const RingPtr r = ring_fp(4099, {"t"});
        CHECK_THROWS_AS(nu_equiv(P(r, "t^3"), P(r, "t^3")), BudgetExceeded);
    }
    SUBCASE("rational function coefficients are unsupported") {
        const FieldPtr K =
            FieldDescriptor::rational_functions(FieldDescriptor::rationals(), "T");
        const RingPtr r = Ring::make(K, {"t"});
        const Poly t = Poly::variable(r, "t");
        CHECK_THROWS_AS(nu_equiv(t, t), UnsupportedField);
    }
}

TEST_CASE("nu_extension produces verified quadric automorphisms") {
    const RingPtr r = ring_q({"t"});
    const FieldPtr k = r->field();

    SUBCASE("pure scaling lambda = 2") {
        const NuExtension ext = nu_extension(P(r, "16*t^3"), P(r, "t^3"), fv(k, 2),
                                             fv(k, 0));
        REQUIRE(ext.alpha.size() == 3);
        CHECK(ext.alpha[0].str() == "2*x");
        CHECK(ext.alpha[1].str() == "1/2*y");
        CHECK(ext.alpha[2].str() == "z");
        CHECK(ext.beta.str() == "2*t");
        CHECK(ext.relation_residual.is_zero());
        for (const Poly& res : ext.naturality_residuals) CHECK(res.is_zero());
    }
    SUBCASE("pure translation mu = 1") {
        const NuExtension ext = nu_extension(P(r, "(t+1)^3"), P(r, "t^3"), fv(k, 1),
                                             fv(k, 1));
        CHECK(ext.alpha[0].str() == "x + y + 2*z + 1");
        CHECK(ext.alpha[1].str() == "y");
        CHECK(ext.alpha[2].str() == "y + z");
        CHECK(ext.beta.str() == "t + 1");
    }
    SUBCASE("mixed witness on a degree-4 curve") {
        const Poly q = P(r, "t^4 + t");
        const FieldValue lam = fv(k, 3);
        const FieldValue mu = FieldValue::from_mpq(k, mpq_class(1, 2));
        // Build p = lam q(lam t + mu) through the library, then demand the
        // extension verifier accept it; the identities are checked inside.
        const Poly arg = P(r, "3*t + 1/2");
        const Poly built = substitute(q, {{"t", arg}}).scaled(lam);
        const NuExtension ext = nu_extension(built, q, lam, mu);
        CHECK(ext.relation_residual.is_zero());
        for (const Poly& res : ext.naturality_residuals) CHECK(res.is_zero());
    }
    SUBCASE("characteristic 2 witness") {
        const RingPtr r2 = ring_fp(2, {"t"});
        const FieldPtr k2 = r2->field();
        const NuExtension ext = nu_extension(P(r2, "t^3 + t^2 + t + 1"), P(r2, "t^3"),
                                             fv(k2, 1), fv(k2, 1));
        CHECK(ext.relation_residual.is_zero());
        for (const Poly& res : ext.naturality_residuals) CHECK(res.is_zero());
    }
    SUBCASE("invalid witnesses are rejected up front") {
        CHECK_THROWS_AS(nu_extension(P(r, "t^3"), P(r, "t^3"), fv(k, 2), fv(k, 0)),
                        WitnessInvalid);
        CHECK_THROWS_AS(nu_extension(P(r, "t^3"), P(r, "t^3"), fv(k, 0), fv(k, 0)),
                        ParameterConstraintViolated);
    }
}

TEST_CASE("pr_equiv replays the two factor pairings") {
    const RingPtr r = ring_q({"t"});

    SUBCASE("equal parameters give both witnesses") {
        const EquivalenceVerdict v = pr_equiv(P(r, "t"), P(r, "t"));
        REQUIRE(v.equivalent());
        REQUIRE(v.witnesses.size() == 2);
        CHECK(v.witnesses[0].polys.at("tau").is_zero());
        CHECK(v.witnesses[1].polys.at("tau") == P(r, "t^3 + t + 1"));
    }
    SUBCASE("distinct parameters are inequivalent with the difference recorded") {
        const EquivalenceVerdict v = pr_equiv(P(r, "t"), P(r, "t + 1"));
        CHECK(v.outcome == Outcome::NotEquivalent);
        CHECK(v.obstruction_kind == "coefficient-mismatch");
        REQUIRE(!v.obstruction_data.empty());
        CHECK(v.obstruction_data[0].find("-1") != std::string::npos);
    }
    SUBCASE("random corpus agrees with syntactic comparison") {
        std::mt19937 rng(77);
        for (int trial = 0; trial < 60; ++trial) {
            const Poly a = rand_poly(rng, r, 3, 4);
            const Poly b = (trial % 3 == 0) ? a : rand_poly(rng, r, 3, 4);
            CHECK(pr_equiv(a, b).equivalent() == (a == b));
        }
        const RingPtr r5 = ring_fp(5, {"t"});
        for (int trial = 0; trial < 40; ++trial) {
            const Poly a = rand_poly(rng, r5, 3, 4);
            const Poly b = (trial % 3 == 0) ? a : rand_poly(rng, r5, 3, 4);
            CHECK(pr_equiv(a, b).equivalent() == (a == b));
        }
    }
}

TEST_CASE("tame words: images, Jacobians, elementary rewriting") {
    const RingPtr r = ring_q({"x", "y"});
    const FieldPtr k = r->field();
    const Poly x = Poly::variable(r, "x");
    const Poly y = Poly::variable(r, "y");

    SUBCASE("empty word is the identity") {
        const AutomorphismWord w{r, {}};
        const PlanePair im = word_images(w);
        CHECK(im.first == x);
        CHECK(im.second == y);
        CHECK(word_jacobian(w) == fv(k, 1));
    }
    SUBCASE("factor validation") {
        CHECK_THROWS_AS(AutoFactor::diagonal(FieldValue::zero(k)),
                        ParameterConstraintViolated);
        CHECK_THROWS_AS(AutoFactor::affine_linear(fv(k, 1), fv(k, 2), fv(k, 2),
                                                  fv(k, 4)),
                        ParameterConstraintViolated);
        CHECK_THROWS_AS(AutoFactor::triangular(P(r, "x*y")),
                        ParameterConstraintViolated);
    }
    SUBCASE("triangular shear decomposes to itself") {
        const AutomorphismWord w = tame_decompose(x, y + x * x);
        REQUIRE(w.factors.size() == 1);
        CHECK(w.factors[0].kind == FactorKind::Triangular);
        CHECK(word_jacobian(w) == fv(k, 1));
    }
    SUBCASE("swapped shear and a two-step composite decompose and recompose") {
        for (const auto& pair :
             {std::pair<Poly, Poly>{y + x * x, x},
              std::pair<Poly, Poly>{x + y * y, y + (x + y * y) * (x + y * y)},
              std::pair<Poly, Poly>{P(r, "2*x + 3"), P(r, "1/2*y + x^2 - 1")}}) {
            const AutomorphismWord w = tame_decompose(pair.first, pair.second);
            const PlanePair im = word_images(w);
            CHECK(im.first == pair.first);
            CHECK(im.second == pair.second);
        }
    }
    SUBCASE("non-automorphisms fail with the stuck pair reported") {
        CHECK_THROWS_AS(tame_decompose(x, x * y), DecompositionFailed);
        CHECK_THROWS_AS(tame_decompose(x * x, y), DecompositionFailed);
        CHECK_THROWS_AS(tame_decompose(x + y, x + y + Poly::one(r)),
                        DecompositionFailed);
    }
    SUBCASE("random words round-trip with their Jacobians") {
        std::mt19937 rng(5150);
        const auto random_factor = [&]() -> AutoFactor {
            switch (rng() % 5) {
            case 0: return AutoFactor::swap();
            case 1: {
                Poly p = Poly::zero(r);
                const unsigned deg = 1 + rng() % 3;
                for (unsigned e = 0; e <= deg; ++e)
                    p = p + Poly::monomial(r, {e, 0},
                                           fv(k, long(rng() % 5) - 2));
                if (p.is_zero()) p = x * x;
                return AutoFactor::triangular(p);
            }
            case 2: return AutoFactor::diagonal(fv(k, 1 + long(rng() % 3)));
            case 3:
                return AutoFactor::translation(fv(k, long(rng() % 7) - 3),
                                               fv(k, long(rng() % 7) - 3));
            default: {
                long a = long(rng() % 5) - 2, b = long(rng() % 5) - 2;
                long c = long(rng() % 5) - 2, d = long(rng() % 5) - 2;
                if (a * d - b * c == 0) { a = 1; b = 0; c = 1; d = 1; }
                return AutoFactor::affine_linear(fv(k, a), fv(k, b), fv(k, c),
                                                 fv(k, d));
            }
            }
        };
        for (int trial = 0; trial < 25; ++trial) {
            AutomorphismWord w{r, {}};
            const unsigned len = 1 + rng() % 6;
            for (unsigned i = 0; i < len; ++i) w.factors.push_back(random_factor());
            const PlanePair im = word_images(w);
            const AutomorphismWord back = tame_decompose(im.first, im.second);
            const PlanePair im2 = word_images(back);
            CHECK(im2.first == im.first);
            CHECK(im2.second == im.second);
            CHECK(word_jacobian(back) == word_jacobian(w));
            // The word Jacobian equals the Jacobian determinant of the map.
            const Poly jac = jacobian_det(im.first, im.second, "x", "y");
            REQUIRE(jac.is_constant());
            CHECK(jac.as_constant() == word_jacobian(w));
        }
    }
    SUBCASE("elementary rewriting eliminates linear factors") {
        AutomorphismWord w{r, {}};
        w.factors.push_back(AutoFactor::diagonal(fv(k, 3)));
        w.factors.push_back(AutoFactor::translation(fv(k, 1), fv(k, -2)));
        w.factors.push_back(AutoFactor::triangular(P(r, "x^2 - x")));
        w.factors.push_back(AutoFactor::affine_linear(fv(k, 2), fv(k, 1), fv(k, 1),
                                                      fv(k, 1))); // det 1
        const AutomorphismWord e = rewrite_to_elementary(w);
        for (const AutoFactor& f : e.factors) {
            const bool elementary = f.kind == FactorKind::Swap ||
                                    f.kind == FactorKind::Triangular;
            CHECK(elementary);
        }
        const PlanePair a = word_images(w);
        const PlanePair b = word_images(e);
        CHECK(a.first == b.first);
        CHECK(a.second == b.second);
    }
    SUBCASE("elementary rewriting refuses determinants outside +-1") {
        AutomorphismWord w{r, {}};
        w.factors.push_back(AutoFactor::affine_linear(fv(k, 2), fv(k, 0), fv(k, 0),
                                                      fv(k, 1))); // det 2
        CHECK_THROWS_AS(rewrite_to_elementary(w), Error);
    }
}

TEST_CASE("jac_extension_decide lifts Jacobian +-1 maps to the group surface") {
    const RingPtr r = ring_q({"x", "y"});
    const FieldPtr k = r->field();
    const Poly x = Poly::variable(r, "x");
    const Poly y = Poly::variable(r, "y");

    SUBCASE("coordinate swap lifts to the corner exchange") {
        const ExtensionDecision d = jac_extension_decide(y, x);
        REQUIRE(d.outcome == ExtensionOutcome::Extends);
        REQUIRE(d.lift.has_value());
        const RingPtr S = d.lift->ring;
        CHECK(d.lift->images.at("x") == Poly::variable(S, "y"));
        CHECK(d.lift->images.at("y") == Poly::variable(S, "x"));
        CHECK(d.lift->images.at("t") == Poly::variable(S, "t"));
        CHECK(d.lift->images.at("u") == Poly::variable(S, "u"));
    }
    SUBCASE("shear lifts to left multiplication by a unipotent matrix") {
        const ExtensionDecision d = jac_extension_decide(x, y + x * x);
        REQUIRE(d.outcome == ExtensionOutcome::Extends);
        const RingPtr S = d.lift->ring;
        const Poly st = Poly::variable(S, "t");
        const Poly su = Poly::variable(S, "u");
        const Poly sx = Poly::variable(S, "x");
        const Poly sy = Poly::variable(S, "y");
        CHECK(d.lift->images.at("x") == sx);
        CHECK(d.lift->images.at("t") == st);
        CHECK(d.lift->images.at("u") == sx * sx * sx + su);
        CHECK(d.lift->images.at("y") == st * sx * sx + sy);
    }
    SUBCASE("Jacobian 2 over Q cannot extend") {
        const ExtensionDecision d = jac_extension_decide(x.scaled(fv(k, 2)), y);
        CHECK(d.outcome == ExtensionOutcome::DoesNotExtend);
        CHECK(d.reason.find("+-1") != std::string::npos);
        CHECK(!d.lift.has_value());
    }
    SUBCASE("Jacobian 2 over F_3 is -1 and extends") {
        const RingPtr r3 = ring_fp(3, {"x", "y"});
        const Poly x3 = Poly::variable(r3, "x");
        const Poly y3 = Poly::variable(r3, "y");
        const ExtensionDecision d =
            jac_extension_decide(x3.scaled(fv(r3->field(), 2)), y3);
        CHECK(d.outcome == ExtensionOutcome::Extends);
        CHECK(d.lift.has_value());
    }
    SUBCASE("non-constant Jacobian is not an automorphism") {
        const ExtensionDecision d = jac_extension_decide(x * x, y);
        CHECK(d.outcome == ExtensionOutcome::NotAnAutomorphism);
        CHECK(!d.jacobian.is_constant());
    }
    SUBCASE("composite automorphism lifts with t fixed by triangular factors") {
        const Poly f = x + y * y;
        const ExtensionDecision d = jac_extension_decide(f, y + f * f);
        REQUIRE(d.outcome == ExtensionOutcome::Extends);
        CHECK(d.lift->relation_residual.is_zero());
    }
}

TEST_CASE("normalize_fibred reaches the (1 + s t p, 1 + s t q) normal form") {
    const RingPtr r = ring_q({"s", "t"});
    const FieldPtr k = r->field();
    const Poly s = Poly::variable(r, "s");
    const Poly t = Poly::variable(r, "t");
    const Poly one = Poly::one(r);

    SUBCASE("the standard row is already normal") {
        const FibredNormalization fn = normalize_fibred(one, one + s * t, s);
        CHECK(fn.p.is_zero());
        CHECK(fn.q == one);
        CHECK(fn.word.empty());
        CHECK(fn.a == one);
        CHECK(fn.b == one + s * t);
        CHECK(fn.c == s);
    }
    SUBCASE("the lambda row keeps its scale in q") {
        const FibredNormalization fn =
            normalize_fibred(one, one + (s * t).scaled(fv(k, 2)), s.scaled(fv(k, 2)));
        CHECK(fn.p.is_zero());
        CHECK(fn.q == Poly::from_integer(r, 2));
        CHECK(fn.word.empty());
    }
    SUBCASE("the transposed row lands on (p, q) = (1, 0)") {
        const FibredNormalization fn = normalize_fibred(one + s * t, one, s);
        CHECK(fn.p == one);
        CHECK(fn.q.is_zero());
    }
    SUBCASE("a constant scale is removed by one diagonal move") {
        const Poly a = Poly::from_integer(r, 2);
        const Poly b = (one + s * t).scaled(FieldValue::from_mpq(k, mpq_class(1, 2)));
        const FibredNormalization fn = normalize_fibred(a, b, s);
        REQUIRE(fn.word.size() == 1);
        CHECK(fn.word[0].label == "diagonal scaling");
        CHECK(fn.a == one);
        CHECK(fn.b == one + s * t);
        CHECK(fn.c == s);
    }
    SUBCASE("a t-dependent corner is cleared by the column operation") {
        const Poly a = one + t * t;
        const Poly b = one + s * t;
        const Poly c = s + t + s * t * t;
        const FibredNormalization fn = normalize_fibred(a, b, c);
        REQUIRE(fn.word.size() == 1);
        CHECK(fn.word[0].label == "column operation");
        CHECK(fn.a == one);
        CHECK(fn.b == one + s * t);
        CHECK(fn.c == s);
        CHECK(fn.p.is_zero());
        CHECK(fn.q == one);
    }
    SUBCASE("both p and q may be nonzero units") {
        const Poly a = one + s * t;
        const Poly b = one + s * t;
        const Poly c = s * (Poly::from_integer(r, 2) + s * t);
        const FibredNormalization fn = normalize_fibred(a, b, c);
        CHECK(fn.p == one);
        CHECK(fn.q == one);
    }
    SUBCASE("rows violating the determinant or unit condition are refused") {
        CHECK_THROWS_AS(normalize_fibred(one, one, s), NotUnimodular);
        // p = 1, q = -1 satisfies the determinant identity but p + q = 0.
        const Poly a = one + s * t;
        const Poly b = one - s * t;
        const Poly c = -(s * s * t);
        CHECK_THROWS_AS(normalize_fibred(a, b, c), NormalizationFails);
    }
}

TEST_CASE("small_degree_classify recognizes the lambda family") {
    const FieldPtr k = FieldDescriptor::rationals();

    SUBCASE("rho_lambda classifies to its own lambda") {
        for (const long lam : {1L, 2L, 5L}) {
            Parameters ps;
            ps.values.emplace("lambda", fv(k, lam));
            const EmbeddingSpec spec = construct(k, Family::RhoLambda, ps);
            const RhoClassification rc = small_degree_classify(spec);
            REQUIRE(rc.equivalent);
            CHECK(rc.lambda == fv(k, lam));
            CHECK(rc.ambient_word.empty());
            CHECK(rc.source_word.factors.empty());
            CHECK(rc.residual_word.factors.empty());
        }
    }
    SUBCASE("lambda = -1 is reported as 1 with a flag") {
        Parameters ps;
        ps.values.emplace("lambda", fv(k, -1));
        const RhoClassification rc =
            small_degree_classify(construct(k, Family::RhoLambda, ps));
        REQUIRE(rc.equivalent);
        CHECK(rc.lambda == fv(k, 1));
        REQUIRE(!rc.flags.empty());
        CHECK(rc.flags[0].find("lambda -1") != std::string::npos);
    }
    SUBCASE("precomposition with the source swap flips the sign of lambda") {
        const RingPtr src = Ring::make(k, {"s", "t"});
        const Poly s = Poly::variable(src, "s");
        const Poly t = Poly::variable(src, "t");
        const Poly one = Poly::one(src);
        // rho_2 after (s, t) -> (t, s): matrix (1, s; 2t, 1 + 2ts).
        const EmbeddingSpec spec =
            matrix_spec(src, s, t.scaled(fv(k, 2)), one, one + (t * s).scaled(fv(k, 2)));
        const RhoClassification rc = small_degree_classify(spec);
        REQUIRE(rc.equivalent);
        CHECK(rc.lambda == fv(k, -2)); // the class {+-2}
        // The constant corner finishes directly: the swap shows up in the
        // residual factorization, not as a recorded source move.
        CHECK(rc.source_word.factors.empty());
        CHECK(rc.residual_word.factors.size() == 1);
        CHECK(word_jacobian(rc.residual_word) == fv(k, -2));
    }
    SUBCASE("an affine reparametrization is absorbed into the residual word") {
        const RingPtr src = Ring::make(k, {"s", "t"});
        const Poly s = Poly::variable(src, "s");
        const Poly t = Poly::variable(src, "t");
        const Poly one = Poly::one(src);
        // rho_2 after (s, t) -> (s + 1, t): matrix (1, t; 2s + 2, 1 + 2(s+1)t).
        const Poly f21 = s.scaled(fv(k, 2)) + Poly::from_integer(src, 2);
        const Poly f22 = one + (s * t).scaled(fv(k, 2)) + t.scaled(fv(k, 2));
        const EmbeddingSpec spec = matrix_spec(src, t, f21, one, f22);
        const RhoClassification rc = small_degree_classify(spec);
        REQUIRE(rc.equivalent);
        CHECK(rc.lambda == fv(k, 2));
        CHECK(!rc.residual_word.factors.empty());
        CHECK(word_jacobian(rc.residual_word) == fv(k, 2));
    }
    SUBCASE("the standard embedding classifies over F_2 as well") {
        const FieldPtr k2 = FieldDescriptor::prime_field(2);
        Parameters ps;
        ps.values.emplace("lambda", fv(k2, 1));
        const RhoClassification rc =
            small_degree_classify(construct(k2, Family::RhoLambda, ps));
        REQUIRE(rc.equivalent);
        CHECK(rc.lambda == fv(k2, 1));
    }
    SUBCASE("collinear degree-2 top forms are reduced and classified") {
        const RingPtr src = Ring::make(k, {"s", "t"});
        const Poly s = Poly::variable(src, "s");
        const Poly t = Poly::variable(src, "t");
        const Poly one = Poly::one(src);
        // Built from the standard embedding by relation-preserving moves; all
        // four entries have degree 2 and the corner tops are collinear.
        const Poly f11 = one + s * t;
        const Poly f12 = one + t + s * t;
        const Poly f21 = one + s + s * t;
        const Poly f22 = Poly::from_integer(src, 2) + s + t + s * t;
        const EmbeddingSpec spec = matrix_spec(src, f12, f21, f11, f22);
        const RhoClassification rc = small_degree_classify(spec);
        REQUIRE(rc.equivalent);
        CHECK(rc.lambda == fv(k, 1));
        CHECK(rc.ambient_word.size() >= 2);
    }
}

TEST_CASE("small_degree_classify rejects the non-embedding shapes") {
    const FieldPtr k = FieldDescriptor::rationals();
    const RingPtr src = Ring::make(k, {"s", "t"});
    const Poly s = Poly::variable(src, "s");
    const Poly t = Poly::variable(src, "t");
    const Poly one = Poly::one(src);

    SUBCASE("the both-units fibred row sits outside the degree gate") {
        // Row (1 + s t, 1 + s t, s(2 + s t)) has p = q = 1, but its u entry
        // has degree 3; inside the gate the s^2 t coefficient of the u entry
        // (which the normalization turns into p q) can never become nonzero,
        // so that obstruction only arises for out-of-scope inputs.
        const Poly f11 = one + s * t;
        const Poly f22 = one + s * t;
        const Poly f21 = s * (Poly::from_integer(src, 2) + s * t);
        const EmbeddingSpec spec = matrix_spec(src, t, f21, f11, f22);
        CHECK_THROWS_AS(small_degree_classify(spec), DegreeTooHigh);
    }
    SUBCASE("independent degree-2 tops are rejected by ideal membership") {
        // (x t; u y) = (s^2, s t + 1; s^2 + s t - 1, t^2 + s t + 1).
        const Poly f11 = s * s;
        const Poly f12 = s * t + one;
        const Poly f21 = s * s + s * t - one;
        const Poly f22 = t * t + s * t + one;
        const EmbeddingSpec spec = matrix_spec(src, f12, f21, f11, f22);
        const RhoClassification rc = small_degree_classify(spec);
        CHECK(!rc.equivalent);
        CHECK(rc.obstruction_members.size() == 4);
        CHECK(rc.reason.find("(v1, v2)^2") != std::string::npos);
    }
    SUBCASE("the same rejection after a relation-preserving shuffle") {
        // Previous case pushed through x -> x + t, u -> u + y: the pair
        // normalization now has real work to do.
        const Poly f11 = s * s + s * t + one;
        const Poly f12 = s * t + one;
        const Poly f21 = s * s + (s * t).scaled(fv(k, 2)) + t * t;
        const Poly f22 = t * t + s * t + one;
        const EmbeddingSpec spec = matrix_spec(src, f12, f21, f11, f22);
        const RhoClassification rc = small_degree_classify(spec);
        CHECK(!rc.equivalent);
        CHECK(rc.obstruction_members.size() == 4);
        CHECK(!rc.source_word.factors.empty());
    }
    SUBCASE("the membership rejection also works in characteristic 2") {
        const FieldPtr k2 = FieldDescriptor::prime_field(2);
        const RingPtr s2 = Ring::make(k2, {"s", "t"});
        const Poly ss = Poly::variable(s2, "s");
        const Poly tt = Poly::variable(s2, "t");
        const Poly o = Poly::one(s2);
        const EmbeddingSpec spec = matrix_spec(
            s2, ss * tt + o, ss * ss + ss * tt + o, ss * ss, tt * tt + ss * tt + o);
        const RhoClassification rc = small_degree_classify(spec);
        CHECK(!rc.equivalent);
        CHECK(rc.obstruction_members.size() == 4);
    }
    SUBCASE("a vanishing entry factors through one coordinate") {
        const EmbeddingSpec spec =
            matrix_spec(src, one, -one, Poly::zero(src), t);
        const RhoClassification rc = small_degree_classify(spec);
        CHECK(!rc.equivalent);
        CHECK(rc.reason.find("factors through") != std::string::npos);
    }
    SUBCASE("degree 3 components are out of scope") {
        const Poly f21 = s + t * t;
        const EmbeddingSpec spec =
            matrix_spec(src, t, f21, one, one + f21 * t);
        CHECK_THROWS_AS(small_degree_classify(spec), DegreeTooHigh);
    }
}

TEST_CASE("make_sl2_auto validates images") {
    const FieldPtr k = FieldDescriptor::rationals();
    const RingPtr S = Ring::make(k, {"t", "u", "x", "y"});
    const Poly st = Poly::variable(S, "t");
    const Poly su = Poly::variable(S, "u");
    const Poly sx = Poly::variable(S, "x");
    const Poly sy = Poly::variable(S, "y");

    const SL2AutoSpec ok = make_sl2_auto(
        {{"t", st}, {"u", su}, {"x", sy}, {"y", sx}}, "corner exchange");
    CHECK(ok.relation_residual.is_zero());

    CHECK_THROWS_AS(make_sl2_auto({{"t", st}, {"u", su}, {"x", sx}}, "incomplete"),
                    MissingImage);
    CHECK_THROWS_AS(make_sl2_auto({{"t", st},
                                   {"u", su},
                                   {"x", sx + Poly::one(S)},
                                   {"y", sy}},
                                  "broken"),
                    IdentityFails);
}

TEST_CASE("certify_variable_kt certifies linear-in-one-coordinate shapes") {
    const RingPtr r = ring_q({"t", "x", "y"});

    SUBCASE("a coordinate is a variable") {
        const VariableWitness w = certify_variable_kt(P(r, "y"));
        REQUIRE(w.is_variable);
        CHECK(w.axis == "y");
        CHECK(w.kt_ring->field()->kind() == FieldKind::RationalFunctions);
        CHECK(w.forward.at("y") == Poly::variable(w.kt_ring, "y"));
    }
    SUBCASE("the surface-family section is a variable over k(t)") {
        const Poly Pp = P(r, "t*y - (x - t)*(x - 1 - t^3)");
        const VariableWitness w = certify_variable_kt(Pp);
        REQUIRE(w.is_variable);
        CHECK(w.axis == "y");
        // Round trip through the returned maps.
        const Poly ax = Poly::variable(w.kt_ring, "y");
        CHECK(substitute(w.forward.at("y"), w.inverse) == ax);
        CHECK(substitute(w.inverse.at("y"), w.forward) == ax);
    }
    SUBCASE("x-linear shapes use the other axis") {
        const VariableWitness w = certify_variable_kt(P(r, "x + t*y^2"));
        REQUIRE(w.is_variable);
        CHECK(w.axis == "x");
    }
    SUBCASE("shapes outside the criterion are inconclusive, not decided") {
        const VariableWitness w1 = certify_variable_kt(P(r, "x^2 + y^2 + t"));
        CHECK(!w1.is_variable);
        CHECK(!w1.reason.empty());
        // (x + 1) y is y-linear, but its y-coefficient involves x.
        const VariableWitness w2 = certify_variable_kt(P(r, "x*y + y"));
        CHECK(!w2.is_variable);
    }
    SUBCASE("wrong ring shape is refused") {
        const RingPtr r2 = ring_q({"x", "y"});
        CHECK_THROWS_AS(certify_variable_kt(P(r2, "y")), RingMismatch);
    }
}

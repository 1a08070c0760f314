#include "qem/checks.hpp"

#include <chrono>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qem/certificates.hpp"
#include "qem/embeddings.hpp"
#include "qem/equivalence.hpp"
#include "qem/errors.hpp"
#include "qem/groebner.hpp"
#include "qem/parser.hpp"
#include "qem/poly.hpp"
#include "qem/quotient.hpp"

namespace qem {

namespace {

Poly var(const RingPtr& ring, const std::string& name) {
    return Poly::variable(ring, name);
}

Poly cst(const RingPtr& ring, long n) { return Poly::from_integer(ring, n); }

FieldValue fv(const FieldPtr& k, long n) { return FieldValue::from_integer(k, n); }

CheckResult pass(std::string detail) { return {true, false, std::move(detail)}; }

CheckResult fail(std::string detail) { return {false, false, std::move(detail)}; }

CheckResult skip(std::string detail) { return {true, true, std::move(detail)}; }

// Dense univariate with coefficients drawn from [-4, 4]; zero draws are kept
// (the polynomial may have gaps or even vanish when force_degree is off).
Poly random_univariate(const RingPtr& ring, const std::string& name,
                       unsigned long max_degree, std::mt19937& rng,
                       bool force_degree = false) {
    const FieldPtr& k = ring->field();
    const Poly x = var(ring, name);
    Poly out = Poly::zero(ring);
    for (unsigned long e = 0; e < max_degree; ++e)
        out = out + x.pow(e).scaled(fv(k, long(rng() % 9) - 4));
    FieldValue lead = fv(k, long(rng() % 9) - 4);
    while (force_degree && lead.is_zero()) lead = fv(k, long(rng() % 9) - 4);
    return out + x.pow(max_degree).scaled(lead);
}

// Small nonzero field elements 1, 2, 3, ... with duplicates (mod p) removed.
std::vector<FieldValue> unit_samples(const FieldPtr& k, std::size_t count) {
    std::vector<FieldValue> units;
    for (long c = 1; units.size() < count && c <= 16; ++c) {
        const FieldValue v = fv(k, c);
        if (v.is_zero()) continue;
        bool present = false;
        for (const auto& u : units) present = present || u == v;
        if (!present) units.push_back(v);
    }
    return units;
}

std::string join_polys(const std::vector<Poly>& polys) {
    std::string out;
    for (const Poly& p : polys) {
        if (!out.empty()) out += ", ";
        out += p.str();
    }
    return "(" + out + ")";
}

// ------------------------------------------------------------------ q2 group

CheckResult check_chart_isomorphism(const FieldPtr& k) {
    const auto report = q2_chart_isomorphism_check(k);
    return pass(std::to_string(report.verified.size()) +
                " cleared identities reduced to zero modulo the quadric ideal");
}

CheckResult check_diagonal_power(const FieldPtr& k) {
    const RingPtr uv = Ring::make(k, {"u", "v"});
    const RingPtr rt = Ring::make(k, {"t"});
    const Poly u = var(uv, "u"), v = var(uv, "v");
    std::mt19937 rng(211);
    for (unsigned long d = 1; d <= 3; ++d) {
        const Poly samples[] = {var(rt, "t"),
                                random_univariate(rt, "t", d, rng, true)};
        for (const Poly& p : samples) {
            const Poly P = homogenize(p, uv, std::uint32_t(d));
            const Poly lhs = u * (u.pow(d + 1) + v * P) - v * (u * P);
            const Poly residual = lhs - u.pow(d + 2);
            if (!residual.is_zero())
                return fail("degree " + std::to_string(d) + ": residual " +
                            residual.str());
        }
    }
    return pass("u*(u^(d+1) + v*P) - v*(u*P) = u^(d+2) for d in {1, 2, 3}");
}

CheckResult check_nu_components_p1(const FieldPtr& k) {
    const RingPtr rt = Ring::make(k, {"t"});
    Parameters ps;
    ps.polys.emplace("p", Poly::one(rt));
    const auto spec = construct(k, Family::NuP, ps);
    const Poly t = var(spec.source, "t");
    const Poly one = Poly::one(spec.source);
    if (spec.components != std::vector<Poly>{t * (one + t), one, t})
        return fail("components " + join_polys(spec.components));
    return pass("components " + join_polys(spec.components));
}

CheckResult check_nu_on_quadric(const FieldPtr& k) {
    const RingPtr rt = Ring::make(k, {"t"});
    std::mt19937 rng(4111);
    for (int i = 0; i < 20; ++i) {
        Parameters ps;
        ps.polys.emplace("p", random_univariate(rt, "t", rng() % 6, rng));
        const auto spec = construct(k, Family::NuP, ps);
        const auto report = verify_on_quadric(spec);
        if (!report.passed())
            return fail("residual " + report.residual.str() + " for p = " +
                        spec.parameters.polys.at("p").str());
    }
    return pass("20 parameter draws; every substituted relation reduced to zero");
}

// ------------------------------------------------------------------ nu group

CheckResult check_curves_pairwise_distinct(const FieldPtr& k) {
    const RingPtr rt = Ring::make(k, {"t"});
    const Poly t = var(rt, "t");
    const Poly t1 = t + Poly::one(rt);
    std::vector<Poly> family;
    for (unsigned long n = 1; n <= 6; ++n)
        family.push_back(t.pow(n) * t1.pow(n + 1));
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const auto verdict = nu_equiv(family[i], family[j]);
            if (verdict.outcome != Outcome::NotEquivalent ||
                verdict.obstruction_kind != "degree-mismatch")
                return fail("parameters " + family[i].str() + " and " +
                            family[j].str() + " were not separated by degree");
            ++pairs;
        }
    }
    return pass(std::to_string(pairs) +
                " pairs rejected by degree (degrees 3, 5, 7, 9, 11, 13)");
}

CheckResult check_unique_witness_multiplicity(const FieldPtr& k) {
    const RingPtr rt = Ring::make(k, {"t"});
    const Poly p = parse_poly("t*(t+1)^2*(t+2)^3", rt);
    const auto verdict = nu_equiv(p, p);
    if (!verdict.equivalent()) return fail("self-equivalence not found");
    if (verdict.witnesses.size() != 1)
        return fail(std::to_string(verdict.witnesses.size()) +
                    " witnesses; expected the identity alone");
    const auto& w = verdict.witnesses.front();
    if (!w.values.at("lambda").is_one() || !w.values.at("mu").is_zero())
        return fail("unexpected witness (" + w.values.at("lambda").str() + ", " +
                    w.values.at("mu").str() + ")");
    return pass("only (lambda, mu) = (1, 0) survives candidate exhaustion");
}

CheckResult check_planted_witness_recovered(const FieldPtr& k) {
    const auto p = k->characteristic();
    if (p > 4096)
        return skip("exhaustive witness enumeration is capped at characteristic 4096");
    const RingPtr rt = Ring::make(k, {"t"});
    const Poly t = var(rt, "t");
    std::mt19937 rng(7020);
    for (int round = 0; round < 8; ++round) {
        const Poly q = random_univariate(rt, "t", 3 + rng() % 2, rng, true);
        FieldValue lambda;
        FieldValue mu;
        if (p == 0) {
            const long nums[] = {1, 2, -1, 3};
            const long dens[] = {1, 2};
            const long num = nums[rng() % 4];
            const long den = dens[rng() % 2];
            mpq_class ratio(num, den);
            ratio.canonicalize();
            lambda = FieldValue::from_mpq(k, ratio);
            mu = fv(k, long(rng() % 5) - 2);
        } else {
            lambda = fv(k, 1 + long(rng() % (p - 1 ? p - 1 : 1)));
            mu = fv(k, long(rng() % p));
        }
        const Poly image = substitute(q, {{"t", t.scaled(lambda) + Poly::constant(rt, mu)}})
                               .scaled(lambda);
        const auto verdict = nu_equiv(image, q);
        if (!verdict.equivalent())
            return fail("planted witness lost for q = " + q.str());
        bool found = false;
        for (const auto& w : verdict.witnesses)
            found = found ||
                    (w.values.at("lambda") == lambda && w.values.at("mu") == mu);
        if (!found)
            return fail("witness (" + lambda.str() + ", " + mu.str() +
                        ") missing for q = " + q.str());
    }
    return pass("8 planted witnesses rediscovered with complete solution sets");
}

CheckResult check_extension_naturality(const FieldPtr& k) {
    const auto p = k->characteristic();
    const RingPtr rt = Ring::make(k, {"t"});
    const Poly t = var(rt, "t");
    std::mt19937 rng(8200);
    for (int round = 0; round < 10; ++round) {
        const Poly q = random_univariate(rt, "t", rng() % 5, rng);
        FieldValue lambda = p == 0 ? fv(k, long(rng() % 7) - 3)
                                   : fv(k, long(rng() % p));
        while (lambda.is_zero()) lambda = lambda + FieldValue::one(k);
        const FieldValue mu = fv(k, long(rng() % 7) - 3);
        const Poly image = substitute(q, {{"t", t.scaled(lambda) + Poly::constant(rt, mu)}})
                               .scaled(lambda);
        const auto ext = nu_extension(image, q, lambda, mu);
        if (!ext.relation_residual.is_zero())
            return fail("quadric relation residual " + ext.relation_residual.str());
        for (const Poly& r : ext.naturality_residuals)
            if (!r.is_zero()) return fail("naturality residual " + r.str());
    }
    return pass("10 witnesses extended; quadric and naturality residuals all zero");
}

// ------------------------------------------------------------------ pr group

CheckResult check_pr_equivalence_iff_equal(const FieldPtr& k) {
    const RingPtr rt = Ring::make(k, {"t"});
    const Poly one = Poly::one(rt);
    const Poly t = var(rt, "t");

    const auto frozen = pr_equiv(one, one + t);
    if (frozen.outcome != Outcome::NotEquivalent)
        return fail("r = 1 and s = 1 + t were not separated");

    std::mt19937 rng(9300);
    for (int round = 0; round < 20; ++round) {
        const Poly r = random_univariate(rt, "t", rng() % 4, rng);
        Poly s = r;
        const bool tweak = (rng() % 2) == 0;
        if (tweak) {
            Poly delta = random_univariate(rt, "t", rng() % 3, rng);
            if (delta.is_zero()) delta = one;
            s = r + delta;
        }
        const auto verdict = pr_equiv(r, s);
        const bool expected = r == s;
        if (verdict.equivalent() != expected)
            return fail("decision for r = " + r.str() + ", s = " + s.str() +
                        " disagrees with the syntactic test");
        if (expected && verdict.witnesses.size() != 2)
            return fail("equal parameters must produce both factor pairings");
    }
    return pass("frozen pair plus 20 random pairs matched the syntactic test");
}

CheckResult check_degenerate_fibre_shape(const FieldPtr& k) {
    const RingPtr r3 = Ring::make(k, {"t", "x", "y"});
    struct Expected {
        const char* text;
        long m;
        long mu;
        long lambda;
    };
    const Expected cases[] = {{"t*y - x^2 + x", 1, -1, 1},
                              {"t^2*y - x^2 - x", 1, -1, -1}};
    for (const auto& c : cases) {
        const Poly P = parse_poly(c.text, r3);
        const auto profile = degenerate_fibre_profile(P);
        if (!profile.of_required_form() || *profile.axis != "x" ||
            profile.m != c.m || !(*profile.mu == fv(k, c.mu)) ||
            !(*profile.lambda == fv(k, c.lambda)))
            return fail("unexpected profile for " + std::string(c.text) +
                        (profile.of_required_form() ? "" : ": " + profile.witness));
        // re-expansion: mu * x^m * (x - lambda) equals P(0, x, y)
        const Poly x = var(r3, "x");
        const Poly rebuilt =
            (x.pow(static_cast<unsigned long>(profile.m)) *
             (x - Poly::constant(r3, *profile.lambda)))
                .scaled(*profile.mu);
        if (rebuilt != P.coefficient_in("t", 0))
            return fail("profile for " + std::string(c.text) +
                        " does not re-expand to the t = 0 fibre");
    }
    return pass("both frozen hypersurfaces factor as mu*x^m*(x - lambda), "
                "re-expanded exactly");
}

CheckResult check_fibres_off_zero_are_lines(const FieldPtr& k) {
    const RingPtr rt = Ring::make(k, {"t"});
    const Poly t = var(rt, "t");
    const std::vector<Poly> rs = {Poly::zero(rt), t, t * t + Poly::one(rt)};
    for (const Poly& r : rs) {
        Parameters ps;
        ps.polys.emplace("r", r);
        const auto spec = construct(k, Family::PrFamily, ps);
        const auto ft = fibre_triviality_check(spec.image_equations.at(0));
        if (!ft.all_fibres_off_zero_are_lines || ft.axis != "y" || ft.n != 1)
            return fail("family member with r = " + r.str() +
                        " did not satisfy the graph criterion");
    }
    const auto pair = construct(k, Family::NonEquivPair, Parameters{});
    const auto ft2 = fibre_triviality_check(pair.image_equations.at(1));
    if (!ft2.all_fibres_off_zero_are_lines || ft2.n != 2)
        return fail("the perturbed hypersurface did not yield c = unit * t^2");
    return pass("three family members have c = t; the perturbed hypersurface "
                "has c = t^2");
}

// ----------------------------------------------------------- surface E group

CheckResult check_membership_chain_link(const FieldPtr& k) {
    const RingPtr sl2 = Ring::make(k, {"t", "u", "x", "y"});
    const Poly f = parse_poly("t*(y^2 - u*x + u) - (x - 1)", sl2);
    const auto basis = IdealBasis::of(
        {parse_poly("x*y - t*u - 1", sl2), parse_poly("t*y - x^2 + x", sl2)});
    const auto membership = ideal_membership(f, basis);
    if (!membership.is_member)
        return fail("remainder " + membership.remainder.str());
    return pass("member; " + std::to_string(membership.cofactors.size()) +
                " cofactors re-expanded to the element");
}

CheckResult check_surface_e_certificate(const FieldPtr& k) {
    const auto spec = construct(k, Family::SurfaceE, Parameters{});
    const auto cert = certify_closed(spec, builtin_certificate(spec));
    if (!cert.verified || cert.kind != CertificateKind::GeneratorChain)
        return fail("certificate did not verify");
    return pass(std::to_string(cert.chain.size()) +
                " chain identities checked by ideal membership");
}

CheckResult check_plane_left_inverse(const FieldPtr& k) {
    const auto cert = final_a4_left_inverse(k);
    if (!cert.verified || cert.witnesses.size() != 2)
        return fail("left inverse did not verify");
    if (cert.witnesses[1].str() != "t")
        return fail("e_t = " + cert.witnesses[1].str());
    const Degree dx = cert.witnesses[0].total_degree();
    if (Degree::of(5) < dx)
        return fail("deg e_x = " + dx.str() + " exceeds the recorded bound 5");
    return pass("e_t = t and deg e_x = " + dx.str() +
                "; substitution recovered both source variables");
}

// --------------------------------------------------------------- charp group

long companion_exponent(unsigned long p) { return p == 2 ? 3 : 2; }

CheckResult check_line_image_equation(const FieldPtr& k) {
    const unsigned long p = k->characteristic();
    if (p > 997) return skip("the unit-pair sweep is run for primes up to 997");
    const long q = companion_exponent(p);
    std::vector<std::pair<long, long>> pairs;
    if (p <= 7) {
        for (long a = 1; a < long(p); ++a)
            for (long b = 1; b < long(p); ++b) pairs.emplace_back(a, b);
    } else {
        for (long i = 0; i < 20; ++i)
            pairs.emplace_back(1 + (7 * i) % long(p - 1), 1 + (11 * i) % long(p - 1));
    }
    for (const auto& [a, b] : pairs) {
        Parameters ps;
        ps.integers["p"] = long(p);
        ps.integers["q"] = q;
        ps.values.emplace("a", fv(k, a));
        ps.values.emplace("b", fv(k, b));
        const auto spec = construct(k, Family::CharPLine, ps);
        std::map<std::string, Poly> images;
        for (std::size_t i = 0; i < spec.components.size(); ++i)
            images.emplace(spec.ambient->vars()[i], spec.components[i]);
        const Poly residual = substitute(spec.image_equations.at(0), images);
        if (!residual.is_zero())
            return fail("residual " + residual.str() + " at (a, b) = (" +
                        std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    return pass(std::to_string(pairs.size()) +
                " unit pairs; the image equation vanished identically each time");
}

CheckResult check_extension_field_witness(const FieldPtr& k) {
    const unsigned long p = k->characteristic();
    if (p > 97) return skip("the extension-field witness is run for primes up to 97");
    const long q = companion_exponent(p);
    std::vector<std::pair<long, long>> pairs = {{1, 1}};
    if (p > 2) {
        pairs.emplace_back(1, 2);
        pairs.emplace_back(2, 1);
    }
    for (const auto& [a, b] : pairs) {
        const auto report = formof_a1_witness(long(p), q, fv(k, a), fv(k, b));
        if (!report.residual.is_zero())
            return fail("residual " + report.residual.str() + " at (a, b) = (" +
                        std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    try {
        formof_a1_witness(long(p), long(2 * p), fv(k, 1), fv(k, 1));
        return fail("a companion exponent divisible by p was accepted");
    } catch (const ParameterConstraintViolated&) {
    }
    return pass(std::to_string(pairs.size()) +
                " parameter pairs verified over the extension field; the "
                "divisible exponent was rejected");
}

CheckResult check_not_variable_inverse(const FieldPtr& k) {
    const unsigned long p = k->characteristic();
    if (p != 2 && p != 3)
        return skip("the two-sided inverse replay is run for p in {2, 3}");
    Parameters ps;
    ps.integers["p"] = long(p);
    ps.integers["q"] = companion_exponent(p);
    const auto spec = construct(k, Family::ExampleNotVarKt, ps);

    // the stored plane inverse: exact identity on the source
    const auto cert = certify_closed(spec, builtin_certificate(spec));
    if (!cert.verified || cert.witnesses.size() != 2)
        return fail("the plane inverse did not verify");

    // the other composition is the identity modulo the hypersurface
    std::map<std::string, Poly> inverse;
    inverse.emplace("s", cert.witnesses[0]);
    inverse.emplace("t", cert.witnesses[1]);
    const auto basis = IdealBasis::of({spec.image_equations.at(0)});
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const Poly back = substitute(spec.components[i], inverse);
        const Poly diff = back - var(spec.ambient, spec.ambient->vars()[i]);
        if (!ideal_membership(diff, basis).is_member)
            return fail("coordinate " + spec.ambient->vars()[i] +
                        " does not return to itself modulo the hypersurface");
    }
    return pass("both compositions are the identity (one exactly, one modulo "
                "the hypersurface)");
}

// ------------------------------------------------------------- shastri group

CheckResult check_cubic_left_inverse(const FieldPtr& k) {
    const auto spec = construct(k, Family::ShastriA3, Parameters{});
    const Poly w = parse_poly("3*z - 12*x - 5*x*y + y*z - x^3", spec.ambient);
    const Poly result = substitute(w, {{"x", spec.components[0]},
                                       {"y", spec.components[1]},
                                       {"z", spec.components[2]}});
    if (result != var(spec.source, "t"))
        return fail("substitution produced " + result.str());
    return pass("substitution returned exactly t");
}

CheckResult check_quartic_identity(const FieldPtr& k) {
    const auto spec = construct(k, Family::ShastriA3, Parameters{});
    const RingPtr rtx = Ring::make(k, {"t", "x"});
    const Poly expr = parse_poly("x^2*(x^2 - 4) - t*(t^2 + 9*t + 24)", rtx);
    const Poly result = substitute(
        expr, {{"x", spec.components[0]}, {"t", spec.components[1]}});
    if (result != cst(spec.source, 16))
        return fail("evaluated to " + result.str());
    return pass("evaluates to the constant 16 along the curve");
}

CheckResult check_shastri_certificate(const FieldPtr& k) {
    const auto spec = construct(k, Family::ShastriA3, Parameters{});
    const auto cert = certify_closed(spec, builtin_certificate(spec));
    if (!cert.verified || cert.kind != CertificateKind::LeftInverse ||
        cert.witnesses.size() != 1)
        return fail("the recorded cubic witness did not verify");
    return pass("recorded witness " + cert.witnesses[0].str() + " re-verified");
}

CheckResult check_group_embedding_determinant(const FieldPtr& k) {
    const auto spec = construct(k, Family::ShastriSL2, Parameters{});
    const auto report = verify_on_quadric(spec);
    if (!report.passed()) return fail("residual " + report.residual.str());
    // the x entry is the plain cubic component of the space curve
    const Poly expected = parse_poly("t^3 - 3*t", spec.source);
    if (spec.components[2] != expected)
        return fail("unexpected x entry " + spec.components[2].str());
    std::string degrees;
    for (const Poly& c : spec.components) {
        if (!degrees.empty()) degrees += ", ";
        degrees += c.total_degree().str();
    }
    return pass("determinant 1 identically; entry degrees (" + degrees + ")");
}

// ----------------------------------------------------------------- sl2 group

CheckResult check_swap_lift(const FieldPtr& k) {
    const RingPtr rxy = Ring::make(k, {"x", "y"});
    const auto decision = jac_extension_decide(var(rxy, "y"), var(rxy, "x"));
    if (decision.outcome != ExtensionOutcome::Extends || !decision.lift)
        return fail("the coordinate swap did not extend");
    const auto& images = decision.lift->images;
    const RingPtr g = decision.lift->ring;
    if (images.at("x") != var(g, "y") || images.at("y") != var(g, "x") ||
        images.at("t") != var(g, "t") || images.at("u") != var(g, "u"))
        return fail("unexpected lift images");
    return pass("lift exchanges the diagonal entries and fixes the rest");
}

CheckResult check_triangular_lift(const FieldPtr& k) {
    const RingPtr rxy = Ring::make(k, {"x", "y"});
    const Poly x = var(rxy, "x"), y = var(rxy, "y");
    const auto decision = jac_extension_decide(x, y + x * x);
    if (decision.outcome != ExtensionOutcome::Extends || !decision.lift)
        return fail("the triangular map did not extend");
    const auto& images = decision.lift->images;
    const RingPtr g = decision.lift->ring;
    const Poly gx = var(g, "x"), gy = var(g, "y"), gt = var(g, "t"),
               gu = var(g, "u");
    if (images.at("t") != gt || images.at("x") != gx ||
        images.at("u") != gx * gx * gx + gu || images.at("y") != gt * gx * gx + gy)
        return fail("unexpected lift images");
    return pass("lift is left multiplication by the unipotent matrix with "
                "entry x^2");
}

CheckResult check_scaling_obstruction(const FieldPtr& k) {
    const RingPtr rxy = Ring::make(k, {"x", "y"});
    const Poly x = var(rxy, "x"), y = var(rxy, "y");
    const auto blocked = jac_extension_decide(x.scaled(fv(k, 2)), y);
    if (blocked.outcome != ExtensionOutcome::DoesNotExtend ||
        blocked.jacobian != cst(rxy, 2))
        return fail("(2x, y) was not rejected with J = 2");
    const auto lifted =
        jac_extension_decide(x.scaled(fv(k, 2)), y.scaled(fv(k, 2).inverse()));
    if (lifted.outcome != ExtensionOutcome::Extends || !lifted.lift)
        return fail("(2x, y/2) did not extend");
    return pass("J = 2 is rejected; the unimodular rescaling (2x, y/2) lifts");
}

CheckResult check_preserved_subring(const FieldPtr& k) {
    const RingPtr r4 = Ring::make(k, {"t", "u", "x", "y"});
    const Poly h = parse_poly("x*y - 1", r4);
    const Poly t = var(r4, "t"), u = var(r4, "u"), x = var(r4, "x"),
               y = var(r4, "y");
    // images of the lifted triangular automorphism (x, y) -> (x, y + x^2)
    const std::map<std::string, Poly> images = {
        {"t", t}, {"u", x * x * x + u}, {"x", x}, {"y", t * x * x + y}};
    const auto report = preserved_subring_check(images, 1, h);
    if (!report.preserved())
        return fail("the lifted triangular automorphism must preserve the "
                    "subring and the ideal");

    // negative control: an image outside k[t,x,y] cannot slip through
    const std::map<std::string, Poly> outside = {
        {"t", t}, {"u", u}, {"x", u}, {"y", y}};
    bool rejected = false;
    try {
        rejected = !preserved_subring_check(outside, 1, h).preserved();
    } catch (const NotWellDefined&) {
        rejected = true;
    }
    if (!rejected) return fail("an image outside k[t,x,y] was reported preserved");
    return pass("subring and ideal carried into themselves; the corrupted "
                "endomorphism is rejected");
}

// ----------------------------------------------------------------- rho group

CheckResult check_rho_frozen_matrix(const FieldPtr& k) {
    Parameters ps;
    ps.values.emplace("lambda", FieldValue::one(k));
    const auto spec = construct(k, Family::RhoLambda, ps);
    const Poly s = var(spec.source, "s"), t = var(spec.source, "t");
    const Poly one = Poly::one(spec.source);
    if (spec.components != std::vector<Poly>{t, s, one, one + s * t})
        return fail("components " + join_polys(spec.components));
    if (!verify_on_quadric(spec).passed())
        return fail("the matrix does not satisfy xy - tu = 1");
    return pass("matrix (1, t; s, 1 + s*t) lies on the group surface");
}

CheckResult check_rho_fibred_normal_form(const FieldPtr& k) {
    const FieldValue lambda = k->characteristic() == 2 ? FieldValue::one(k)
                                                       : fv(k, 2);
    Parameters ps;
    ps.values.emplace("lambda", lambda);
    const auto spec = construct(k, Family::RhoLambda, ps);
    // row entries (a, b, c) = (f11, f22, f21) with a*b - t*c = 1
    const auto nf = normalize_fibred(spec.components[2], spec.components[3],
                                     spec.components[1]);
    if (!nf.p.is_zero() || nf.q != Poly::constant(spec.source, lambda))
        return fail("(p, q) = (" + nf.p.str() + ", " + nf.q.str() + ")");
    return pass("(p, q) = (0, " + lambda.str() + ")");
}

CheckResult check_rho_classification(const FieldPtr& k) {
    const FieldValue zero = FieldValue::zero(k);
    const auto units = unit_samples(k, 3);
    for (const FieldValue& lambda : units) {
        Parameters ps;
        ps.values.emplace("lambda", lambda);
        const auto spec = construct(k, Family::RhoLambda, ps);
        const auto rc = small_degree_classify(spec);
        if (!rc.equivalent ||
            !(rc.lambda == lambda || rc.lambda == zero - lambda))
            return fail("lambda = " + lambda.str() + " classified as " +
                        (rc.equivalent ? rc.lambda.str() : rc.reason));
    }

    // a reparametrized copy (source coordinates exchanged) classifies the same
    const FieldValue lambda = units.back();
    Parameters ps;
    ps.values.emplace("lambda", lambda);
    auto spec = construct(k, Family::RhoLambda, ps);
    const Poly s = var(spec.source, "s"), t = var(spec.source, "t");
    for (Poly& component : spec.components)
        component = substitute(component, {{"s", t}, {"t", s}});
    const auto rc = small_degree_classify(spec);
    if (!rc.equivalent || !(rc.lambda == lambda || rc.lambda == zero - lambda))
        return fail("the reparametrized copy classified as " +
                    (rc.equivalent ? rc.lambda.str() : rc.reason));
    return pass(std::to_string(units.size()) +
                " parameter value(s) plus one reparametrized copy recovered "
                "lambda up to sign");
}

CheckResult check_proper_subring_obstruction(const FieldPtr& k) {
    const RingPtr src = Ring::make(k, {"s", "t"});
    const RingPtr amb = Ring::make(k, {"t", "u", "x", "y"});
    const Poly relation = parse_poly("x*y - t*u - 1", amb);
    // matrix entries (f11, f12; f21, f22) listed in ambient order (t,u,x,y)
    const std::vector<Poly> components = {
        parse_poly("s*t + 1", src), parse_poly("s^2 + s*t - 1", src),
        parse_poly("s^2", src), parse_poly("t^2 + s*t + 1", src)};
    EmbeddingSpec spec{Family::RhoLambda, Parameters{}, src, amb,
                       relation,          components,   {}};
    const auto rc = small_degree_classify(spec);
    if (rc.equivalent) return fail("the obstructed pair was classified equivalent");
    if (rc.obstruction_members.size() != 4)
        return fail(std::to_string(rc.obstruction_members.size()) +
                    " membership certificates; expected 4");
    if (rc.reason.find("(v1, v2)^2") == std::string::npos)
        return fail("unexpected rejection reason: " + rc.reason);
    return pass("rejected; all four shifted components lie in (v1, v2)^2");
}

bool gate_allows(FieldGate gate, const FieldPtr& k) {
    switch (gate) {
    case FieldGate::Any: return true;
    case FieldGate::CharZero: return k->characteristic() == 0;
    case FieldGate::PositiveChar: return k->characteristic() > 0;
    case FieldGate::CharNotTwo: return k->characteristic() != 2;
    }
    return false;
}

std::string gate_description(FieldGate gate) {
    switch (gate) {
    case FieldGate::Any: return "";
    case FieldGate::CharZero: return "needs characteristic 0";
    case FieldGate::PositiveChar: return "needs positive characteristic";
    case FieldGate::CharNotTwo: return "needs characteristic different from 2";
    }
    return "";
}

} // namespace

std::string status_name(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
    }
    return "unknown";
}

const std::vector<CheckInfo>& builtin_checks() {
    static const std::vector<CheckInfo> checks = {
        {"q2.chart-isomorphism",
         "the two chart maps invert the projective parametrization of the "
         "quadric xy = z(z+1), as cleared identities modulo the quadric ideal",
         FieldGate::Any, check_chart_isomorphism},
        {"q2.diagonal-power",
         "the parametrized curve meets the diagonal of P^1 x P^1 exactly "
         "where u^(d+2) vanishes, for sample degrees d in {1, 2, 3}",
         FieldGate::Any, check_diagonal_power},
        {"q2.nu-components-p1",
         "the curve with parameter p = 1 has components (t(1+t), 1, t)",
         FieldGate::Any, check_nu_components_p1},
        {"q2.nu-on-quadric",
         "twenty pseudo-random parameters p of degree at most 5 give "
         "components (t(1+tp), p, tp) satisfying xy - z(z+1) = 0",
         FieldGate::Any, check_nu_on_quadric},
        {"nu.curves-pairwise-distinct",
         "the six curves with parameters t^n (t+1)^(n+1) are pairwise "
         "non-equivalent because their degrees differ",
         FieldGate::Any, check_curves_pairwise_distinct},
        {"nu.unique-witness-multiplicity",
         "t(t+1)^2(t+2)^3 is equivalent to itself only through "
         "(lambda, mu) = (1, 0)",
         FieldGate::CharZero, check_unique_witness_multiplicity},
        {"nu.planted-witness-recovered",
         "a witness planted by composing with t -> lambda t + mu and scaling "
         "is rediscovered by the decider",
         FieldGate::Any, check_planted_witness_recovered},
        {"nu.extension-naturality",
         "curve witnesses extend to quadric automorphisms alpha with "
         "alpha o nu_p = nu_q o beta, verified by expansion",
         FieldGate::Any, check_extension_naturality},
        {"pr.equivalence-iff-equal",
         "inside the family ty - (x-t)(x-1-t^2 r) the two-case matching "
         "decides equivalent exactly when r = s",
         FieldGate::Any, check_pr_equivalence_iff_equal},
        {"pr.degenerate-fibre-shape",
         "the fibre over t = 0 of each frozen hypersurface factors as "
         "mu * x^m * (x - lambda) with the recorded data",
         FieldGate::Any, check_degenerate_fibre_shape},
        {"pr.fibres-off-zero-are-lines",
         "the y coefficient of each family hypersurface is a unit times a "
         "power of t, so every fibre off t = 0 is a graph",
         FieldGate::Any, check_fibres_off_zero_are_lines},
        {"surface-e.membership-chain-link",
         "t(y^2 - ux + u) - (x - 1) lies in the ideal "
         "(xy - tu - 1, ty - x^2 + x)",
         FieldGate::Any, check_membership_chain_link},
        {"surface-e.closedness-certificate",
         "the recorded generator chain certifies the surface "
         "xy - tu = 1, ty = x(x-1) as closed",
         FieldGate::Any, check_surface_e_certificate},
        {"surface-e.plane-left-inverse",
         "the replayed elementary chain produces polynomials recovering x "
         "and t from the simplified four-variable tuple",
         FieldGate::Any, check_plane_left_inverse},
        {"charp.line-image-equation",
         "the image of u -> (u^(p^2), (a u^(pq) + u)/b) satisfies "
         "x + a^(p^2) x^(pq) - b^(p^2) y^(p^2) = 0 for every unit pair (a, b)",
         FieldGate::PositiveChar, check_line_image_equation},
        {"charp.extension-field-witness",
         "over k(T) with t = T^p the witness map lands on the curve "
         "x + a^(p^2) x^(pq) - b^(p^2) y^(p^2) = t",
         FieldGate::PositiveChar, check_extension_field_witness},
        {"charp.not-variable-two-sided-inverse",
         "the plane parametrization of the hypersurface "
         "(x-1) = t^p (y^p - (x-1)^q)^p and its recorded inverse compose to "
         "the identity on both sides",
         FieldGate::PositiveChar, check_not_variable_inverse},
        {"shastri.cubic-left-inverse",
         "3z - 12x - 5xy + yz - x^3 recovers t from the space curve "
         "(t^3-3t, t^4-4t^2-1, t^5-10t)",
         FieldGate::Any, check_cubic_left_inverse},
        {"shastri.quartic-identity",
         "x^2(x^2-4) - t(t^2+9t+24) equals 16 along "
         "(x, t) = (t^3-3t, t^4-4t^2-1)",
         FieldGate::Any, check_quartic_identity},
        {"shastri.closedness-certificate",
         "the recorded cubic witness certifies the space curve embedding "
         "closed",
         FieldGate::Any, check_shastri_certificate},
        {"shastri.group-embedding-determinant",
         "the unipotent-corrected section matrix over the quartic curve has "
         "determinant 1",
         FieldGate::CharNotTwo, check_group_embedding_determinant},
        {"sl2.swap-lift",
         "(x, y) -> (y, x) extends to the group surface by exchanging the "
         "diagonal entries",
         FieldGate::Any, check_swap_lift},
        {"sl2.triangular-lift",
         "(x, y) -> (x, y + x^2) lifts to left multiplication by the "
         "unipotent matrix with entry x^2",
         FieldGate::Any, check_triangular_lift},
        {"sl2.scaling-obstruction",
         "(2x, y) has Jacobian 2 and does not extend, while the unimodular "
         "(2x, y/2) lifts",
         FieldGate::CharZero, check_scaling_obstruction},
        {"sl2.preserved-subring",
         "lifted plane automorphisms preserve the subring k[t,x,y] and the "
         "ideal (t, xy - 1)",
         FieldGate::Any, check_preserved_subring},
        {"rho.frozen-matrix",
         "lambda = 1 gives the matrix (1, t; s, 1 + st) on the group surface",
         FieldGate::Any, check_rho_frozen_matrix},
        {"rho.fibred-normal-form",
         "the row of the lambda family normalizes to (p, q) = (0, lambda)",
         FieldGate::Any, check_rho_fibred_normal_form},
        {"rho.classification-returns-lambda",
         "the small-degree classifier recovers lambda up to sign from the "
         "lambda family and from a reparametrized copy",
         FieldGate::Any, check_rho_classification},
        {"classify.proper-subring-obstruction",
         "a first row (v1^2, v1 v2 + 1) forces all shifted components into "
         "(v1, v2)^2 and the spec is rejected",
         FieldGate::Any, check_proper_subring_obstruction},
    };
    return checks;
}

bool glob_match(const std::string& pattern, const std::string& text) {
    std::size_t p = 0, t = 0;
    std::size_t star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() &&
            (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

SuiteReport run_checks(const std::vector<CheckInfo>& checks, const FieldPtr& k,
                       const std::string& filter) {
    if (!k) throw Error("run_checks needs a coefficient field");
    if (k->kind() == FieldKind::RationalFunctions)
        throw UnsupportedField(
            "the verification suite runs over Q or a prime field");

    SuiteReport report;
    report.filter = filter;
    for (const CheckInfo& info : checks) {
        if (!glob_match(filter, info.name)) continue;
        CheckRecord rec;
        rec.name = info.name;
        rec.claim = info.claim;
        if (!gate_allows(info.gate, k)) {
            rec.status = CheckStatus::Skip;
            rec.detail = gate_description(info.gate);
            ++report.skipped;
            report.records.push_back(std::move(rec));
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            const CheckResult result = info.run(k);
            rec.detail = result.detail;
            if (result.skipped) {
                rec.status = CheckStatus::Skip;
                ++report.skipped;
            } else if (result.passed) {
                rec.status = CheckStatus::Pass;
                ++report.passed;
            } else {
                rec.status = CheckStatus::Fail;
                ++report.failed;
            }
        } catch (const BudgetExceeded& e) {
            rec.status = CheckStatus::Fail;
            rec.detail = e.what();
            ++report.failed;
            report.budget_exhausted = true;
        } catch (const std::exception& e) {
            rec.status = CheckStatus::Fail;
            rec.detail = e.what();
            ++report.failed;
        }
        const auto stop = std::chrono::steady_clock::now();
        rec.milliseconds =
            std::chrono::duration<double, std::milli>(stop - start).count();
        report.records.push_back(std::move(rec));
    }
    return report;
}

SuiteReport run_checks(const FieldPtr& k, const std::string& filter) {
    return run_checks(builtin_checks(), k, filter);
}

} // namespace qem

#include "qem/embeddings.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <utility>

#include "qem/errors.hpp"
#include "qem/groebner.hpp"

namespace qem {

namespace {

const std::array<std::pair<Family, const char*>, 11> kFamilyTags = {{
    {Family::NuP, "nu-p"},
    {Family::RhoLambda, "rho-lambda"},
    {Family::FibredGeneral, "fibred-general"},
    {Family::PrFamily, "pr"},
    {Family::NonEquivPair, "nonequiv-pair"},
    {Family::CharPLine, "charp-line"},
    {Family::CharPHypersurface, "charp-hypersurface"},
    {Family::ExampleNotVarKt, "not-var-kt"},
    {Family::SurfaceE, "surface-e"},
    {Family::ShastriA3, "shastri-a3"},
    {Family::ShastriSL2, "shastri-sl2"},
}};

Poly var(const RingPtr& ring, const std::string& name) {
    return Poly::variable(ring, name);
}

Poly cst(const RingPtr& ring, long n) { return Poly::from_integer(ring, n); }

const Poly& need_poly(const Parameters& params, const std::string& key,
                      Family family) {
    auto it = params.polys.find(key);
    if (it == params.polys.end())
        throw ParameterConstraintViolated("family " + family_tag(family) +
                                          " needs polynomial parameter '" + key + "'");
    return it->second;
}

const FieldValue& need_value(const Parameters& params, const std::string& key,
                             Family family) {
    auto it = params.values.find(key);
    if (it == params.values.end())
        throw ParameterConstraintViolated("family " + family_tag(family) +
                                          " needs field parameter '" + key + "'");
    return it->second;
}

long need_int(const Parameters& params, const std::string& key, Family family) {
    auto it = params.integers.find(key);
    if (it == params.integers.end())
        throw ParameterConstraintViolated("family " + family_tag(family) +
                                          " needs integer parameter '" + key + "'");
    return it->second;
}

void require_poly_over(const Poly& p, const FieldPtr& k,
                       const std::vector<std::string>& vars,
                       const std::string& what) {
    if (!p.ring()->field()->same(*k))
        throw RingMismatch(what + " must be defined over the construction field");
    if (p.ring()->vars() != vars) {
        std::string names;
        for (const auto& v : vars) names += (names.empty() ? "" : ",") + v;
        throw ParameterConstraintViolated(what + " must live in the polynomial ring in (" +
                                          names + ")");
    }
}

void require_value_over(const FieldValue& c, const FieldPtr& k,
                        const std::string& what) {
    if (!c.field() || !c.field()->same(*k))
        throw RingMismatch(what + " must be an element of the construction field");
}

// Exponents are stored as 32-bit values; reject parameter combinations whose
// verification would need larger powers.
unsigned long checked_exponent(unsigned long e, const std::string& what) {
    if (e > std::numeric_limits<std::uint32_t>::max())
        throw ParameterConstraintViolated(what + " exceeds the supported exponent range");
    return e;
}

std::map<std::string, Poly> component_images(const EmbeddingSpec& spec) {
    std::map<std::string, Poly> images;
    const auto& names = spec.ambient->vars();
    for (std::size_t i = 0; i < names.size(); ++i)
        images.emplace(names[i], spec.components[i]);
    return images;
}

// Construction-time checks shared by all morphism families: arity, the
// quadric relation, and every recorded image equation must vanish under the
// components.
void verify_construction(const EmbeddingSpec& spec) {
    if (spec.components.empty()) return;
    if (spec.components.size() != spec.ambient->arity())
        throw Error("component count does not match the ambient arity");
    const auto images = component_images(spec);
    if (spec.ambient_relation) {
        const Poly r = substitute(*spec.ambient_relation, images);
        if (!r.is_zero())
            throw IdentityFails("components do not satisfy the ambient relation; residual " +
                                r.str());
    }
    for (const Poly& eq : spec.image_equations) {
        const Poly r = substitute(eq, images);
        if (!r.is_zero())
            throw IdentityFails("components do not satisfy the image equation " + eq.str() +
                                "; residual " + r.str());
    }
}

RingPtr q2_ring(const FieldPtr& k) {
    return Ring::make(k, {"x", "y", "z"});
}

Poly q2_relation(const RingPtr& q2) {
    const Poly x = var(q2, "x"), y = var(q2, "y"), z = var(q2, "z");
    return x * y - z * (z + Poly::one(q2));
}

RingPtr sl2_ring(const FieldPtr& k) {
    return Ring::make(k, {"t", "u", "x", "y"});
}

Poly sl2_relation(const RingPtr& sl2) {
    const Poly t = var(sl2, "t"), u = var(sl2, "u"), x = var(sl2, "x"),
               y = var(sl2, "y");
    return x * y - t * u - Poly::one(sl2);
}

EmbeddingSpec construct_nu_p(const FieldPtr& k, const Parameters& params) {
    const Poly& p = need_poly(params, "p", Family::NuP);
    require_poly_over(p, k, {"t"}, "nu-p parameter p");
    EmbeddingSpec spec{Family::NuP, params, p.ring(), q2_ring(k), {}, {}, {}};
    spec.ambient_relation = q2_relation(spec.ambient);
    const Poly t = var(spec.source, "t");
    const Poly one = Poly::one(spec.source);
    spec.components = {t * (one + t * p), p, t * p};
    verify_construction(spec);
    return spec;
}

EmbeddingSpec construct_rho_lambda(const FieldPtr& k, const Parameters& params) {
    const FieldValue& lambda = need_value(params, "lambda", Family::RhoLambda);
    require_value_over(lambda, k, "rho-lambda parameter lambda");
    if (lambda.is_zero())
        throw ParameterConstraintViolated("rho-lambda needs lambda in k^*");
    EmbeddingSpec spec{Family::RhoLambda, params, Ring::make(k, {"s", "t"}),
                       sl2_ring(k),        {},     {},
                       {}};
    spec.ambient_relation = sl2_relation(spec.ambient);
    const Poly s = var(spec.source, "s"), t = var(spec.source, "t");
    const Poly one = Poly::one(spec.source);
    // Matrix (1, t; lambda*s, 1+lambda*s*t), listed as (t, u, x, y) entries.
    spec.components = {t, s.scaled(lambda), one, one + (s * t).scaled(lambda)};
    verify_construction(spec);
    return spec;
}

EmbeddingSpec construct_fibred_general(const FieldPtr& k, const Parameters& params) {
    const long n = need_int(params, "n", Family::FibredGeneral);
    const long m = need_int(params, "m", Family::FibredGeneral);
    const FieldValue& mu = need_value(params, "mu", Family::FibredGeneral);
    const Poly& q = need_poly(params, "q", Family::FibredGeneral);
    if (n < 1)
        throw ParameterConstraintViolated("fibred-general needs n >= 1");
    if (m < 0)
        throw ParameterConstraintViolated("fibred-general needs m >= 0");
    require_value_over(mu, k, "fibred-general parameter mu");
    if (mu.is_zero())
        throw ParameterConstraintViolated("fibred-general needs mu in k^*");
    require_poly_over(q, k, {"t", "x"}, "fibred-general parameter q");
    EmbeddingSpec spec{Family::FibredGeneral, params, nullptr, Ring::make(k, {"t", "x", "y"}),
                       {},                    {},     {}};
    const Poly t = var(spec.ambient, "t"), x = var(spec.ambient, "x"),
               y = var(spec.ambient, "y");
    const Poly q3 = substitute(q, {{"t", t}, {"x", x}});
    const Poly P = t.pow(static_cast<unsigned long>(n)) * y +
                   (x.pow(static_cast<unsigned long>(m)) * (x - Poly::one(spec.ambient)))
                       .scaled(mu) +
                   t * q3;
    spec.image_equations = {P};
    return spec;
}

EmbeddingSpec construct_pr_family(const FieldPtr& k, const Parameters& params) {
    const Poly& r = need_poly(params, "r", Family::PrFamily);
    require_poly_over(r, k, {"t"}, "pr parameter r");
    EmbeddingSpec spec{Family::PrFamily, params, nullptr, Ring::make(k, {"t", "x", "y"}),
                       {},               {},     {}};
    const Poly t = var(spec.ambient, "t"), x = var(spec.ambient, "x"),
               y = var(spec.ambient, "y");
    const Poly one = Poly::one(spec.ambient);
    const Poly r3 = substitute(r, {{"t", t}});
    spec.image_equations = {t * y - (x - t) * (x - one - t * t * r3)};
    return spec;
}

EmbeddingSpec construct_nonequiv_pair(const FieldPtr& k, const Parameters& params) {
    EmbeddingSpec spec{Family::NonEquivPair, params, nullptr, Ring::make(k, {"t", "x", "y"}),
                       {},                   {},     {}};
    const Poly t = var(spec.ambient, "t"), x = var(spec.ambient, "x"),
               y = var(spec.ambient, "y");
    const Poly one = Poly::one(spec.ambient);
    spec.image_equations = {t * t * y - x * (x + one),
                            t * t * y - x * (x + one - t * t)};
    return spec;
}

void require_char_p(const FieldPtr& k, long p, Family family) {
    if (p < 2 || static_cast<unsigned long>(p) != k->characteristic())
        throw ParameterConstraintViolated("family " + family_tag(family) +
                                          " needs char(k) = p > 0 with matching parameter p");
}

EmbeddingSpec construct_charp_line(const FieldPtr& k, const Parameters& params) {
    const long p = need_int(params, "p", Family::CharPLine);
    const long q = need_int(params, "q", Family::CharPLine);
    const FieldValue& a = need_value(params, "a", Family::CharPLine);
    const FieldValue& b = need_value(params, "b", Family::CharPLine);
    require_char_p(k, p, Family::CharPLine);
    if (q < 0)
        throw ParameterConstraintViolated("charp-line needs q >= 0");
    require_value_over(a, k, "charp-line parameter a");
    require_value_over(b, k, "charp-line parameter b");
    if (b.is_zero())
        throw ParameterConstraintViolated("charp-line needs b in k^*");
    const auto up = static_cast<unsigned long>(p);
    const auto uq = static_cast<unsigned long>(q);
    const unsigned long pp = checked_exponent(up * up, "p^2");
    const unsigned long pq = checked_exponent(up * uq, "p*q");
    checked_exponent(pp * uq, "p^2*q");

    EmbeddingSpec spec{Family::CharPLine, params, Ring::make(k, {"u"}),
                       Ring::make(k, {"x", "y"}), {}, {}, {}};
    const Poly u = var(spec.source, "u");
    spec.components = {u.pow(pp), (u.pow(pq).scaled(a) + u).scaled(b.inverse())};
    const Poly x = var(spec.ambient, "x"), y = var(spec.ambient, "y");
    spec.image_equations = {x + x.pow(pq).scaled(a.pow(p * p)) -
                            y.pow(pp).scaled(b.pow(p * p))};
    verify_construction(spec);
    return spec;
}

void require_q_prime_to_p(long p, long q, Family family) {
    if (q < 2 || q % p == 0)
        throw ParameterConstraintViolated("family " + family_tag(family) +
                                          " needs q >= 2 not a multiple of p");
}

EmbeddingSpec construct_charp_hypersurface(const FieldPtr& k, const Parameters& params) {
    const long p = need_int(params, "p", Family::CharPHypersurface);
    const long q = need_int(params, "q", Family::CharPHypersurface);
    const long n = need_int(params, "n", Family::CharPHypersurface);
    const FieldValue& a = need_value(params, "a", Family::CharPHypersurface);
    require_char_p(k, p, Family::CharPHypersurface);
    require_q_prime_to_p(p, q, Family::CharPHypersurface);
    require_value_over(a, k, "charp-hypersurface parameter a");
    if (a.is_zero())
        throw ParameterConstraintViolated("charp-hypersurface needs a in k^*");
    if (n < 1)
        throw ParameterConstraintViolated("charp-hypersurface needs n >= 1");
    const auto up = static_cast<unsigned long>(p);
    const auto uq = static_cast<unsigned long>(q);
    const unsigned long pp = checked_exponent(up * up, "p^2");
    const unsigned long pq = checked_exponent(up * uq, "p*q");
    checked_exponent(pp * uq, "p^2*q");

    std::vector<std::string> source_vars, ambient_vars;
    for (long i = 1; i <= n; ++i) source_vars.push_back("x" + std::to_string(i));
    for (long i = 1; i <= n + 1; ++i) ambient_vars.push_back("y" + std::to_string(i));
    EmbeddingSpec spec{Family::CharPHypersurface, params, Ring::make(k, source_vars),
                       Ring::make(k, ambient_vars), {}, {}, {}};
    const Poly x1 = var(spec.source, "x1");
    spec.components = {x1.pow(pp), x1.pow(pq).scaled(a) + x1};
    for (long i = 2; i <= n; ++i)
        spec.components.push_back(var(spec.source, "x" + std::to_string(i)));
    const Poly y1 = var(spec.ambient, "y1"), y2 = var(spec.ambient, "y2");
    spec.image_equations = {y1 + y1.pow(pq).scaled(a.pow(p * p)) - y2.pow(pp)};
    verify_construction(spec);
    return spec;
}

EmbeddingSpec construct_not_var_kt(const FieldPtr& k, const Parameters& params) {
    const long p = need_int(params, "p", Family::ExampleNotVarKt);
    const long q = need_int(params, "q", Family::ExampleNotVarKt);
    require_char_p(k, p, Family::ExampleNotVarKt);
    require_q_prime_to_p(p, q, Family::ExampleNotVarKt);
    const auto up = static_cast<unsigned long>(p);
    const auto uq = static_cast<unsigned long>(q);
    const unsigned long pp = checked_exponent(up * up, "p^2");
    const unsigned long pq = checked_exponent(up * uq, "p*q");
    checked_exponent(pp * uq, "p^2*q");

    EmbeddingSpec spec{Family::ExampleNotVarKt, params, Ring::make(k, {"s", "t"}),
                       Ring::make(k, {"t", "x", "y"}), {}, {}, {}};
    const Poly s = var(spec.source, "s"), ts = var(spec.source, "t");
    const Poly one_s = Poly::one(spec.source);
    spec.components = {ts, ts.pow(up) * s.pow(pp) + one_s,
                       ts.pow(uq) * s.pow(pq) + s};
    const Poly t = var(spec.ambient, "t"), x = var(spec.ambient, "x"),
               y = var(spec.ambient, "y");
    const Poly xm1 = x - Poly::one(spec.ambient);
    spec.image_equations = {xm1 - t.pow(up) * (y.pow(up) - xm1.pow(uq)).pow(up)};
    verify_construction(spec);
    return spec;
}

EmbeddingSpec construct_surface_e(const FieldPtr& k, const Parameters& params) {
    EmbeddingSpec spec{Family::SurfaceE, params, Ring::make(k, {"x", "t"}),
                       sl2_ring(k),      {},     {},
                       {}};
    spec.ambient_relation = sl2_relation(spec.ambient);
    const Poly xs = var(spec.source, "x"), ts = var(spec.source, "t");
    const Poly one = Poly::one(spec.source);
    const Poly a = one + ts + ts * ts * xs;
    const Poly w = one + ts * xs;
    // (a^2*w - 1) is divisible by t; the quotient is the u entry.
    const Poly u_num = a * a * w - one;
    const auto div = multivariate_divide(u_num, {ts}, MonomialOrder::default_order(spec.source));
    if (!div.remainder.is_zero())
        throw IdentityFails("a^2*w - 1 is not divisible by t; remainder " +
                            div.remainder.str());
    spec.components = {ts, div.quotients[0], a, a * w};
    const Poly t = var(spec.ambient, "t"), x = var(spec.ambient, "x"),
               y = var(spec.ambient, "y");
    spec.image_equations = {t * y - x * x + x};
    verify_construction(spec);
    return spec;
}

void shastri_curve(const RingPtr& source, Poly& g1, Poly& g2, Poly& g3) {
    const Poly t = var(source, "t");
    const Poly one = Poly::one(source);
    g1 = t.pow(3) - (t).scaled(FieldValue::from_integer(source->field(), 3));
    g2 = t.pow(4) - (t * t).scaled(FieldValue::from_integer(source->field(), 4)) - one;
    g3 = t.pow(5) - t.scaled(FieldValue::from_integer(source->field(), 10));
}

EmbeddingSpec construct_shastri_a3(const FieldPtr& k, const Parameters& params) {
    EmbeddingSpec spec{Family::ShastriA3, params, Ring::make(k, {"t"}),
                       Ring::make(k, {"x", "y", "z"}), {}, {}, {}};
    Poly g1(spec.source), g2(spec.source), g3(spec.source);
    shastri_curve(spec.source, g1, g2, g3);
    spec.components = {g1, g2, g3};
    const Poly x = var(spec.ambient, "x"), y = var(spec.ambient, "y");
    // x^2(x^2-4) - y(y^2+9y+24) = 16 holds along the curve.
    spec.image_equations = {x * x * (x * x - cst(spec.ambient, 4)) -
                            y * (y * y + y.scaled(FieldValue::from_integer(k, 9)) +
                                 cst(spec.ambient, 24)) -
                            cst(spec.ambient, 16)};
    verify_construction(spec);
    return spec;
}

EmbeddingSpec construct_shastri_sl2(const FieldPtr& k, const Parameters& params) {
    if (k->characteristic() == 2)
        throw ParameterConstraintViolated("shastri-sl2 needs char(k) != 2");
    EmbeddingSpec spec{Family::ShastriSL2, params, Ring::make(k, {"t"}),
                       sl2_ring(k),        {},     {},
                       {}};
    spec.ambient_relation = sl2_relation(spec.ambient);
    Poly g1(spec.source), g2(spec.source), g3(spec.source);
    shastri_curve(spec.source, g1, g2, g3);
    const FieldValue inv16 = FieldValue::from_integer(k, 16).inverse();
    // Unipotent row operation applied to the section over the quartic curve:
    // (1, 0; g3, 1) * (g1, g2; (g2^2+9g2+24)/16, g1(g1^2-4)/16).
    Matrix2 unipotent{Poly::one(spec.source), Poly::zero(spec.source), g3,
                      Poly::one(spec.source)};
    Matrix2 section{g1, g2,
                    (g2 * g2 + g2.scaled(FieldValue::from_integer(k, 9)) +
                     cst(spec.source, 24))
                        .scaled(inv16),
                    (g1 * (g1 * g1 - cst(spec.source, 4))).scaled(inv16)};
    const Matrix2 m = unipotent.mul(section);
    // Matrix entries (x, t; u, y) listed in ambient order (t, u, x, y).
    spec.components = {m.b, m.c, m.a, m.d};
    verify_construction(spec);
    return spec;
}

bool uses_variable(const Poly& f, std::size_t index) {
    for (const auto& [e, c] : f.terms())
        if (e[index] > 0) return true;
    return false;
}

} // namespace

std::string family_tag(Family family) {
    for (const auto& [f, tag] : kFamilyTags)
        if (f == family) return tag;
    throw Error("unknown family");
}

Family family_from_tag(const std::string& tag) {
    for (const auto& [f, t] : kFamilyTags)
        if (tag == t) return f;
    throw Error("unknown family tag '" + tag + "'");
}

EmbeddingSpec construct(const FieldPtr& k, Family family, const Parameters& params) {
    switch (family) {
    case Family::NuP: return construct_nu_p(k, params);
    case Family::RhoLambda: return construct_rho_lambda(k, params);
    case Family::FibredGeneral: return construct_fibred_general(k, params);
    case Family::PrFamily: return construct_pr_family(k, params);
    case Family::NonEquivPair: return construct_nonequiv_pair(k, params);
    case Family::CharPLine: return construct_charp_line(k, params);
    case Family::CharPHypersurface: return construct_charp_hypersurface(k, params);
    case Family::ExampleNotVarKt: return construct_not_var_kt(k, params);
    case Family::SurfaceE: return construct_surface_e(k, params);
    case Family::ShastriA3: return construct_shastri_a3(k, params);
    case Family::ShastriSL2: return construct_shastri_sl2(k, params);
    }
    throw Error("unknown family");
}

ZeroCheckReport verify_on_quadric(const EmbeddingSpec& spec) {
    if (!spec.ambient_relation)
        throw NotAQuadricAmbient("family " + family_tag(spec.family) +
                                 " does not map into a quadric");
    if (spec.components.empty())
        throw NotAQuadricAmbient("spec carries no component morphism");
    if (spec.components.size() != spec.ambient->arity())
        throw Error("component count does not match the ambient arity");
    return {substitute(*spec.ambient_relation, component_images(spec))};
}

FibreProfile degenerate_fibre_profile(const Poly& P) {
    const RingPtr& ring = P.ring();
    const std::size_t ix = ring->index_of_checked("x");
    const std::size_t iy = ring->index_of_checked("y");
    ring->index_of_checked("t");
    std::map<std::string, Poly> at_t0;
    for (const auto& name : ring->vars())
        at_t0.emplace(name, name == "t" ? Poly::zero(ring) : var(ring, name));
    const Poly f0 = substitute(P, at_t0);

    FibreProfile profile;
    if (f0.is_zero()) {
        profile.witness = "P(0,x,y) is the zero polynomial";
        return profile;
    }
    const bool in_x = uses_variable(f0, ix);
    const bool in_y = uses_variable(f0, iy);
    if (in_x && in_y) {
        profile.witness = "P(0,x,y) depends on both x and y: " + f0.str();
        return profile;
    }
    if (!in_x && !in_y) {
        profile.witness = "P(0,x,y) = " + f0.str() + " involves neither x nor y";
        return profile;
    }
    const std::string axis = in_x ? "x" : "y";
    const std::size_t iv = in_x ? ix : iy;

    std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
    for (const auto& [e, c] : f0.terms()) m = std::min(m, e[iv]);
    Poly g(ring);
    for (const auto& [e, c] : f0.terms()) {
        Exponents shifted = e;
        shifted[iv] -= m;
        g.add_term(shifted, c);
    }
    if (!(g.degree_in(axis) == Degree::of(1))) {
        profile.witness = "after removing " + axis + "^" + std::to_string(m) +
                          " the cofactor " + g.str() + " is not linear";
        return profile;
    }
    const FieldValue mu = g.coefficient_in(axis, 1).as_constant();
    const FieldValue lambda = -(g.coefficient_in(axis, 0).as_constant() / mu);
    // lambda != 0: the cofactor has a nonzero constant term because m was
    // the minimal exponent.
    const Poly axis_poly = var(ring, axis);
    const Poly expanded =
        (axis_poly.pow(m) * (axis_poly - Poly::constant(ring, lambda))).scaled(mu);
    if (expanded != f0)
        throw IdentityFails("profile re-expansion mismatch: " + expanded.str() +
                            " vs " + f0.str());
    profile.axis = axis;
    profile.m = static_cast<long>(m);
    profile.mu = mu;
    profile.lambda = lambda;
    return profile;
}

FibreTriviality fibre_triviality_check(const Poly& P) {
    const RingPtr& ring = P.ring();
    const std::size_t it = ring->index_of_checked("t");
    ring->index_of_checked("x");
    ring->index_of_checked("y");

    FibreTriviality result;
    std::string reasons;
    for (const std::string axis : {"y", "x"}) {
        const std::string prefix = "coefficient analysis in " + axis + ": ";
        if (!(P.degree_in(axis) == Degree::of(1))) {
            reasons += prefix + "degree is not 1. ";
            continue;
        }
        const Poly c = P.coefficient_in(axis, 1);
        bool only_t = true;
        for (const auto& [e, coeff] : c.terms())
            for (std::size_t j = 0; j < e.size(); ++j)
                if (j != it && e[j] > 0) only_t = false;
        if (!only_t) {
            reasons += prefix + "coefficient of " + axis + " is not in k[t]. ";
            continue;
        }
        if (c.terms().size() != 1) {
            reasons += prefix + "coefficient " + c.str() +
                       " vanishes at some t != 0. ";
            continue;
        }
        result.all_fibres_off_zero_are_lines = true;
        result.axis = axis;
        result.n = static_cast<long>(c.terms().begin()->first[it]);
        return result;
    }
    result.reason = reasons;
    return result;
}

namespace {

void check_zero(IdentityReport& report, const std::string& label, const Poly& residual) {
    if (!residual.is_zero())
        throw IdentityFails(label + ": residual " + residual.str());
    report.verified.push_back(label);
}

void check_member(IdentityReport& report, const std::string& label, const Poly& value,
                  const std::vector<Poly>& ideal) {
    const auto basis = IdealBasis::of(ideal);
    const Membership m = ideal_membership(value, basis);
    if (!m.is_member)
        throw IdentityFails(label + ": normal form " + m.remainder.str());
    report.verified.push_back(label);
}

} // namespace

// Each coefficient c of t^e contributes c * v^e * u^(degree - e).
Poly homogenize(const Poly& p, const RingPtr& uv, std::uint32_t degree) {
    if (p.ring()->arity() != 1)
        throw Error("homogenize expects a univariate polynomial");
    const std::size_t iu = uv->index_of_checked("u");
    const std::size_t iv = uv->index_of_checked("v");
    Poly result(uv);
    for (const auto& [e, c] : p.terms()) {
        if (e[0] > degree)
            throw Error("homogenization degree below the degree of a term");
        Exponents exps(uv->arity(), 0);
        exps[iv] = e[0];
        exps[iu] = degree - e[0];
        result.add_term(exps, c);
    }
    return result;
}

IdentityReport q2_chart_isomorphism_check(const FieldPtr& k) {
    IdentityReport report;
    const RingPtr qr = q2_ring(k);
    const Poly x = var(qr, "x"), y = var(qr, "y"), z = var(qr, "z");
    const Poly relation = q2_relation(qr);
    const std::vector<Poly> ideal = {relation};

    // Inverse map in projective coordinates: numerators and the common
    // denominator D = u0*v1 - u1*v0.
    const RingPtr pr = Ring::make(k, {"u0", "u1", "v0", "v1"});
    const Poly u0 = var(pr, "u0"), u1 = var(pr, "u1"), v0 = var(pr, "v0"),
               v1 = var(pr, "v1");
    const Poly nx = u1 * v1, ny = u0 * v0, nz = u1 * v0;
    const Poly D = u0 * v1 - u1 * v0;

    check_zero(report, "inverse map lands on the quadric (cleared by D^2)",
               nx * ny - nz * nz - nz * D);

    // Chart z != 0 sends (x,y,z) to ([y:z],[z:x]); composing with the inverse
    // must return (x,y,z).  Clearing the denominator yx - z^2 turns each
    // component identity into membership in the quadric ideal.
    {
        const Poly Dq = y * x - z * z;
        check_member(report, "chart z!=0 then inverse recovers x", z * x - x * Dq, ideal);
        check_member(report, "chart z!=0 then inverse recovers y", y * z - y * Dq, ideal);
        check_member(report, "chart z!=0 then inverse recovers z", z * z - z * Dq, ideal);
    }
    // Chart z != -1 sends (x,y,z) to ([z+1:x],[y:z+1]).
    {
        const Poly zp1 = z + Poly::one(qr);
        const Poly Dq = zp1 * zp1 - x * y;
        check_member(report, "chart z!=-1 then inverse recovers x", x * zp1 - x * Dq, ideal);
        check_member(report, "chart z!=-1 then inverse recovers y", zp1 * y - y * Dq, ideal);
        check_member(report, "chart z!=-1 then inverse recovers z", x * y - z * Dq, ideal);
    }
    // Inverse then chart: projective equality is a vanishing cross product,
    // already cleared of D.
    check_zero(report, "inverse then chart z!=0 recovers [u0:u1]", ny * u1 - nz * u0);
    check_zero(report, "inverse then chart z!=0 recovers [v0:v1]", nz * v1 - nx * v0);
    check_zero(report, "inverse then chart z!=-1 recovers [u0:u1]",
               (nz + D) * u1 - nx * u0);
    check_zero(report, "inverse then chart z!=-1 recovers [v0:v1]",
               ny * v1 - (nz + D) * v0);

    // Sample parametrized curves of degree d + diagonal avoidance: the image
    // of [u:v] -> ([u:v], [u*P : u^(d+1) + v*P]) meets the diagonal exactly
    // where u^(d+2) vanishes.
    const RingPtr rt = Ring::make(k, {"t"});
    const RingPtr uv = Ring::make(k, {"u", "v"});
    const Poly tt = var(rt, "t");
    const Poly one_t = Poly::one(rt);
    const std::vector<Poly> samples = {tt, tt * tt + one_t, tt.pow(3) + tt + one_t};
    for (std::uint32_t d = 1; d <= 3; ++d) {
        const Poly& p = samples[d - 1];
        const std::string suffix = " (degree " + std::to_string(d) + ")";
        const Poly P = homogenize(p, uv, d);
        for (const auto& [e, c] : P.terms())
            if (total_degree_of(e) != d)
                throw IdentityFails("homogenization of degree " + std::to_string(d) +
                                    " is not homogeneous: " + P.str());
        report.verified.push_back("homogenization is homogeneous" + suffix);
        check_zero(report, "dehomogenization returns the parameter polynomial" + suffix,
                   substitute(P, {{"u", one_t}, {"v", tt}}) - p);
        const Poly u = var(uv, "u"), v = var(uv, "v");
        check_zero(report, "curve meets the diagonal only at u^(d+2) = 0" + suffix,
                   u * (u.pow(d + 1) + v * P) - v * u * P - u.pow(d + 2));
        // The parametrized curve (t(1+tp), p, tp) composed with the chart
        // z != 0 agrees with the curve above on the affine part u = 1.
        const Poly cx = tt * (one_t + tt * p), cy = p, cz = tt * p;
        check_zero(report, "chart image of the parametrized curve has first factor [1:t]" + suffix,
                   cy * tt - cz);
        check_zero(report,
                   "chart image of the parametrized curve has second factor [p:1+tp]" + suffix,
                   cz * (one_t + tt * p) - cx * p);
    }
    return report;
}

FormOfA1Report formof_a1_witness(long p, long q, const FieldValue& a,
                                 const FieldValue& b) {
    const FieldPtr base = a.field();
    if (!base || !b.field() || !b.field()->same(*base))
        throw RingMismatch("parameters a and b must share a field");
    if (p < 2 || static_cast<unsigned long>(p) != base->characteristic())
        throw ParameterConstraintViolated("needs char(k) = p > 0 with matching parameter p");
    if (q < 2 || q % p == 0)
        throw ParameterConstraintViolated("needs q >= 2 not a multiple of p");
    if (b.is_zero())
        throw ParameterConstraintViolated("needs b in k^*");
    const auto up = static_cast<unsigned long>(p);
    const auto uq = static_cast<unsigned long>(q);
    const unsigned long pp = checked_exponent(up * up, "p^2");
    const unsigned long pq = checked_exponent(up * uq, "p*q");
    checked_exponent(pp * uq, "p^2*q");

    const FieldPtr kt = FieldDescriptor::rational_functions(base, "T");
    const FieldValue T = FieldValue::parameter(kt);
    const FieldValue t = T.pow(p);
    const FieldValue ak = FieldValue::embed(kt, a);
    const FieldValue bk = FieldValue::embed(kt, b);

    const RingPtr ru = Ring::make(kt, {"u"});
    const Poly u = var(ru, "u");
    const Poly x_comp = u.pow(pp) + Poly::constant(ru, t);
    const Poly y_comp =
        ((u.pow(up) + Poly::constant(ru, T)).pow(uq).scaled(ak) + u).scaled(bk.inverse());
    const Poly residual = x_comp + x_comp.pow(pq).scaled(ak.pow(p * p)) -
                          y_comp.pow(pp).scaled(bk.pow(p * p)) -
                          Poly::constant(ru, t);
    if (!residual.is_zero())
        throw IdentityFails("witness image does not satisfy the curve equation; residual " +
                            residual.str());
    return {x_comp, y_comp, residual};
}

} // namespace qem

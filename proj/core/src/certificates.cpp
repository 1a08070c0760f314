#include "qem/certificates.hpp"

#include <array>

#include "qem/errors.hpp"
#include "qem/groebner.hpp"

namespace qem {

namespace {

Poly var(const RingPtr& ring, const std::string& name) {
    return Poly::variable(ring, name);
}

std::map<std::string, Poly> component_images(const EmbeddingSpec& spec) {
    std::map<std::string, Poly> images;
    const auto& names = spec.ambient->vars();
    for (std::size_t i = 0; i < names.size(); ++i)
        images.emplace(names[i], spec.components[i]);
    return images;
}

long need_int_param(const EmbeddingSpec& spec, const std::string& key) {
    auto it = spec.parameters.integers.find(key);
    if (it == spec.parameters.integers.end())
        throw Error("spec lacks integer parameter '" + key + "'");
    return it->second;
}

FieldValue need_value_param(const EmbeddingSpec& spec, const std::string& key) {
    auto it = spec.parameters.values.find(key);
    if (it == spec.parameters.values.end())
        throw Error("spec lacks field parameter '" + key + "'");
    return it->second;
}

Certificate left_inverse(std::vector<Poly> witnesses) {
    Certificate c;
    c.kind = CertificateKind::LeftInverse;
    c.witnesses = std::move(witnesses);
    return c;
}

Certificate generator_chain(std::vector<ChainLink> chain) {
    Certificate c;
    c.kind = CertificateKind::GeneratorChain;
    c.chain = std::move(chain);
    return c;
}

Certificate builtin_nu_p(const EmbeddingSpec& spec) {
    auto it = spec.parameters.polys.find("p");
    if (it == spec.parameters.polys.end())
        throw Error("spec lacks polynomial parameter 'p'");
    const Poly& p = it->second;
    const Degree deg = p.total_degree();
    const auto d = static_cast<std::uint32_t>(deg.is_minus_infinity() ? 0 : deg.value());
    const RingPtr uv = Ring::make(spec.ambient->field(), {"u", "v"});
    const Poly P = homogenize(p, uv, d);
    const Poly u = var(uv, "u"), v = var(uv, "v");
    return generator_chain(
        {{"the projective closure of the image meets the diagonal only at u^" +
              std::to_string(d + 2) + " = 0",
          u * (u.pow(d + 1) + v * P) - v * u * P - u.pow(d + 2),
          {}}});
}

Certificate builtin_rho_lambda(const EmbeddingSpec& spec) {
    const FieldValue lambda = need_value_param(spec, "lambda");
    return left_inverse({var(spec.ambient, "u").scaled(lambda.inverse()),
                         var(spec.ambient, "t")});
}

Certificate builtin_surface_e(const EmbeddingSpec& spec) {
    const RingPtr& amb = spec.ambient;
    const Poly t = var(amb, "t"), u = var(amb, "u"), x = var(amb, "x"),
               y = var(amb, "y");
    const Poly one = Poly::one(amb);
    const std::vector<Poly> surface_ideal = {x * y - t * u - one,
                                             t * y - x * x + x};
    std::vector<ChainLink> chain;
    chain.push_back({"t*(y^2 - u*x + u) = x - 1 on the surface",
                     t * (y * y - u * x + u) - (x - one), surface_ideal});
    chain.push_back({"t^2*u = (x+1)*(x-1)^2 + (x - t - 1) on the surface",
                     t * t * u - (x + one) * (x - one) * (x - one) - (x - t - one),
                     surface_ideal});
    // The pair ((x - t - 1)/t^2, t) inverts the parametrization: cleared of
    // denominators, the first component identity reads
    // x_entry - t_entry - 1 = x_source * t_entry^2 exactly.
    const Poly xs = var(spec.source, "x"), ts = var(spec.source, "t");
    const Poly& ct = spec.components[0];
    const Poly& cx = spec.components[2];
    chain.push_back({"the cleared inverse recovers the source x",
                     (cx - ct - Poly::one(spec.source)) - xs * ct * ct,
                     {}});
    chain.push_back({"the t entry is the source t", ct - ts, {}});
    return generator_chain(std::move(chain));
}

Certificate builtin_shastri_a3(const EmbeddingSpec& spec) {
    const RingPtr& amb = spec.ambient;
    const Poly x = var(amb, "x"), y = var(amb, "y"), z = var(amb, "z");
    const FieldPtr& k = amb->field();
    const Poly w = z.scaled(FieldValue::from_integer(k, 3)) -
                   x.scaled(FieldValue::from_integer(k, 12)) -
                   (x * y).scaled(FieldValue::from_integer(k, 5)) + y * z -
                   x.pow(3);
    return left_inverse({w});
}

Certificate builtin_shastri_sl2(const EmbeddingSpec& spec) {
    const RingPtr& amb = spec.ambient;
    const FieldPtr& k = amb->field();
    if (k->characteristic() == 2)
        throw Error("the shastri-sl2 witness needs char(k) != 2");
    const Poly t = var(amb, "t"), u = var(amb, "u"), x = var(amb, "x"),
               y = var(amb, "y");
    const FieldValue inv16 = FieldValue::from_integer(k, 16).inverse();
    // Recovers the z coordinate of the space curve from the matrix entries:
    // (u*x*(x^2-4) - y*(t^2+9t+24)) / 16.
    const Poly zhat =
        (u * x * (x * x - Poly::from_integer(amb, 4)) -
         y * (t * t + t.scaled(FieldValue::from_integer(k, 9)) +
              Poly::from_integer(amb, 24)))
            .scaled(inv16);
    const Poly w = zhat.scaled(FieldValue::from_integer(k, 3)) -
                   x.scaled(FieldValue::from_integer(k, 12)) -
                   (x * t).scaled(FieldValue::from_integer(k, 5)) + t * zhat -
                   x.pow(3);
    return left_inverse({w});
}

Certificate builtin_charp_line(const EmbeddingSpec& spec) {
    const long p = need_int_param(spec, "p");
    const long q = need_int_param(spec, "q");
    const FieldValue a = need_value_param(spec, "a");
    const FieldValue b = need_value_param(spec, "b");
    const Poly x = var(spec.ambient, "x"), y = var(spec.ambient, "y");
    // b^p*y^p - a^p*x^q equals u^p on the image; one more q-th power and a
    // linear correction recover u itself.
    const Poly up = y.pow(static_cast<unsigned long>(p)).scaled(b.pow(p)) -
                    x.pow(static_cast<unsigned long>(q)).scaled(a.pow(p));
    return left_inverse(
        {y.scaled(b) - up.pow(static_cast<unsigned long>(q)).scaled(a)});
}

Certificate builtin_charp_hypersurface(const EmbeddingSpec& spec) {
    const long p = need_int_param(spec, "p");
    const long q = need_int_param(spec, "q");
    const long n = need_int_param(spec, "n");
    const FieldValue a = need_value_param(spec, "a");
    const Poly y1 = var(spec.ambient, "y1"), y2 = var(spec.ambient, "y2");
    const Poly up = y2.pow(static_cast<unsigned long>(p)) -
                    y1.pow(static_cast<unsigned long>(q)).scaled(a.pow(p));
    std::vector<Poly> witnesses = {
        y2 - up.pow(static_cast<unsigned long>(q)).scaled(a)};
    for (long i = 3; i <= n + 1; ++i)
        witnesses.push_back(var(spec.ambient, "y" + std::to_string(i)));
    return left_inverse(std::move(witnesses));
}

Certificate builtin_not_var_kt(const EmbeddingSpec& spec) {
    const auto p = static_cast<unsigned long>(need_int_param(spec, "p"));
    const auto q = static_cast<unsigned long>(need_int_param(spec, "q"));
    const Poly t = var(spec.ambient, "t"), x = var(spec.ambient, "x"),
               y = var(spec.ambient, "y");
    const Poly xm1 = x - Poly::one(spec.ambient);
    // First source coordinate: y - t^q*(y^p - (x-1)^q)^q; the second is t.
    return left_inverse(
        {y - t.pow(q) * (y.pow(p) - xm1.pow(q)).pow(q), t});
}

// One elementary move of the simplification chain: coordinate `target` is
// replaced by `expression` evaluated at the current coordinates.
struct ElementaryStep {
    std::size_t target;
    Poly expression;
};

std::map<std::string, Poly> tuple_images(const RingPtr& a4,
                                         const std::vector<Poly>& tuple) {
    std::map<std::string, Poly> images;
    const auto& names = a4->vars();
    for (std::size_t i = 0; i < names.size(); ++i) images.emplace(names[i], tuple[i]);
    return images;
}

void apply_step(const RingPtr& a4, std::vector<Poly>& tuple, const ElementaryStep& step) {
    tuple[step.target] = substitute(step.expression, tuple_images(a4, tuple));
}

// The three recorded elementary automorphisms of A^4 (tuple order t,x,y,u)
// that turn the conjugated embedding into the simplified one, and their
// inverses.
std::vector<ElementaryStep> forward_steps(const RingPtr& a4) {
    const Poly x = var(a4, "x"), y = var(a4, "y"), u = var(a4, "u");
    const Poly one = Poly::one(a4);
    return {{1, x - one},
            {2, y - x.scaled(FieldValue::from_integer(a4->field(), 2)) - one},
            {3, u - y.scaled(FieldValue::from_integer(a4->field(), 3))}};
}

std::vector<ElementaryStep> inverse_steps(const RingPtr& a4) {
    const Poly x = var(a4, "x"), y = var(a4, "y"), u = var(a4, "u");
    const Poly one = Poly::one(a4);
    return {{3, u + y.scaled(FieldValue::from_integer(a4->field(), 3))},
            {2, y + x.scaled(FieldValue::from_integer(a4->field(), 2)) + one},
            {1, x + one}};
}

} // namespace

Certificate certify_closed(const EmbeddingSpec& spec, Certificate witness) {
    switch (witness.kind) {
    case CertificateKind::LeftInverse: {
        if (spec.components.empty() || !spec.source)
            throw Error("left-inverse certificates need a component morphism");
        if (spec.components.size() != spec.ambient->arity())
            throw Error("component count does not match the ambient arity");
        if (witness.witnesses.size() != spec.source->arity())
            throw WitnessFails("left inverse must carry one witness per source variable");
        const auto images = component_images(spec);
        for (std::size_t i = 0; i < witness.witnesses.size(); ++i) {
            const std::string& name = spec.source->vars()[i];
            const Poly got = substitute(witness.witnesses[i], images);
            const Poly want = Poly::variable(spec.source, name);
            if (got != want)
                throw WitnessFails("left inverse witness for " + name + ": residual " +
                                   (got - want).str());
        }
        break;
    }
    case CertificateKind::GeneratorChain: {
        if (witness.chain.empty())
            throw WitnessFails("generator chain carries no identities");
        for (const ChainLink& link : witness.chain) {
            if (link.modulo.empty()) {
                if (!link.value.is_zero())
                    throw WitnessFails(link.label + ": expected the zero polynomial, got " +
                                       link.value.str());
            } else {
                const Membership m = ideal_membership(link.value, IdealBasis::of(link.modulo));
                if (!m.is_member)
                    throw WitnessFails(link.label + ": not in the stated ideal; normal form " +
                                       m.remainder.str());
            }
        }
        break;
    }
    case CertificateKind::DegreeObstruction:
        throw Error("a degree obstruction records non-equivalence; it does not certify "
                    "closedness");
    }
    witness.verified = true;
    return witness;
}

Certificate builtin_certificate(const EmbeddingSpec& spec) {
    switch (spec.family) {
    case Family::NuP: return builtin_nu_p(spec);
    case Family::RhoLambda: return builtin_rho_lambda(spec);
    case Family::SurfaceE: return builtin_surface_e(spec);
    case Family::ShastriA3: return builtin_shastri_a3(spec);
    case Family::ShastriSL2: return builtin_shastri_sl2(spec);
    case Family::CharPLine: return builtin_charp_line(spec);
    case Family::CharPHypersurface: return builtin_charp_hypersurface(spec);
    case Family::ExampleNotVarKt: return builtin_not_var_kt(spec);
    case Family::FibredGeneral:
    case Family::PrFamily:
    case Family::NonEquivPair:
        throw Error("family " + family_tag(spec.family) +
                    " has no stored finite witness; its closedness comes from the "
                    "fibred analysis");
    }
    throw Error("unknown family");
}

RingPtr a4_tuple_ring(const FieldPtr& k) {
    return Ring::make(k, {"t", "x", "y", "u"});
}

std::vector<Poly> conjugated_a4_components(const FieldPtr& k) {
    const EmbeddingSpec rho = construct(k, Family::SurfaceE, {});
    // Matrix entries in the (x, t; u, y) convention.
    const Matrix2 m{rho.components[2], rho.components[0], rho.components[1],
                    rho.components[3]};
    const RingPtr& src = rho.source;
    const FieldValue minus_one = -FieldValue::one(k);
    const Matrix2 a = Matrix2::from_scalars(src, FieldValue::one(k), FieldValue::zero(k),
                                            minus_one, FieldValue::one(k));
    const Matrix2 conj = a.mul(m).mul(a);
    return {conj.b, conj.a, conj.d, conj.c};
}

std::vector<Poly> simplified_a4_components(const FieldPtr& k) {
    std::vector<Poly> tuple = conjugated_a4_components(k);
    const RingPtr a4 = a4_tuple_ring(k);
    for (const ElementaryStep& step : forward_steps(a4)) apply_step(a4, tuple, step);
    return tuple;
}

Certificate derive_a4_left_inverse(const std::vector<Poly>& components) {
    if (components.size() != 4)
        throw Error("expected four affine components");
    const RingPtr src = components[0].ring();
    if (src->vars() != std::vector<std::string>{"x", "t"})
        throw Error("components must live in the source ring k[x,t]");
    const RingPtr a4 = a4_tuple_ring(src->field());

    // Undo the elementary chain: coordinates of the conjugated embedding as
    // polynomials in the simplified ones.
    std::vector<Poly> coords;
    for (const auto& name : a4->vars()) coords.push_back(var(a4, name));
    for (const ElementaryStep& step : inverse_steps(a4)) apply_step(a4, coords, step);

    // Undo the conjugation by the unipotent matrix: the surface coordinates
    // in terms of the conjugated ones are (t, x+t, y+t, x+y+t+u).
    const Poly t = var(a4, "t"), x = var(a4, "x"), y = var(a4, "y"), u = var(a4, "u");
    const std::vector<Poly> unconjugate = {t, x + t, y + t, x + y + t + u};
    std::vector<Poly> surface_coords;
    const auto coord_images = tuple_images(a4, coords);
    for (const Poly& expr : unconjugate)
        surface_coords.push_back(substitute(expr, coord_images));

    // The cleared inverse of the surface parametrization:
    // x_source = u - (x+1)*(y^2 - u*x + u)^2, t_source = t.
    const Poly one = Poly::one(a4);
    const Poly inv_x = u - (x + one) * (y * y - u * x + u).pow(2);
    const Poly e_x = substitute(inv_x, tuple_images(a4, surface_coords));
    const Poly e_t = surface_coords[0];

    const std::map<std::string, Poly> onto_components =
        tuple_images(a4, components);
    const Poly got_x = substitute(e_x, onto_components);
    const Poly got_t = substitute(e_t, onto_components);
    const Poly want_x = var(src, "x"), want_t = var(src, "t");
    if (got_x != want_x)
        throw DerivationFailed("replayed witness does not recover x; residual " +
                               (got_x - want_x).str());
    if (got_t != want_t)
        throw DerivationFailed("replayed witness does not recover t; residual " +
                               (got_t - want_t).str());

    Certificate cert = left_inverse({e_x, e_t});
    cert.verified = true;
    return cert;
}

Certificate final_a4_left_inverse(const FieldPtr& k) {
    return derive_a4_left_inverse(simplified_a4_components(k));
}

} // namespace qem

#include "qem/quotient.hpp"

#include <algorithm>

#include "qem/errors.hpp"
#include "qem/groebner.hpp"

namespace qem {

namespace {

struct Sl2Vars {
    std::size_t t, u, x, y;
};

Sl2Vars sl2_vars(const RingPtr& ring) {
    return Sl2Vars{ring->index_of_checked("t"), ring->index_of_checked("u"),
                   ring->index_of_checked("x"), ring->index_of_checked("y")};
}

} // namespace

Poly sl2_normal_form(const Poly& f) {
    const RingPtr& ring = f.ring();
    const Sl2Vars v = sl2_vars(ring);

    Exponents tu(ring->arity(), 0);
    tu[v.t] = 1;
    tu[v.u] = 1;
    const Poly tu_plus_1 = Poly::monomial(ring, tu, FieldValue::one(ring->field())) + Poly::one(ring);

    Poly work = f;
    for (;;) {
        Poly rest(ring), rewritten(ring);
        bool any = false;
        for (const auto& [e, c] : work.terms()) {
            if (e[v.x] > 0 && e[v.y] > 0) {
                Exponents strip = e;
                strip[v.x] -= 1;
                strip[v.y] -= 1;
                rewritten = rewritten + Poly::monomial(ring, strip, c) * tu_plus_1;
                any = true;
            } else {
                rest.add_term(e, c);
            }
        }
        if (!any) return work;
        work = rest + rewritten;
    }
}

Poly KeyNormalForm::recompose(const std::string& u_name) const {
    const RingPtr& ring = base.ring();
    Poly out = base;
    const Poly u = Poly::variable(ring, u_name);
    Poly upow = Poly::one(ring);
    for (const Poly& fi : tail) {
        upow = upow * u;
        out = out + fi * upow;
    }
    return out;
}

KeyNormalForm key_normal_form(const Poly& f, unsigned n, const Poly& h) {
    const RingPtr& ring = f.ring();
    const Sl2Vars v = sl2_vars(ring);
    if (n == 0) throw Error("key normal form needs a positive t-power");
    if (!h.ring()->same(*ring)) throw RingMismatch("h must live in the same ring as f");
    if (!h.degree_in("u").is_minus_infinity() && h.degree_in("u").value() > 0)
        throw Error("h must not involve u");

    // Split f by u-power, zeroing the u-exponent within each layer.
    std::vector<Poly> layer;
    for (const auto& [e, c] : f.terms()) {
        const std::uint32_t r = e[v.u];
        if (layer.size() <= r) layer.resize(r + 1, Poly::zero(ring));
        Exponents stripped = e;
        stripped[v.u] = 0;
        layer[r].add_term(stripped, c);
    }
    if (layer.empty()) layer.push_back(Poly::zero(ring));

    auto t_degree_reaches_n = [&](const Poly& p) {
        const Degree d = p.degree_in("t");
        return !d.is_minus_infinity() && d.value() >= static_cast<long>(n);
    };

    for (;;) {
        std::size_t r = layer.size();
        while (r > 1 && !t_degree_reaches_n(layer[r - 1])) --r;
        if (r <= 1) break;
        const std::size_t top = r - 1;
        // layer[top] = t^n * A + B with every B-term of t-degree below n.
        Poly a(ring), b(ring);
        for (const auto& [e, c] : layer[top].terms()) {
            if (e[v.t] >= n) {
                Exponents quot = e;
                quot[v.t] -= n;
                a.add_term(quot, c);
            } else {
                b.add_term(e, c);
            }
        }
        layer[top] = b;
        layer[top - 1] = layer[top - 1] + h * a;
    }

    while (layer.size() > 1 && layer.back().is_zero()) layer.pop_back();

    const Poly x = Poly::variable(ring, ring->vars()[v.x]);
    const Poly y = Poly::variable(ring, ring->vars()[v.y]);
    const bool whitelisted = h == x * y - Poly::one(ring);

    KeyNormalForm out{layer.front(), {layer.begin() + 1, layer.end()}, !whitelisted};

    // The rewrite must not change the class modulo (t^n u - h).
    Exponents tnu(ring->arity(), 0);
    tnu[v.t] = n;
    tnu[v.u] = 1;
    const Poly relation = Poly::monomial(ring, tnu, FieldValue::one(ring->field())) - h;
    const Poly diff = f - out.recompose(ring->vars()[v.u]);
    if (!diff.is_zero() && !ideal_membership(diff, IdealBasis::of({relation})).is_member)
        throw IdentityFails("key normal form drifted out of the relation's ideal");

    return out;
}

SubringReport preserved_subring_check(const std::map<std::string, Poly>& images, unsigned n,
                                      const Poly& h) {
    const RingPtr& ring = h.ring();
    const Sl2Vars v = sl2_vars(ring);
    for (const char* name : {"t", "u", "x", "y"}) {
        if (!images.count(name)) throw NotWellDefined(std::string("missing image for ") + name);
        if (!images.at(name).ring()->same(*ring))
            throw RingMismatch("endomorphism image ring mismatch");
    }
    if (images.at("t") != Poly::variable(ring, ring->vars()[v.t]))
        throw NotWellDefined("a k[t]-endomorphism must fix t");

    Exponents tnu(ring->arity(), 0);
    tnu[v.t] = n;
    tnu[v.u] = 1;
    const Poly relation = Poly::monomial(ring, tnu, FieldValue::one(ring->field())) - h;
    const IdealBasis relation_ideal = buchberger(IdealBasis::of({relation}));
    if (!ideal_membership(substitute(relation, images), relation_ideal).is_member)
        throw NotWellDefined("images do not carry t^n u - h into its own ideal");

    SubringReport report{true, true};
    for (const char* name : {"t", "x", "y"}) {
        if (!key_normal_form(images.at(name), n, h).tail.empty()) report.images_in_subring = false;
    }

    Exponents tn(ring->arity(), 0);
    tn[v.t] = n;
    const Poly tpow = Poly::monomial(ring, tn, FieldValue::one(ring->field()));
    const IdealBasis target = buchberger(IdealBasis::of({tpow, h}));
    for (const Poly& gen : {tpow, h}) {
        const Poly image = substitute(gen, images);
        const KeyNormalForm nf = key_normal_form(image, n, h);
        if (!nf.tail.empty() || !ideal_membership(nf.base, target).is_member)
            report.ideal_preserved = false;
    }
    return report;
}

} // namespace qem

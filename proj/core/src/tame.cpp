#include "qem/equivalence.hpp"

#include <algorithm>
#include <utility>

#include "qem/errors.hpp"

namespace qem {

namespace {

void require_plane_ring(const RingPtr& ring) {
    if (!ring || ring->arity() != 2)
        throw RingMismatch("automorphism words act on a two-variable ring");
}

void require_value_field(const RingPtr& ring, const FieldValue& v,
                         const char* what) {
    // A default-constructed FieldValue is the zero of Q; it only reaches a
    // non-rational ring as an exact zero, which every branch below tolerates.
    if (v.field() && !v.field()->same(*ring->field()))
        throw RingMismatch(std::string(what) +
                           " lies outside the ring's coefficient field");
}

void require_matching_fields(const FieldValue& a, const FieldValue& b,
                             const char* what) {
    const FieldPtr ka = a.field() ? a.field() : FieldDescriptor::rationals();
    const FieldPtr kb = b.field() ? b.field() : FieldDescriptor::rationals();
    if (!ka->same(*kb))
        throw RingMismatch(std::string(what) + " mixes two coefficient fields");
}

// Evaluates a polynomial that depends only on its ring's first variable at
// the given image (which may live in a different ring over the same field).
Poly evaluate_univariate(const Poly& p, const Poly& image) {
    const RingPtr& target = image.ring();
    if (!target->field()->same(*p.ring()->field()))
        throw RingMismatch("univariate evaluation must preserve the field");
    Poly out(target);
    for (const auto& [e, c] : p.terms()) out = out + image.pow(e[0]).scaled(c);
    return out;
}

long finite_degree(const Poly& f) {
    const Degree d = f.total_degree();
    return d.is_minus_infinity() ? -1 : d.value();
}

} // namespace

AutoFactor AutoFactor::swap() {
    AutoFactor f;
    f.kind = FactorKind::Swap;
    return f;
}

AutoFactor AutoFactor::triangular(Poly p) {
    const auto& vars = p.ring()->vars();
    for (std::size_t i = 1; i < vars.size(); ++i)
        if (Degree::of(0) < p.degree_in(vars[i]))
            throw ParameterConstraintViolated(
                "triangular factor needs a polynomial in " + vars[0] +
                " alone, got " + p.str());
    AutoFactor f;
    f.kind = FactorKind::Triangular;
    f.p = std::move(p);
    return f;
}

AutoFactor AutoFactor::diagonal(FieldValue xi) {
    if (xi.is_zero())
        throw ParameterConstraintViolated("diagonal factor needs xi != 0");
    AutoFactor f;
    f.kind = FactorKind::Diagonal;
    f.xi = std::move(xi);
    return f;
}

AutoFactor AutoFactor::translation(FieldValue c1, FieldValue c2) {
    require_matching_fields(c1, c2, "translation factor");
    AutoFactor f;
    f.kind = FactorKind::Translation;
    f.c1 = std::move(c1);
    f.c2 = std::move(c2);
    return f;
}

AutoFactor AutoFactor::affine_linear(FieldValue a, FieldValue b, FieldValue c,
                                     FieldValue d) {
    const FieldValue det = a * d - b * c;
    if (det.is_zero())
        throw ParameterConstraintViolated(
            "affine factor needs an invertible linear part");
    AutoFactor f;
    f.kind = FactorKind::AffineLinear;
    f.a = std::move(a);
    f.b = std::move(b);
    f.c = std::move(c);
    f.d = std::move(d);
    return f;
}

PlanePair factor_images(const RingPtr& ring, const AutoFactor& f) {
    require_plane_ring(ring);
    const Poly v1 = Poly::variable(ring, ring->vars()[0]);
    const Poly v2 = Poly::variable(ring, ring->vars()[1]);
    switch (f.kind) {
    case FactorKind::Swap:
        return {v2, v1};
    case FactorKind::Triangular:
        if (!f.p)
            throw ParameterConstraintViolated(
                "triangular factor without a polynomial");
        return {v1, v2 + evaluate_univariate(*f.p, v1)};
    case FactorKind::Diagonal:
        require_value_field(ring, f.xi, "diagonal scale");
        return {v1.scaled(f.xi), v2.scaled(f.xi.inverse())};
    case FactorKind::Translation:
        require_value_field(ring, f.c1, "translation shift");
        require_value_field(ring, f.c2, "translation shift");
        return {v1 + Poly::constant(ring, f.c1),
                v2 + Poly::constant(ring, f.c2)};
    case FactorKind::AffineLinear:
        require_value_field(ring, f.a, "linear entry");
        require_value_field(ring, f.d, "linear entry");
        return {v1.scaled(f.a) + v2.scaled(f.b),
                v1.scaled(f.c) + v2.scaled(f.d)};
    }
    throw Error("unknown factor kind");
}

PlanePair word_images(const AutomorphismWord& w) {
    require_plane_ring(w.ring);
    PlanePair cur{Poly::variable(w.ring, w.ring->vars()[0]),
                  Poly::variable(w.ring, w.ring->vars()[1])};
    for (const auto& f : w.factors) {
        const PlanePair step = factor_images(w.ring, f);
        const std::map<std::string, Poly> sub = {
            {w.ring->vars()[0], cur.first}, {w.ring->vars()[1], cur.second}};
        cur = {substitute(step.first, sub), substitute(step.second, sub)};
    }
    return cur;
}

FieldValue factor_determinant(const FieldPtr& k, const AutoFactor& f) {
    switch (f.kind) {
    case FactorKind::Swap:
        return FieldValue::from_integer(k, -1);
    case FactorKind::Triangular:
    case FactorKind::Diagonal:
    case FactorKind::Translation:
        return FieldValue::one(k);
    case FactorKind::AffineLinear:
        return f.a * f.d - f.b * f.c;
    }
    throw Error("unknown factor kind");
}

FieldValue word_jacobian(const AutomorphismWord& w) {
    require_plane_ring(w.ring);
    FieldValue j = FieldValue::one(w.ring->field());
    for (const auto& f : w.factors)
        j = j * factor_determinant(w.ring->field(), f);
    return j;
}

namespace {

std::vector<AutoFactor> cancel_swap_pairs(std::vector<AutoFactor> in) {
    std::vector<AutoFactor> out;
    for (auto& f : in) {
        if (f.kind == FactorKind::Swap && !out.empty() &&
            out.back().kind == FactorKind::Swap)
            out.pop_back();
        else
            out.push_back(std::move(f));
    }
    return out;
}

} // namespace

AutomorphismWord rewrite_to_elementary(const AutomorphismWord& w) {
    require_plane_ring(w.ring);
    const FieldPtr& k = w.ring->field();
    const Poly v1 = Poly::variable(w.ring, w.ring->vars()[0]);
    const FieldValue one = FieldValue::one(k);
    const FieldValue minus_one = -one;

    std::vector<AutoFactor> out;
    auto emit_swap = [&] { out.push_back(AutoFactor::swap()); };
    auto emit_shear = [&](const Poly& p) {
        if (!p.is_zero()) out.push_back(AutoFactor::triangular(p));
    };
    // (v1, v2) -> (v1 + p(v2), v2), conjugate of a shear by the swap
    auto emit_coshear = [&](const Poly& p) {
        if (p.is_zero()) return;
        emit_swap();
        emit_shear(p);
        emit_swap();
    };

    for (const auto& f : w.factors) {
        switch (f.kind) {
        case FactorKind::Swap:
        case FactorKind::Triangular:
            out.push_back(f);
            break;
        case FactorKind::Translation:
            emit_coshear(Poly::constant(w.ring, f.c1));
            emit_shear(Poly::constant(w.ring, f.c2));
            break;
        case FactorKind::Diagonal:
        case FactorKind::AffineLinear: {
            FieldValue a, b, c, d;
            if (f.kind == FactorKind::Diagonal) {
                a = f.xi;
                b = FieldValue::zero(k);
                c = FieldValue::zero(k);
                d = f.xi.inverse();
            } else {
                a = f.a;
                b = f.b;
                c = f.c;
                d = f.d;
            }
            const FieldValue det = a * d - b * c;
            if (det != one && det != minus_one)
                throw Error("only determinant +-1 linear maps factor through "
                            "swaps and shears; got determinant " + det.str());

            // Row-reduce (a b; c d) to the identity, recording each
            // elementary row operation; the applied word is then the
            // reversed list of their inverses.
            struct Op {
                int type; // 0 swap rows, 1 add s*row1 to row2, 2 add s*row2 to row1
                FieldValue s;
            };
            std::vector<Op> ops;
            auto rows_swap = [&] {
                ops.push_back({0, FieldValue()});
                std::swap(a, c);
                std::swap(b, d);
            };
            auto rows_lower = [&](const FieldValue& s) {
                if (s.is_zero()) return;
                ops.push_back({1, s});
                c = c + s * a;
                d = d + s * b;
            };
            auto rows_upper = [&](const FieldValue& s) {
                if (s.is_zero()) return;
                ops.push_back({2, s});
                a = a + s * c;
                b = b + s * d;
            };

            if (a.is_zero()) rows_swap();
            if (!c.is_zero()) rows_lower(-(c / a));
            if (!b.is_zero()) rows_upper(-(b / d));
            if (a * d == minus_one) {
                // turns diag(a, -1/a) into diag(a, 1/a)
                rows_swap();
                rows_lower(minus_one);
                rows_upper(one);
                rows_lower(minus_one);
            }
            if (a != one) {
                // clears diag(a, 1/a) with four shears; the script arguments
                // come from the value of a before these operations mutate it
                const FieldValue a0 = a;
                rows_lower(a0.inverse());
                rows_upper(one - a0);
                rows_lower(minus_one);
                rows_upper((a0 - one) / a0);
            }

            if (!(a == one && b.is_zero() && c.is_zero() && d == one))
                throw Error("row reduction did not reach the identity matrix");

            for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
                if (it->type == 0)
                    emit_swap();
                else if (it->type == 1)
                    emit_shear(v1.scaled(-it->s));
                else
                    emit_coshear(v1.scaled(-it->s));
            }
            break;
        }
        }
    }

    AutomorphismWord result{w.ring, cancel_swap_pairs(std::move(out))};
    const PlanePair before = word_images(w);
    const PlanePair after = word_images(result);
    if (before.first != after.first || before.second != after.second)
        throw IdentityFails("elementary rewriting changed the composed map");
    return result;
}

AutomorphismWord tame_decompose(const Poly& f, const Poly& g) {
    const RingPtr ring = f.ring();
    require_plane_ring(ring);
    if (!ring->same(*g.ring()))
        throw RingMismatch("both components must share one ring");
    const FieldPtr& k = ring->field();

    Poly F = f, G = g;
    std::vector<std::vector<AutoFactor>> blocks; // outermost block first

    // Peels univariate multiples of the lower component off the higher one
    // until both are affine.  Each round strictly reduces one total degree,
    // and a round that cannot reduce anything is a proof that (f, g) is not
    // an automorphism.
    while (finite_degree(F) > 1 || finite_degree(G) > 1) {
        const bool reduce_first = finite_degree(F) >= finite_degree(G);
        Poly& high = reduce_first ? F : G;
        const Poly& low = reduce_first ? G : F;
        const long low_deg = finite_degree(low);

        Poly shift(ring); // univariate in v1, accumulated
        if (low_deg >= 1) {
            while (true) {
                const long high_deg = finite_degree(high);
                if (high_deg < low_deg || high_deg % low_deg != 0) break;
                const auto e =
                    static_cast<unsigned long>(high_deg / low_deg);
                const Poly top = high.leading_form();
                const Poly low_pow = low.leading_form().pow(e);
                const FieldValue c =
                    top.terms().begin()->second /
                    low_pow.terms().begin()->second;
                if (top != low_pow.scaled(c)) break;
                shift.add_term({static_cast<std::uint32_t>(e), 0}, c);
                high = high - low.pow(e).scaled(c);
            }
        }
        if (shift.is_zero())
            throw DecompositionFailed(
                "no degree reduction at (" + F.str() + ", " + G.str() +
                "): the pair is not a tame automorphism");

        if (reduce_first)
            blocks.push_back({AutoFactor::swap(),
                              AutoFactor::triangular(shift),
                              AutoFactor::swap()});
        else
            blocks.push_back({AutoFactor::triangular(shift)});
    }

    const FieldValue a = F.coefficient({1, 0});
    const FieldValue b = F.coefficient({0, 1});
    const FieldValue c = G.coefficient({1, 0});
    const FieldValue d = G.coefficient({0, 1});
    const FieldValue det = a * d - b * c;
    if (det.is_zero())
        throw DecompositionFailed("affine stage is singular at (" + F.str() +
                                  ", " + G.str() + ")");

    const FieldValue one = FieldValue::one(k);
    std::vector<AutoFactor> factors;
    if (a == one && d == one && b.is_zero() && c.is_zero())
        ; // identity linear part
    else if (a.is_zero() && d.is_zero() && b == one && c == one)
        factors.push_back(AutoFactor::swap());
    else if (b.is_zero() && c.is_zero() && d == a.inverse())
        factors.push_back(AutoFactor::diagonal(a));
    else
        factors.push_back(AutoFactor::affine_linear(a, b, c, d));
    const FieldValue c1 = F.constant_coefficient();
    const FieldValue c2 = G.constant_coefficient();
    if (!c1.is_zero() || !c2.is_zero())
        factors.push_back(AutoFactor::translation(c1, c2));

    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it)
        for (auto& step : *it) factors.push_back(std::move(step));

    AutomorphismWord word{ring, cancel_swap_pairs(std::move(factors))};
    const PlanePair back = word_images(word);
    if (back.first != f || back.second != g)
        throw IdentityFails("tame factors do not recompose to the input pair");
    return word;
}

} // namespace qem

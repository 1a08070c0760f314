#include "qem/groebner.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "qem/errors.hpp"

namespace qem {

namespace {

// Basis element together with its expression over the original generators.
struct Tracked {
    Poly p;
    std::vector<Poly> cof;
};

std::vector<Poly> polys_of(const std::vector<Tracked>& g) {
    std::vector<Poly> out;
    out.reserve(g.size());
    for (const auto& t : g) out.push_back(t.p);
    return out;
}

// Full normal form of `s` against `g`, with the cofactor bookkeeping kept in
// step: result.p == s.p - sum q_k g[k].p and result.cof == s.cof - sum q_k
// g[k].cof.
Tracked reduce_tracked(const Tracked& s, const std::vector<Tracked>& g,
                       const MonomialOrder& order) {
    auto div = multivariate_divide(s.p, polys_of(g), order);
    Tracked r{std::move(div.remainder), s.cof};
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (div.quotients[k].is_zero()) continue;
        for (std::size_t i = 0; i < r.cof.size(); ++i)
            r.cof[i] = r.cof[i] - div.quotients[k] * g[k].cof[i];
    }
    return r;
}

struct Pair {
    std::size_t i, j;
    Exponents lcm;
};

void verify_tracked(const Tracked& t, const std::vector<Poly>& gens) {
    Poly expand = Poly::zero(t.p.ring());
    for (std::size_t i = 0; i < gens.size(); ++i) expand = expand + t.cof[i] * gens[i];
    if (expand != t.p) throw IdentityFails("tracked basis element fails to re-expand over the generators");
}

} // namespace

IdealBasis::IdealBasis(std::vector<Poly> generators, MonomialOrder order)
    : gens_(std::move(generators)), order_(std::move(order)) {
    if (gens_.empty()) throw Error("ideal basis needs at least one generator");
    for (const Poly& g : gens_) {
        if (g.is_zero()) throw CoefficientError("ideal generators must be nonzero");
        if (!g.ring()->same(*order_.ring())) throw RingMismatch("generator ring mismatch");
    }
}

IdealBasis IdealBasis::of(std::vector<Poly> generators) {
    if (generators.empty()) throw Error("ideal basis needs at least one generator");
    auto order = MonomialOrder::default_order(generators.front().ring());
    return IdealBasis(std::move(generators), std::move(order));
}

const GroebnerBasis& IdealBasis::groebner() const {
    if (!gb_) throw Error("Groebner cache not computed; call buchberger first");
    return *gb_;
}

IdealBasis buchberger(const IdealBasis& basis, std::size_t budget) {
    if (budget == 0) throw Error("buchberger budget must be positive");
    const MonomialOrder& order = basis.order();
    const RingPtr& ring = basis.ring();
    const std::vector<Poly>& gens = basis.generators();

    std::vector<Tracked> g;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        std::vector<Poly> cof(gens.size(), Poly::zero(ring));
        cof[i] = Poly::one(ring);
        g.push_back(Tracked{gens[i], std::move(cof)});
    }

    auto lead = [&](std::size_t i) { return order.leading_exponent(g[i].p); };

    std::vector<Pair> pending;
    std::set<std::pair<std::size_t, std::size_t>> handled;
    auto queue_pairs_with = [&](std::size_t j) {
        for (std::size_t i = 0; i < j; ++i)
            pending.push_back(Pair{i, j, exp_lcm(lead(i), lead(j))});
    };
    for (std::size_t j = 1; j < g.size(); ++j) queue_pairs_with(j);

    std::size_t reductions = 0;
    while (!pending.empty()) {
        // Normal selection: smallest lcm first, ties by index.
        std::size_t best = 0;
        for (std::size_t k = 1; k < pending.size(); ++k) {
            const int c = order.compare(pending[k].lcm, pending[best].lcm);
            if (c < 0 || (c == 0 && std::make_pair(pending[k].i, pending[k].j) <
                                        std::make_pair(pending[best].i, pending[best].j)))
                best = k;
        }
        const Pair pr = pending[best];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
        handled.insert({pr.i, pr.j});

        const Exponents li = lead(pr.i), lj = lead(pr.j);
        // Product criterion: coprime leading monomials.
        if (pr.lcm == exp_add(li, lj)) continue;
        // Chain criterion: some third element divides the lcm and both of
        // its pairs with i and j were already handled.
        bool chained = false;
        for (std::size_t k = 0; k < g.size() && !chained; ++k) {
            if (k == pr.i || k == pr.j) continue;
            if (!exp_divides(lead(k), pr.lcm)) continue;
            const auto a = std::minmax(pr.i, k), b = std::minmax(pr.j, k);
            if (handled.count({a.first, a.second}) && handled.count({b.first, b.second}))
                chained = true;
        }
        if (chained) continue;

        if (++reductions > budget)
            throw BudgetExceeded("S-pair budget exhausted after " + std::to_string(budget) +
                                 " reductions");

        const auto lti = order.leading_term(g[pr.i].p);
        const auto ltj = order.leading_term(g[pr.j].p);
        const Poly mi = Poly::monomial(ring, exp_sub(pr.lcm, lti.first), lti.second.inverse());
        const Poly mj = Poly::monomial(ring, exp_sub(pr.lcm, ltj.first), ltj.second.inverse());
        Tracked s{mi * g[pr.i].p - mj * g[pr.j].p, {}};
        s.cof.reserve(gens.size());
        for (std::size_t i = 0; i < gens.size(); ++i)
            s.cof.push_back(mi * g[pr.i].cof[i] - mj * g[pr.j].cof[i]);

        Tracked r = reduce_tracked(s, g, order);
        if (r.p.is_zero()) continue;
        g.push_back(std::move(r));
        queue_pairs_with(g.size() - 1);
    }

    // Minimal basis: drop elements whose leading monomial another element divides.
    std::vector<bool> keep(g.size(), true);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size() && keep[i]; ++j) {
            if (i == j || !keep[j]) continue;
            const Exponents li = lead(i), lj = lead(j);
            if (li == lj) {
                if (j < i) keep[i] = false;
            } else if (exp_divides(lj, li)) {
                keep[i] = false;
            }
        }
    }
    std::vector<Tracked> minimal;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (keep[i]) minimal.push_back(std::move(g[i]));

    // Monic normalization, then inter-reduce tails to the unique reduced basis.
    for (auto& t : minimal) {
        const FieldValue lc = order.leading_term(t.p).second;
        const FieldValue inv = lc.inverse();
        t.p = t.p.scaled(inv);
        for (auto& c : t.cof) c = c.scaled(inv);
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < minimal.size(); ++i) {
            std::vector<Tracked> others;
            for (std::size_t j = 0; j < minimal.size(); ++j)
                if (j != i) others.push_back(minimal[j]);
            if (others.empty()) break;
            Tracked r = reduce_tracked(minimal[i], others, order);
            if (r.p != minimal[i].p) {
                minimal[i] = std::move(r);
                changed = true;
            }
        }
    }

    std::sort(minimal.begin(), minimal.end(), [&](const Tracked& a, const Tracked& b) {
        return order.compare(order.leading_exponent(a.p), order.leading_exponent(b.p)) < 0;
    });

    // Final checks: decompositions re-expand, the original generators still
    // reduce to zero, and every S-polynomial reduces to zero against the
    // finished basis.
    for (const auto& t : minimal) verify_tracked(t, gens);
    const std::vector<Poly> elems = polys_of(minimal);
    for (const Poly& gen : gens) {
        if (!multivariate_divide(gen, elems, order).remainder.is_zero())
            throw IdentityFails("completed basis fails to reduce an original generator to zero");
    }
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (std::size_t j = i + 1; j < elems.size(); ++j) {
            const auto lti = order.leading_term(elems[i]);
            const auto ltj = order.leading_term(elems[j]);
            const Exponents l = exp_lcm(lti.first, ltj.first);
            const Poly mi = Poly::monomial(ring, exp_sub(l, lti.first), lti.second.inverse());
            const Poly mj = Poly::monomial(ring, exp_sub(l, ltj.first), ltj.second.inverse());
            const Poly s = mi * elems[i] - mj * elems[j];
            if (!multivariate_divide(s, elems, order).remainder.is_zero())
                throw IdentityFails("completed basis has a nonzero S-polynomial remainder");
        }
    }

    GroebnerBasis gb;
    gb.elements = elems;
    for (const auto& t : minimal) gb.over_generators.push_back(t.cof);
    gb.complete = true;

    IdealBasis out = basis;
    out.gb_ = std::move(gb);
    return out;
}

Membership ideal_membership(const Poly& f, const IdealBasis& basis, std::size_t budget) {
    if (!f.ring()->same(*basis.ring())) throw RingMismatch("membership query ring mismatch");
    const IdealBasis completed = basis.has_groebner() ? basis : buchberger(basis, budget);
    const GroebnerBasis& gb = completed.groebner();

    auto div = multivariate_divide(f, gb.elements, basis.order());
    if (!div.remainder.is_zero())
        return Membership{false, {}, std::move(div.remainder)};

    const std::vector<Poly>& gens = basis.generators();
    std::vector<Poly> cof(gens.size(), Poly::zero(f.ring()));
    for (std::size_t j = 0; j < gb.elements.size(); ++j) {
        if (div.quotients[j].is_zero()) continue;
        for (std::size_t i = 0; i < gens.size(); ++i)
            cof[i] = cof[i] + div.quotients[j] * gb.over_generators[j][i];
    }
    Poly expand = Poly::zero(f.ring());
    for (std::size_t i = 0; i < gens.size(); ++i) expand = expand + cof[i] * gens[i];
    if (expand != f) throw IdentityFails("membership cofactors fail to re-expand to the query");
    return Membership{true, std::move(cof), Poly::zero(f.ring())};
}

Poly normal_form(const Poly& f, const IdealBasis& basis, std::size_t budget) {
    if (!f.ring()->same(*basis.ring())) throw RingMismatch("normal form query ring mismatch");
    const IdealBasis completed = basis.has_groebner() ? basis : buchberger(basis, budget);
    return multivariate_divide(f, completed.groebner().elements, basis.order()).remainder;
}

} // namespace qem

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qem/division.hpp"
#include "qem/order.hpp"
#include "qem/poly.hpp"

namespace qem {

inline constexpr std::size_t kDefaultSPairBudget = 10000;

struct GroebnerBasis {
    // Reduced basis: monic, no element's leading monomial divides another's,
    // every element fully reduced against the rest; sorted by ascending
    // leading monomial.
    std::vector<Poly> elements;
    // elements[j] == sum over i of over_generators[j][i] * generator[i],
    // verified by expansion before the basis is returned.
    std::vector<std::vector<Poly>> over_generators;
    // True once every S-polynomial of `elements` has been re-checked to
    // reduce to zero.
    bool complete = false;
};

class IdealBasis {
public:
    IdealBasis(std::vector<Poly> generators, MonomialOrder order);

    // Convenience: default graded-lex significance for the ring.
    static IdealBasis of(std::vector<Poly> generators);

    const std::vector<Poly>& generators() const { return gens_; }
    const MonomialOrder& order() const { return order_; }
    const RingPtr& ring() const { return order_.ring(); }

    bool has_groebner() const { return gb_.has_value(); }
    const GroebnerBasis& groebner() const;

private:
    friend IdealBasis buchberger(const IdealBasis&, std::size_t);
    std::vector<Poly> gens_;
    MonomialOrder order_;
    std::optional<GroebnerBasis> gb_;
};

// Completes the basis to a reduced Groebner basis, tracking how each output
// element decomposes over the input generators.  The budget bounds the
// number of S-polynomial reductions; exceeding it throws BudgetExceeded.
// Every S-polynomial of the result is verified to reduce to zero and every
// tracked decomposition is re-expanded before returning.
IdealBasis buchberger(const IdealBasis& basis, std::size_t budget = kDefaultSPairBudget);

struct Membership {
    bool is_member;
    // When member: f == sum cofactors[i] * generators[i], verified by
    // expansion.  Empty otherwise.
    std::vector<Poly> cofactors;
    // Canonical normal form of f; zero exactly when member.
    Poly remainder;
};

Membership ideal_membership(const Poly& f, const IdealBasis& basis,
                            std::size_t budget = kDefaultSPairBudget);

// Remainder of f on division by the (computed if absent) Groebner basis.
Poly normal_form(const Poly& f, const IdealBasis& basis,
                 std::size_t budget = kDefaultSPairBudget);

} // namespace qem

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qem/poly.hpp"

namespace qem {

enum class OrderKind { GradedLex, Lex };

// Exponent-vector helpers shared by division and basis completion.
bool exp_divides(const Exponents& a, const Exponents& b); // a | b componentwise
Exponents exp_add(const Exponents& a, const Exponents& b);
Exponents exp_sub(const Exponents& a, const Exponents& b); // requires b | a
Exponents exp_lcm(const Exponents& a, const Exponents& b);

// A monomial order on a fixed ring: graded-lex or pure lex over a chosen
// significance permutation of the ring's variables (most significant first).
class MonomialOrder {
public:
    // `significance` lists every ring variable exactly once, most
    // significant first.
    static MonomialOrder graded_lex(RingPtr ring, const std::vector<std::string>& significance);
    static MonomialOrder lex(RingPtr ring, const std::vector<std::string>& significance);

    // Graded-lex with the workbench's standard significance s > x > y > z >
    // t > u for the coordinate names that appear in the quadric rings; any
    // other variable outranks these, in ring declaration order.
    static MonomialOrder default_order(RingPtr ring);

    OrderKind kind() const { return kind_; }
    const RingPtr& ring() const { return ring_; }
    // Variable indices into the ring's list, most significant first.
    const std::vector<std::size_t>& significance() const { return sig_; }

    // <0 when a is smaller, 0 on equality, >0 when a is larger.
    int compare(const Exponents& a, const Exponents& b) const;
    bool less(const Exponents& a, const Exponents& b) const { return compare(a, b) < 0; }

    // Leading term of a nonzero polynomial under this order.
    std::pair<Exponents, FieldValue> leading_term(const Poly& f) const;
    Exponents leading_exponent(const Poly& f) const;

    std::string str() const;

private:
    MonomialOrder(OrderKind kind, RingPtr ring, std::vector<std::size_t> sig)
        : kind_(kind), ring_(std::move(ring)), sig_(std::move(sig)) {}

    OrderKind kind_;
    RingPtr ring_;
    std::vector<std::size_t> sig_;
};

} // namespace qem

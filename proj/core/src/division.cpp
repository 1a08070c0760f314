#include "qem/division.hpp"

#include <cassert>

#include "qem/errors.hpp"

namespace qem {

DivisionResult multivariate_divide(const Poly& f, const std::vector<Poly>& divisors,
                                   const MonomialOrder& order) {
    const RingPtr& ring = f.ring();
    if (!ring->same(*order.ring()))
        throw RingMismatch("dividend ring does not match the order's ring");
    std::vector<std::pair<Exponents, FieldValue>> lead;
    lead.reserve(divisors.size());
    for (const Poly& d : divisors) {
        if (!d.ring()->same(*ring)) throw RingMismatch("divisor ring mismatch");
        if (d.is_zero()) throw CoefficientError("division by the zero polynomial");
        lead.push_back(order.leading_term(d));
    }

    std::vector<Poly> quotients(divisors.size(), Poly::zero(ring));
    Poly remainder = Poly::zero(ring);
    Poly p = f;

    while (!p.is_zero()) {
        const auto [le, lc] = order.leading_term(p);
        bool reduced = false;
        for (std::size_t i = 0; i < divisors.size(); ++i) {
            if (!exp_divides(lead[i].first, le)) continue;
            const Exponents me = exp_sub(le, lead[i].first);
            const FieldValue mc = lc / lead[i].second;
            const Poly mono = Poly::monomial(ring, me, mc);
            quotients[i] = quotients[i] + mono;
            p = p - mono * divisors[i];
            reduced = true;
            break;
        }
        if (!reduced) {
            const Poly mono = Poly::monomial(ring, le, lc);
            remainder = remainder + mono;
            p = p - mono;
        }
    }

#ifndef NDEBUG
    Poly expand = remainder;
    for (std::size_t i = 0; i < divisors.size(); ++i) expand = expand + quotients[i] * divisors[i];
    assert(expand == f);
#endif

    return DivisionResult{std::move(quotients), std::move(remainder)};
}

} // namespace qem

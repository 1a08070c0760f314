#pragma once

#include <vector>

#include "qem/order.hpp"
#include "qem/poly.hpp"

namespace qem {

struct DivisionResult {
    std::vector<Poly> quotients; // one per divisor, in list order
    Poly remainder;
};

// Multivariate division with remainder: f = sum quotients[i]*divisors[i] +
// remainder, where no remainder monomial is divisible by any divisor's
// leading monomial.  When several leading monomials divide, the first
// divisor in list order wins.
DivisionResult multivariate_divide(const Poly& f, const std::vector<Poly>& divisors,
                                   const MonomialOrder& order);

} // namespace qem

#pragma once

// Independent membership oracle for prime-field ideals: decides whether
// f = sum q_i * g_i has a solution with deg q_i <= bound by Gaussian
// elimination on the monomial coefficient matrix, never touching the
// Groebner machinery under test.

#include <cstdint>
#include <map>
#include <vector>

#include "qem/poly.hpp"

namespace qemtest {

namespace detail {

inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    std::int64_t t = 0, nt = 1, r = static_cast<std::int64_t>(p), nr = static_cast<std::int64_t>(a % p);
    while (nr != 0) {
        const std::int64_t q = r / nr;
        t -= q * nt;
        std::swap(t, nt);
        r -= q * nr;
        std::swap(r, nr);
    }
    if (t < 0) t += static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(t);
}

inline void enumerate_monomials(std::size_t pos, std::uint32_t remaining, qem::Exponents& cur,
                                std::vector<qem::Exponents>& out) {
    if (pos + 1 == cur.size()) {
        for (std::uint32_t e = 0; e <= remaining; ++e) {
            cur[pos] = e;
            out.push_back(cur);
        }
        cur[pos] = 0;
        return;
    }
    for (std::uint32_t e = 0; e <= remaining; ++e) {
        cur[pos] = e;
        enumerate_monomials(pos + 1, remaining - e, cur, out);
    }
    cur[pos] = 0;
}

} // namespace detail

inline bool span_membership(const qem::Poly& f, const std::vector<qem::Poly>& gens, long bound) {
    using namespace qem;
    const RingPtr& ring = f.ring();
    const std::uint64_t p = ring->field()->modulus();
    if (bound < 0) bound = 0;

    std::vector<Exponents> monos;
    Exponents cur(ring->arity(), 0);
    detail::enumerate_monomials(0, static_cast<std::uint32_t>(bound), cur, monos);

    // Column polynomials m * g_i; rows indexed by every exponent seen.
    std::map<Exponents, std::size_t> row_of;
    auto row_index = [&](const Exponents& e) {
        return row_of.emplace(e, row_of.size()).first->second;
    };
    std::vector<std::map<std::size_t, std::uint64_t>> cols;
    for (const Poly& g : gens) {
        for (const Exponents& m : monos) {
            const Poly prod = Poly::monomial(ring, m, FieldValue::one(ring->field())) * g;
            std::map<std::size_t, std::uint64_t> col;
            for (const auto& [e, c] : prod.terms()) col[row_index(e)] = c.residue();
            cols.push_back(std::move(col));
        }
    }
    std::map<std::size_t, std::uint64_t> rhs_sparse;
    for (const auto& [e, c] : f.terms()) rhs_sparse[row_index(e)] = c.residue();

    const std::size_t rows = row_of.size(), ncols = cols.size();
    std::vector<std::vector<std::uint64_t>> a(rows, std::vector<std::uint64_t>(ncols, 0));
    std::vector<std::uint64_t> rhs(rows, 0);
    for (std::size_t j = 0; j < ncols; ++j)
        for (const auto& [i, v] : cols[j]) a[i][j] = v;
    for (const auto& [i, v] : rhs_sparse) rhs[i] = v;

    std::size_t rank = 0;
    for (std::size_t j = 0; j < ncols && rank < rows; ++j) {
        std::size_t pivot = rank;
        while (pivot < rows && a[pivot][j] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[rank]);
        std::swap(rhs[pivot], rhs[rank]);
        const std::uint64_t inv = detail::inv_mod(a[rank][j], p);
        for (std::size_t k = j; k < ncols; ++k) a[rank][k] = a[rank][k] * inv % p;
        rhs[rank] = rhs[rank] * inv % p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == rank || a[i][j] == 0) continue;
            const std::uint64_t factor = a[i][j];
            for (std::size_t k = j; k < ncols; ++k)
                a[i][k] = (a[i][k] + (p - factor) * a[rank][k]) % p;
            rhs[i] = (rhs[i] + (p - factor) * rhs[rank]) % p;
        }
        ++rank;
    }
    for (std::size_t i = rank; i < rows; ++i)
        if (rhs[i] != 0) return false;
    return true;
}

} // namespace qemtest

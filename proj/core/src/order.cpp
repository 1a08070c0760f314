#include "qem/order.hpp"

#include <algorithm>
#include <map>

#include "qem/errors.hpp"

namespace qem {

bool exp_divides(const Exponents& a, const Exponents& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

Exponents exp_add(const Exponents& a, const Exponents& b) {
    Exponents r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Exponents exp_sub(const Exponents& a, const Exponents& b) {
    Exponents r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (b[i] > a[i]) throw Error("exponent subtraction underflow");
        r[i] = a[i] - b[i];
    }
    return r;
}

Exponents exp_lcm(const Exponents& a, const Exponents& b) {
    Exponents r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
    return r;
}

namespace {

std::vector<std::size_t> permutation_from_names(const RingPtr& ring,
                                                const std::vector<std::string>& significance) {
    if (significance.size() != ring->arity())
        throw Error("monomial order significance list must mention every variable once");
    std::vector<std::size_t> sig;
    std::vector<bool> seen(ring->arity(), false);
    sig.reserve(significance.size());
    for (const auto& name : significance) {
        const std::size_t i = ring->index_of_checked(name);
        if (seen[i]) throw Error("monomial order significance list repeats '" + name + "'");
        seen[i] = true;
        sig.push_back(i);
    }
    return sig;
}

} // namespace

MonomialOrder MonomialOrder::graded_lex(RingPtr ring, const std::vector<std::string>& significance) {
    auto sig = permutation_from_names(ring, significance);
    return MonomialOrder(OrderKind::GradedLex, std::move(ring), std::move(sig));
}

MonomialOrder MonomialOrder::lex(RingPtr ring, const std::vector<std::string>& significance) {
    auto sig = permutation_from_names(ring, significance);
    return MonomialOrder(OrderKind::Lex, std::move(ring), std::move(sig));
}

MonomialOrder MonomialOrder::default_order(RingPtr ring) {
    static const std::map<std::string, int> rank{{"u", 0}, {"t", 1}, {"z", 2},
                                                 {"y", 3}, {"x", 4}, {"s", 5}};
    std::vector<std::size_t> sig(ring->arity());
    for (std::size_t i = 0; i < sig.size(); ++i) sig[i] = i;
    const auto& vars = ring->vars();
    std::stable_sort(sig.begin(), sig.end(), [&](std::size_t a, std::size_t b) {
        const auto ra = rank.find(vars[a]), rb = rank.find(vars[b]);
        const bool ka = ra != rank.end(), kb = rb != rank.end();
        if (ka != kb) return !ka; // unranked names outrank the standard ones
        if (!ka) return false;    // keep declaration order among unranked names
        return ra->second > rb->second;
    });
    return MonomialOrder(OrderKind::GradedLex, std::move(ring), std::move(sig));
}

int MonomialOrder::compare(const Exponents& a, const Exponents& b) const {
    if (kind_ == OrderKind::GradedLex) {
        const auto da = total_degree_of(a), db = total_degree_of(b);
        if (da != db) return da < db ? -1 : 1;
    }
    for (const std::size_t i : sig_) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

std::pair<Exponents, FieldValue> MonomialOrder::leading_term(const Poly& f) const {
    if (f.is_zero()) throw Error("leading term of the zero polynomial");
    if (!f.ring()->same(*ring_)) throw RingMismatch("polynomial ring does not match the order's ring");
    auto best = f.terms().begin();
    for (auto it = std::next(best); it != f.terms().end(); ++it) {
        if (compare(it->first, best->first) > 0) best = it;
    }
    return {best->first, best->second};
}

Exponents MonomialOrder::leading_exponent(const Poly& f) const {
    return leading_term(f).first;
}

std::string MonomialOrder::str() const {
    std::string s = kind_ == OrderKind::GradedLex ? "grlex(" : "lex(";
    for (std::size_t i = 0; i < sig_.size(); ++i) {
        if (i) s += " > ";
        s += ring_->vars()[sig_[i]];
    }
    return s + ")";
}

} // namespace qem

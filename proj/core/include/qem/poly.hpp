#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qem/field.hpp"

namespace qem {

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

// Polynomial ring descriptor: a coefficient field plus a fixed, ordered list
// of variable names.  The list order is the graded-lex precedence used for
// canonical term storage and printing (earlier = more significant).
class Ring {
public:
    static RingPtr make(FieldPtr field, std::vector<std::string> vars);

    const FieldPtr& field() const { return field_; }
    const std::vector<std::string>& vars() const { return vars_; }
    std::size_t arity() const { return vars_.size(); }
    std::optional<std::size_t> index_of(const std::string& name) const;
    std::size_t index_of_checked(const std::string& name) const;
    bool same(const Ring& o) const;
    std::string name() const;

private:
    Ring() = default;
    FieldPtr field_;
    std::vector<std::string> vars_;
};

using Exponents = std::vector<std::uint32_t>;

inline std::uint64_t total_degree_of(const Exponents& e) {
    std::uint64_t s = 0;
    for (auto x : e) s += x;
    return s;
}

// Descending graded-lex: higher total degree first; ties broken
// lexicographically with the ring's first variable most significant.
struct GrlexDescending {
    bool operator()(const Exponents& a, const Exponents& b) const {
        const auto da = total_degree_of(a), db = total_degree_of(b);
        if (da != db) return da > db;
        return a > b;
    }
};

// Total degree with a distinguished value for the zero polynomial.
class Degree {
public:
    static Degree minus_infinity() { return Degree(); }
    static Degree of(long v) {
        Degree d;
        d.finite_ = true;
        d.value_ = v;
        return d;
    }
    bool is_minus_infinity() const { return !finite_; }
    long value() const;
    bool operator==(const Degree& o) const {
        return finite_ == o.finite_ && (!finite_ || value_ == o.value_);
    }
    bool operator<(const Degree& o) const {
        if (!finite_) return o.finite_;
        if (!o.finite_) return false;
        return value_ < o.value_;
    }
    bool operator<=(const Degree& o) const { return *this < o || *this == o; }
    std::string str() const { return finite_ ? std::to_string(value_) : "-inf"; }

private:
    bool finite_ = false;
    long value_ = 0;
};

// Sparse multivariate polynomial in canonical form: term map sorted in
// descending graded-lex order, no zero coefficients stored.
class Poly {
public:
    using TermMap = std::map<Exponents, FieldValue, GrlexDescending>;

    explicit Poly(RingPtr ring) : ring_(std::move(ring)) {}

    static Poly zero(RingPtr ring) { return Poly(std::move(ring)); }
    static Poly one(RingPtr ring);
    static Poly constant(RingPtr ring, const FieldValue& c);
    static Poly from_integer(RingPtr ring, long n);
    static Poly variable(RingPtr ring, const std::string& name);
    static Poly monomial(RingPtr ring, Exponents e, const FieldValue& c);

    const RingPtr& ring() const { return ring_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // Coefficient of the constant monomial (zero if absent).
    FieldValue constant_coefficient() const;
    // The value of a constant polynomial; throws if non-constant.
    FieldValue as_constant() const;
    FieldValue coefficient(const Exponents& e) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator-() const;
    Poly pow(unsigned long e) const;
    Poly scaled(const FieldValue& c) const;

    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly derivative(const std::string& var) const;

    Degree total_degree() const;
    Degree degree_in(const std::string& var) const;
    // Homogeneous component of top total degree (zero poly for zero input).
    Poly leading_form() const;
    // Coefficient of var^k viewed as a polynomial in the remaining variables
    // (still expressed in the same ring, with var-exponent zero).
    Poly coefficient_in(const std::string& var, std::uint32_t k) const;

    std::string str() const;

    // Internal-use mutator: adds c*x^e and drops the term if it cancels.
    void add_term(const Exponents& e, const FieldValue& c);

private:
    RingPtr ring_;
    TermMap terms_;
    void require_same_ring(const Poly& o) const;
};

struct DegreeData {
    Degree degree;
    Poly leading; // leading form (total view) or coefficient poly (variable view)
};

DegreeData degree_data_total(const Poly& f);
DegreeData degree_data_in_var(const Poly& f, const std::string& var);

// Applies the ring homomorphism sending each variable of f's ring to its
// image; every variable occurring in f must have an image, and all images
// must share one ring over the same coefficient field.
Poly substitute(const Poly& f, const std::map<std::string, Poly>& images);

Poly partial_derivative(const Poly& f, const std::string& var);

Poly jacobian_det(const Poly& f, const Poly& g, const std::string& v1,
                  const std::string& v2);

// 2x2 polynomial matrix (a b; c d) over a common ring.
struct Matrix2 {
    Poly a, b, c, d;

    static Matrix2 identity(const RingPtr& ring);
    static Matrix2 from_scalars(const RingPtr& ring, const FieldValue& a,
                                const FieldValue& b, const FieldValue& c,
                                const FieldValue& d);
    Matrix2 mul(const Matrix2& o) const;
    Poly det() const;
};

} // namespace qem

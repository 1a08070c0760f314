#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "qem/errors.hpp"

namespace qem {

class FieldDescriptor;
using FieldPtr = std::shared_ptr<const FieldDescriptor>;

enum class FieldKind { Rationals, PrimeField, RationalFunctions };

// Immutable description of a coefficient field: Q, F_p, or a rational-function
// field base(parameter).  Rational-function nesting is capped at depth 2.
class FieldDescriptor {
public:
    static FieldPtr rationals();
    static FieldPtr prime_field(std::uint32_t p);
    static FieldPtr rational_functions(FieldPtr base, std::string parameter);

    FieldKind kind() const { return kind_; }
    std::uint32_t modulus() const;
    const FieldPtr& base() const;
    const std::string& parameter() const;

    std::uint32_t characteristic() const;
    int nesting_depth() const;
    bool same(const FieldDescriptor& other) const;
    // True if `name` is the function-field parameter at some nesting level.
    bool has_parameter(const std::string& name) const;
    std::string name() const;

private:
    FieldDescriptor() = default;
    FieldKind kind_ = FieldKind::Rationals;
    std::uint32_t modulus_ = 0;
    FieldPtr base_;
    std::string parameter_;
};

class FieldValue;

// Dense univariate polynomial over the base field, ascending coefficients,
// no trailing zeros; the empty vector is the zero polynomial.
using UniPoly = std::vector<FieldValue>;

struct RatFunc {
    UniPoly num;
    UniPoly den; // monic, gcd(num, den) = 1, never zero
};

// One exact element of a FieldDescriptor, always in canonical form:
// rationals in lowest terms (positive denominator), residues in [0, p),
// rational functions reduced with monic denominator.
class FieldValue {
public:
    FieldValue() = default; // zero of Q; placeholder before assignment

    static FieldValue zero(const FieldPtr& k);
    static FieldValue one(const FieldPtr& k);
    static FieldValue from_integer(const FieldPtr& k, long n);
    static FieldValue from_mpz(const FieldPtr& k, const mpz_class& n);
    static FieldValue from_mpq(const FieldPtr& k, const mpq_class& q);
    // The distinguished parameter t of k(t); k must be a function field.
    static FieldValue parameter(const FieldPtr& k);
    // Embed an element of k's base field into k as a constant.
    static FieldValue embed(const FieldPtr& k, const FieldValue& base_value);
    // Resolve `name` as the parameter of k or of a nested base field.
    static FieldValue parameter_by_name(const FieldPtr& k, const std::string& name);

    const FieldPtr& field() const { return field_; }

    bool is_zero() const;
    bool is_one() const;

    FieldValue operator+(const FieldValue& o) const;
    FieldValue operator-(const FieldValue& o) const;
    FieldValue operator*(const FieldValue& o) const;
    FieldValue operator/(const FieldValue& o) const;
    FieldValue operator-() const;
    FieldValue inverse() const;
    FieldValue pow(long e) const;

    bool operator==(const FieldValue& o) const;
    bool operator!=(const FieldValue& o) const { return !(*this == o); }

    // True for negative rationals; false for residues and rational functions
    // (used by the printer to decide between "+ c" and "- |c|").
    bool print_as_negative() const;
    FieldValue abs_for_print() const;
    // True when str() needs parentheses before "*monomial".
    bool compound_str() const;
    std::string str() const;

    // Payload accessors (checked).
    const mpq_class& rational() const;
    std::uint64_t residue() const;
    const RatFunc& fraction() const;

private:
    FieldPtr field_ = nullptr; // nullptr means "zero of Q" placeholder
    std::variant<mpq_class, std::uint64_t, std::shared_ptr<const RatFunc>> payload_ =
        mpq_class(0);

    void require_same_field(const FieldValue& o) const;
};

// Dense univariate helpers over an arbitrary base field (used by RatFunc and
// by a few callers that need exact univariate gcd/division).
namespace uni {
UniPoly trim(UniPoly p);
bool is_zero(const UniPoly& p);
int degree(const UniPoly& p); // -1 for zero
UniPoly add(const UniPoly& a, const UniPoly& b);
UniPoly sub(const UniPoly& a, const UniPoly& b);
UniPoly mul(const UniPoly& a, const UniPoly& b);
UniPoly scale(const UniPoly& a, const FieldValue& c);
// Exact Euclidean division: a = q*b + r with deg r < deg b.
void divmod(const UniPoly& a, const UniPoly& b, UniPoly& q, UniPoly& r);
UniPoly gcd(UniPoly a, UniPoly b); // monic gcd
} // namespace uni

} // namespace qem

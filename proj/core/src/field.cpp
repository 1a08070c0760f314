#include "qem/field.hpp"

#include <algorithm>
#include <sstream>

namespace qem {

// ---------------------------------------------------------------- descriptor

namespace {

bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

} // namespace

FieldPtr FieldDescriptor::rationals() {
    static FieldPtr q = [] {
        auto d = new FieldDescriptor();
        d->kind_ = FieldKind::Rationals;
        return FieldPtr(d);
    }();
    return q;
}

FieldPtr FieldDescriptor::prime_field(std::uint32_t p) {
    if (p >= (1u << 31))
        throw UnsupportedField("prime-field modulus must be < 2^31");
    if (!is_prime_u32(p))
        throw UnsupportedField("modulus " + std::to_string(p) + " is not prime");
    auto d = new FieldDescriptor();
    d->kind_ = FieldKind::PrimeField;
    d->modulus_ = p;
    return FieldPtr(d);
}

FieldPtr FieldDescriptor::rational_functions(FieldPtr base, std::string parameter) {
    if (!base) throw UnsupportedField("null base field");
    if (base->nesting_depth() >= 2)
        throw UnsupportedField("rational-function nesting deeper than 2 is not supported");
    if (parameter.empty())
        throw UnsupportedField("empty function-field parameter name");
    if (base->has_parameter(parameter))
        throw UnsupportedField("parameter '" + parameter + "' already used by the base field");
    auto d = new FieldDescriptor();
    d->kind_ = FieldKind::RationalFunctions;
    d->base_ = std::move(base);
    d->parameter_ = std::move(parameter);
    return FieldPtr(d);
}

std::uint32_t FieldDescriptor::modulus() const {
    if (kind_ != FieldKind::PrimeField)
        throw UnsupportedField("modulus() on a non prime field");
    return modulus_;
}

const FieldPtr& FieldDescriptor::base() const {
    if (kind_ != FieldKind::RationalFunctions)
        throw UnsupportedField("base() on a non function field");
    return base_;
}

const std::string& FieldDescriptor::parameter() const {
    if (kind_ != FieldKind::RationalFunctions)
        throw UnsupportedField("parameter() on a non function field");
    return parameter_;
}

std::uint32_t FieldDescriptor::characteristic() const {
    switch (kind_) {
    case FieldKind::Rationals: return 0;
    case FieldKind::PrimeField: return modulus_;
    case FieldKind::RationalFunctions: return base_->characteristic();
    }
    return 0;
}

int FieldDescriptor::nesting_depth() const {
    return kind_ == FieldKind::RationalFunctions ? 1 + base_->nesting_depth() : 0;
}

bool FieldDescriptor::same(const FieldDescriptor& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
    case FieldKind::Rationals: return true;
    case FieldKind::PrimeField: return modulus_ == other.modulus_;
    case FieldKind::RationalFunctions:
        return parameter_ == other.parameter_ && base_->same(*other.base_);
    }
    return false;
}

bool FieldDescriptor::has_parameter(const std::string& name) const {
    if (kind_ != FieldKind::RationalFunctions) return false;
    return parameter_ == name || base_->has_parameter(name);
}

std::string FieldDescriptor::name() const {
    switch (kind_) {
    case FieldKind::Rationals: return "Q";
    case FieldKind::PrimeField: return "F_" + std::to_string(modulus_);
    case FieldKind::RationalFunctions: return base_->name() + "(" + parameter_ + ")";
    }
    return "?";
}

// ------------------------------------------------------------------ uni poly

namespace uni {

UniPoly trim(UniPoly p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
    return p;
}

bool is_zero(const UniPoly& p) { return p.empty(); }

int degree(const UniPoly& p) { return static_cast<int>(p.size()) - 1; }

UniPoly add(const UniPoly& a, const UniPoly& b) {
    UniPoly r = a;
    if (r.size() < b.size()) r.resize(b.size(), FieldValue());
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (i < a.size())
            r[i] = a[i] + b[i];
        else
            r[i] = b[i];
    }
    return trim(std::move(r));
}

UniPoly sub(const UniPoly& a, const UniPoly& b) {
    UniPoly nb;
    nb.reserve(b.size());
    for (const auto& c : b) nb.push_back(-c);
    return add(a, nb);
}

UniPoly mul(const UniPoly& a, const UniPoly& b) {
    if (a.empty() || b.empty()) return {};
    UniPoly r(a.size() + b.size() - 1, FieldValue::zero(a.front().field()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = r[i + j] + a[i] * b[j];
    return trim(std::move(r));
}

UniPoly scale(const UniPoly& a, const FieldValue& c) {
    if (c.is_zero()) return {};
    UniPoly r;
    r.reserve(a.size());
    for (const auto& x : a) r.push_back(x * c);
    return trim(std::move(r));
}

void divmod(const UniPoly& a, const UniPoly& b, UniPoly& q, UniPoly& r) {
    if (b.empty()) throw CoefficientError("univariate division by zero");
    r = a;
    q.clear();
    const int db = degree(b);
    const FieldValue lb_inv = b.back().inverse();
    if (degree(r) >= db) q.assign(degree(r) - db + 1, FieldValue::zero(b.back().field()));
    while (!r.empty() && degree(r) >= db) {
        const int shift = degree(r) - db;
        const FieldValue c = r.back() * lb_inv;
        q[shift] = c;
        for (int i = 0; i <= db; ++i)
            r[shift + i] = r[shift + i] - c * b[i];
        r = trim(std::move(r));
    }
    q = trim(std::move(q));
}

UniPoly gcd(UniPoly a, UniPoly b) {
    auto monic = [](UniPoly p) {
        if (!p.empty() && !p.back().is_one()) p = scale(p, p.back().inverse());
        return p;
    };
    while (!b.empty()) {
        UniPoly q, r;
        divmod(a, b, q, r);
        a = std::move(b);
        b = monic(std::move(r));
    }
    return monic(std::move(a));
}

} // namespace uni

// --------------------------------------------------------------- field value

namespace {

std::shared_ptr<const RatFunc> make_ratfunc(const FieldPtr& base, UniPoly num, UniPoly den) {
    num = uni::trim(std::move(num));
    den = uni::trim(std::move(den));
    if (uni::is_zero(den)) throw CoefficientError("division by zero in " + base->name());
    if (uni::is_zero(num)) {
        den = {FieldValue::one(base)};
    } else {
        UniPoly g = uni::gcd(num, den);
        if (uni::degree(g) > 0) {
            UniPoly q, r;
            uni::divmod(num, g, q, r);
            num = std::move(q);
            uni::divmod(den, g, q, r);
            den = std::move(q);
        }
        const FieldValue lc = den.back();
        if (!lc.is_one()) {
            num = uni::scale(num, lc.inverse());
            den = uni::scale(den, lc.inverse());
        }
    }
    auto rf = std::make_shared<RatFunc>();
    rf->num = std::move(num);
    rf->den = std::move(den);
    return rf;
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t p) {
    // extended Euclid; a in [1, p)
    long long t = 0, new_t = 1;
    long long r = static_cast<long long>(p), new_r = static_cast<long long>(a);
    while (new_r != 0) {
        const long long q = r / new_r;
        t -= q * new_t;
        std::swap(t, new_t);
        r -= q * new_r;
        std::swap(r, new_r);
    }
    if (r != 1) throw CoefficientError("residue not invertible");
    if (t < 0) t += static_cast<long long>(p);
    return static_cast<std::uint64_t>(t);
}

std::string uni_str(const UniPoly& p, const std::string& sym);

std::string coeff_factor_str(const FieldValue& c) {
    std::string s = c.str();
    if (c.compound_str()) return "(" + s + ")";
    return s;
}

std::string uni_term_str(const FieldValue& c, std::size_t e, const std::string& sym) {
    std::string mono;
    if (e == 1)
        mono = sym;
    else if (e > 1)
        mono = sym + "^" + std::to_string(e);
    if (e == 0) return coeff_factor_str(c);
    if (c.is_one()) return mono;
    return coeff_factor_str(c) + "*" + mono;
}

std::string uni_str(const UniPoly& p, const std::string& sym) {
    if (uni::is_zero(p)) return "0";
    std::string out;
    for (std::size_t i = p.size(); i-- > 0;) {
        if (p[i].is_zero()) continue;
        FieldValue c = p[i];
        if (out.empty()) {
            if (c.print_as_negative()) {
                out += "-";
                c = c.abs_for_print();
            }
        } else {
            if (c.print_as_negative()) {
                out += " - ";
                c = c.abs_for_print();
            } else {
                out += " + ";
            }
        }
        out += uni_term_str(c, i, sym);
    }
    return out;
}

} // namespace

FieldValue FieldValue::zero(const FieldPtr& k) {
    FieldValue v;
    v.field_ = k;
    switch (k->kind()) {
    case FieldKind::Rationals: v.payload_ = mpq_class(0); break;
    case FieldKind::PrimeField: v.payload_ = std::uint64_t(0); break;
    case FieldKind::RationalFunctions:
        v.payload_ = make_ratfunc(k->base(), {}, {FieldValue::one(k->base())});
        break;
    }
    return v;
}

FieldValue FieldValue::one(const FieldPtr& k) { return from_integer(k, 1); }

FieldValue FieldValue::from_integer(const FieldPtr& k, long n) {
    return from_mpz(k, mpz_class(n));
}

FieldValue FieldValue::from_mpz(const FieldPtr& k, const mpz_class& n) {
    FieldValue v;
    v.field_ = k;
    switch (k->kind()) {
    case FieldKind::Rationals: v.payload_ = mpq_class(n); break;
    case FieldKind::PrimeField: {
        mpz_class m = n % k->modulus();
        if (m < 0) m += k->modulus();
        v.payload_ = static_cast<std::uint64_t>(m.get_ui());
        break;
    }
    case FieldKind::RationalFunctions: {
        const FieldValue c = from_mpz(k->base(), n);
        UniPoly num;
        if (!c.is_zero()) num.push_back(c);
        v.payload_ = make_ratfunc(k->base(), std::move(num), {FieldValue::one(k->base())});
        break;
    }
    }
    return v;
}

FieldValue FieldValue::from_mpq(const FieldPtr& k, const mpq_class& q) {
    if (k->kind() == FieldKind::Rationals) {
        FieldValue v;
        v.field_ = k;
        mpq_class c = q;
        c.canonicalize();
        v.payload_ = c;
        return v;
    }
    const FieldValue num = from_mpz(k, q.get_num());
    const FieldValue den = from_mpz(k, q.get_den());
    return num / den;
}

FieldValue FieldValue::parameter(const FieldPtr& k) {
    if (k->kind() != FieldKind::RationalFunctions)
        throw UnsupportedField("parameter() of a field without parameter");
    const FieldPtr& base = k->base();
    FieldValue v;
    v.field_ = k;
    UniPoly num = {FieldValue::zero(base), FieldValue::one(base)};
    v.payload_ = make_ratfunc(base, std::move(num), {FieldValue::one(base)});
    return v;
}

FieldValue FieldValue::embed(const FieldPtr& k, const FieldValue& base_value) {
    if (k->kind() != FieldKind::RationalFunctions || !k->base()->same(*base_value.field()))
        throw UnsupportedField("embed: value is not from the base field");
    FieldValue v;
    v.field_ = k;
    UniPoly num;
    if (!base_value.is_zero()) num.push_back(base_value);
    v.payload_ = make_ratfunc(k->base(), std::move(num), {FieldValue::one(k->base())});
    return v;
}

FieldValue FieldValue::parameter_by_name(const FieldPtr& k, const std::string& name) {
    if (k->kind() == FieldKind::RationalFunctions) {
        if (k->parameter() == name) return parameter(k);
        return embed(k, parameter_by_name(k->base(), name));
    }
    throw UnknownVariable("'" + name + "' is neither a ring variable nor a field parameter");
}

bool FieldValue::is_zero() const {
    if (!field_) return std::get<mpq_class>(payload_) == 0;
    switch (field_->kind()) {
    case FieldKind::Rationals: return std::get<mpq_class>(payload_) == 0;
    case FieldKind::PrimeField: return std::get<std::uint64_t>(payload_) == 0;
    case FieldKind::RationalFunctions:
        return uni::is_zero(std::get<std::shared_ptr<const RatFunc>>(payload_)->num);
    }
    return false;
}

bool FieldValue::is_one() const {
    if (!field_) return std::get<mpq_class>(payload_) == 1;
    switch (field_->kind()) {
    case FieldKind::Rationals: return std::get<mpq_class>(payload_) == 1;
    case FieldKind::PrimeField: return std::get<std::uint64_t>(payload_) == 1;
    case FieldKind::RationalFunctions: {
        const auto& rf = *std::get<std::shared_ptr<const RatFunc>>(payload_);
        return rf.num.size() == 1 && rf.num[0].is_one() && uni::degree(rf.den) == 0;
    }
    }
    return false;
}

void FieldValue::require_same_field(const FieldValue& o) const {
    const FieldPtr a = field_ ? field_ : FieldDescriptor::rationals();
    const FieldPtr b = o.field_ ? o.field_ : FieldDescriptor::rationals();
    if (!a->same(*b))
        throw RingMismatch("field mismatch: " + a->name() + " vs " + b->name());
}

FieldValue FieldValue::operator+(const FieldValue& o) const {
    require_same_field(o);
    const FieldPtr k = field_ ? field_ : FieldDescriptor::rationals();
    FieldValue v;
    v.field_ = k;
    switch (k->kind()) {
    case FieldKind::Rationals: {
        mpq_class r = std::get<mpq_class>(payload_) + std::get<mpq_class>(o.payload_);
        v.payload_ = r;
        break;
    }
    case FieldKind::PrimeField: {
        std::uint64_t r = std::get<std::uint64_t>(payload_) + std::get<std::uint64_t>(o.payload_);
        if (r >= k->modulus()) r -= k->modulus();
        v.payload_ = r;
        break;
    }
    case FieldKind::RationalFunctions: {
        const auto& a = *std::get<std::shared_ptr<const RatFunc>>(payload_);
        const auto& b = *std::get<std::shared_ptr<const RatFunc>>(o.payload_);
        UniPoly num = uni::add(uni::mul(a.num, b.den), uni::mul(b.num, a.den));
        UniPoly den = uni::mul(a.den, b.den);
        v.payload_ = make_ratfunc(k->base(), std::move(num), std::move(den));
        break;
    }
    }
    return v;
}

FieldValue FieldValue::operator-() const {
    const FieldPtr k = field_ ? field_ : FieldDescriptor::rationals();
    FieldValue v;
    v.field_ = k;
    switch (k->kind()) {
    case FieldKind::Rationals: v.payload_ = mpq_class(-std::get<mpq_class>(payload_)); break;
    case FieldKind::PrimeField: {
        const std::uint64_t a = std::get<std::uint64_t>(payload_);
        v.payload_ = a == 0 ? a : k->modulus() - a;
        break;
    }
    case FieldKind::RationalFunctions: {
        const auto& a = *std::get<std::shared_ptr<const RatFunc>>(payload_);
        v.payload_ = make_ratfunc(k->base(), uni::scale(a.num, -FieldValue::one(k->base())),
                                  a.den);
        break;
    }
    }
    return v;
}

FieldValue FieldValue::operator-(const FieldValue& o) const { return *this + (-o); }

FieldValue FieldValue::operator*(const FieldValue& o) const {
    require_same_field(o);
    const FieldPtr k = field_ ? field_ : FieldDescriptor::rationals();
    FieldValue v;
    v.field_ = k;
    switch (k->kind()) {
    case FieldKind::Rationals: {
        mpq_class r = std::get<mpq_class>(payload_) * std::get<mpq_class>(o.payload_);
        v.payload_ = r;
        break;
    }
    case FieldKind::PrimeField: {
        const std::uint64_t r =
            std::get<std::uint64_t>(payload_) * std::get<std::uint64_t>(o.payload_);
        v.payload_ = r % k->modulus();
        break;
    }
    case FieldKind::RationalFunctions: {
        const auto& a = *std::get<std::shared_ptr<const RatFunc>>(payload_);
        const auto& b = *std::get<std::shared_ptr<const RatFunc>>(o.payload_);
        v.payload_ = make_ratfunc(k->base(), uni::mul(a.num, b.num), uni::mul(a.den, b.den));
        break;
    }
    }
    return v;
}

FieldValue FieldValue::inverse() const {
    if (is_zero()) throw CoefficientError("division by zero");
    const FieldPtr k = field_ ? field_ : FieldDescriptor::rationals();
    FieldValue v;
    v.field_ = k;
    switch (k->kind()) {
    case FieldKind::Rationals: {
        mpq_class r = 1 / std::get<mpq_class>(payload_);
        v.payload_ = r;
        break;
    }
    case FieldKind::PrimeField:
        v.payload_ = mod_inverse(std::get<std::uint64_t>(payload_), k->modulus());
        break;
    case FieldKind::RationalFunctions: {
        const auto& a = *std::get<std::shared_ptr<const RatFunc>>(payload_);
        v.payload_ = make_ratfunc(k->base(), a.den, a.num);
        break;
    }
    }
    return v;
}

FieldValue FieldValue::operator/(const FieldValue& o) const { return *this * o.inverse(); }

FieldValue FieldValue::pow(long e) const {
    const FieldPtr k = field_ ? field_ : FieldDescriptor::rationals();
    if (e < 0) return inverse().pow(-e);
    FieldValue acc = FieldValue::one(k);
    FieldValue base = *this;
    unsigned long n = static_cast<unsigned long>(e);
    while (n) {
        if (n & 1) acc = acc * base;
        base = base * base;
        n >>= 1;
    }
    return acc;
}

bool FieldValue::operator==(const FieldValue& o) const {
    const FieldPtr a = field_ ? field_ : FieldDescriptor::rationals();
    const FieldPtr b = o.field_ ? o.field_ : FieldDescriptor::rationals();
    if (!a->same(*b)) return false;
    switch (a->kind()) {
    case FieldKind::Rationals:
        return std::get<mpq_class>(payload_) == std::get<mpq_class>(o.payload_);
    case FieldKind::PrimeField:
        return std::get<std::uint64_t>(payload_) == std::get<std::uint64_t>(o.payload_);
    case FieldKind::RationalFunctions: {
        const auto& x = *std::get<std::shared_ptr<const RatFunc>>(payload_);
        const auto& y = *std::get<std::shared_ptr<const RatFunc>>(o.payload_);
        return x.num == y.num && x.den == y.den;
    }
    }
    return false;
}

bool FieldValue::print_as_negative() const {
    const FieldPtr k = field_ ? field_ : FieldDescriptor::rationals();
    if (k->kind() == FieldKind::Rationals) return std::get<mpq_class>(payload_) < 0;
    return false;
}

FieldValue FieldValue::abs_for_print() const {
    return print_as_negative() ? -*this : *this;
}

bool FieldValue::compound_str() const {
    const FieldPtr k = field_ ? field_ : FieldDescriptor::rationals();
    switch (k->kind()) {
    case FieldKind::Rationals: return std::get<mpq_class>(payload_) < 0;
    case FieldKind::PrimeField: return false;
    case FieldKind::RationalFunctions: {
        const auto& rf = *std::get<std::shared_ptr<const RatFunc>>(payload_);
        if (uni::degree(rf.den) > 0 || (rf.den.size() == 1 && !rf.den[0].is_one()))
            return false; // printed as (num)/(den), already self-delimited
        // bare numerator: a single term with a plain coefficient needs no parens
        std::size_t nonzero = 0, last = 0;
        for (std::size_t i = 0; i < rf.num.size(); ++i)
            if (!rf.num[i].is_zero()) {
                ++nonzero;
                last = i;
            }
        if (nonzero == 0) return false;
        if (nonzero > 1) return true;
        const FieldValue& c = rf.num[last];
        return c.compound_str() || c.print_as_negative();
    }
    }
    return false;
}

std::string FieldValue::str() const {
    const FieldPtr k = field_ ? field_ : FieldDescriptor::rationals();
    switch (k->kind()) {
    case FieldKind::Rationals: return std::get<mpq_class>(payload_).get_str();
    case FieldKind::PrimeField: return std::to_string(std::get<std::uint64_t>(payload_));
    case FieldKind::RationalFunctions: {
        const auto& rf = *std::get<std::shared_ptr<const RatFunc>>(payload_);
        const std::string& sym = k->parameter();
        if (uni::degree(rf.den) == 0 && rf.den[0].is_one()) return uni_str(rf.num, sym);
        return "(" + uni_str(rf.num, sym) + ")/(" + uni_str(rf.den, sym) + ")";
    }
    }
    return "?";
}

const mpq_class& FieldValue::rational() const {
    if (field_ && field_->kind() != FieldKind::Rationals)
        throw UnsupportedField("rational() on a non rational value");
    return std::get<mpq_class>(payload_);
}

std::uint64_t FieldValue::residue() const {
    if (!field_ || field_->kind() != FieldKind::PrimeField)
        throw UnsupportedField("residue() on a non prime-field value");
    return std::get<std::uint64_t>(payload_);
}

const RatFunc& FieldValue::fraction() const {
    if (!field_ || field_->kind() != FieldKind::RationalFunctions)
        throw UnsupportedField("fraction() on a non function-field value");
    return *std::get<std::shared_ptr<const RatFunc>>(payload_);
}

} // namespace qem

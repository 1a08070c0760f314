#include "qem/poly.hpp"

#include <algorithm>

namespace qem {

// ---------------------------------------------------------------------- ring

RingPtr Ring::make(FieldPtr field, std::vector<std::string> vars) {
    if (!field) throw UnsupportedField("null coefficient field");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].empty()) throw UnknownVariable("empty variable name");
        if (field->has_parameter(vars[i]))
            throw UnsupportedField("variable '" + vars[i] +
                                   "' shadows a field parameter");
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i] == vars[j])
                throw UnsupportedField("duplicate variable '" + vars[i] + "'");
    }
    auto r = new Ring();
    r->field_ = std::move(field);
    r->vars_ = std::move(vars);
    return RingPtr(r);
}

std::optional<std::size_t> Ring::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) return i;
    return std::nullopt;
}

std::size_t Ring::index_of_checked(const std::string& name) const {
    if (auto i = index_of(name)) return *i;
    throw UnknownVariable("variable '" + name + "' not in ring " + this->name());
}

bool Ring::same(const Ring& o) const {
    return vars_ == o.vars_ && field_->same(*o.field_);
}

std::string Ring::name() const {
    std::string s = field_->name() + "[";
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (i) s += ",";
        s += vars_[i];
    }
    return s + "]";
}

// ---------------------------------------------------------------------- poly

long Degree::value() const {
    if (!finite_) throw Error("value() of MinusInfinity degree");
    return value_;
}

Poly Poly::one(RingPtr ring) { return from_integer(std::move(ring), 1); }

Poly Poly::constant(RingPtr ring, const FieldValue& c) {
    Poly p(ring);
    if (!c.is_zero()) p.terms_.emplace(Exponents(ring->arity(), 0), c);
    return p;
}

Poly Poly::from_integer(RingPtr ring, long n) {
    const FieldValue c = FieldValue::from_integer(ring->field(), n);
    return constant(std::move(ring), c);
}

Poly Poly::variable(RingPtr ring, const std::string& name) {
    const std::size_t i = ring->index_of_checked(name);
    Exponents e(ring->arity(), 0);
    e[i] = 1;
    const FieldValue one = FieldValue::one(ring->field());
    return monomial(std::move(ring), std::move(e), one);
}

Poly Poly::monomial(RingPtr ring, Exponents e, const FieldValue& c) {
    if (e.size() != ring->arity())
        throw RingMismatch("exponent vector length does not match ring arity");
    Poly p(std::move(ring));
    if (!c.is_zero()) p.terms_.emplace(std::move(e), c);
    return p;
}

bool Poly::is_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && total_degree_of(terms_.begin()->first) == 0;
}

FieldValue Poly::constant_coefficient() const {
    const Exponents zero(ring_->arity(), 0);
    const auto it = terms_.find(zero);
    return it == terms_.end() ? FieldValue::zero(ring_->field()) : it->second;
}

FieldValue Poly::as_constant() const {
    if (!is_constant()) throw CoefficientError("polynomial is not constant: " + str());
    return constant_coefficient();
}

FieldValue Poly::coefficient(const Exponents& e) const {
    const auto it = terms_.find(e);
    return it == terms_.end() ? FieldValue::zero(ring_->field()) : it->second;
}

void Poly::require_same_ring(const Poly& o) const {
    if (!ring_->same(*o.ring_))
        throw RingMismatch("ring mismatch: " + ring_->name() + " vs " + o.ring_->name());
}

void Poly::add_term(const Exponents& e, const FieldValue& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Poly Poly::operator+(const Poly& o) const {
    require_same_ring(o);
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Poly Poly::operator-() const {
    Poly r(ring_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
    require_same_ring(o);
    Poly r(ring_);
    for (const auto& [e1, c1] : terms_) {
        for (const auto& [e2, c2] : o.terms_) {
            Exponents e(e1.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
            r.add_term(e, c1 * c2);
        }
    }
    return r;
}

Poly Poly::pow(unsigned long e) const {
    Poly acc = Poly::one(ring_);
    Poly base = *this;
    while (e) {
        if (e & 1) acc = acc * base;
        base = e > 1 ? base * base : base;
        e >>= 1;
    }
    return acc;
}

Poly Poly::scaled(const FieldValue& c) const {
    Poly r(ring_);
    if (c.is_zero()) return r;
    for (const auto& [e, k] : terms_) {
        const FieldValue v = k * c;
        if (!v.is_zero()) r.terms_.emplace(e, v);
    }
    return r;
}

bool Poly::operator==(const Poly& o) const {
    if (!ring_->same(*o.ring_)) return false;
    if (terms_.size() != o.terms_.size()) return false;
    auto it1 = terms_.begin();
    auto it2 = o.terms_.begin();
    for (; it1 != terms_.end(); ++it1, ++it2)
        if (it1->first != it2->first || !(it1->second == it2->second)) return false;
    return true;
}

Poly Poly::derivative(const std::string& var) const {
    const std::size_t i = ring_->index_of_checked(var);
    Poly r(ring_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        const FieldValue k = c * FieldValue::from_integer(ring_->field(), e[i]);
        if (k.is_zero()) continue;
        Exponents ne = e;
        ne[i] -= 1;
        r.add_term(ne, k);
    }
    return r;
}

Degree Poly::total_degree() const {
    if (terms_.empty()) return Degree::minus_infinity();
    // Terms are stored in descending graded-lex order, so the first term
    // carries the maximal total degree.
    return Degree::of(static_cast<long>(total_degree_of(terms_.begin()->first)));
}

Degree Poly::degree_in(const std::string& var) const {
    const std::size_t i = ring_->index_of_checked(var);
    if (terms_.empty()) return Degree::minus_infinity();
    std::uint32_t d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
    return Degree::of(d);
}

Poly Poly::leading_form() const {
    Poly r(ring_);
    if (terms_.empty()) return r;
    const auto top = total_degree_of(terms_.begin()->first);
    for (const auto& [e, c] : terms_) {
        if (total_degree_of(e) != top) break;
        r.terms_.emplace(e, c);
    }
    return r;
}

Poly Poly::coefficient_in(const std::string& var, std::uint32_t k) const {
    const std::size_t i = ring_->index_of_checked(var);
    Poly r(ring_);
    for (const auto& [e, c] : terms_) {
        if (e[i] != k) continue;
        Exponents ne = e;
        ne[i] = 0;
        r.terms_.emplace(std::move(ne), c);
    }
    return r;
}

// ------------------------------------------------------------------- printer

namespace {

std::string monomial_str(const Ring& ring, const Exponents& e) {
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += ring.vars()[i];
        if (e[i] > 1) s += "^" + std::to_string(e[i]);
    }
    return s;
}

std::string coefficient_factor(const FieldValue& c) {
    const std::string s = c.str();
    return c.compound_str() ? "(" + s + ")" : s;
}

} // namespace

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, c0] : terms_) {
        FieldValue c = c0;
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
        const std::string mono = monomial_str(*ring_, e);
        if (mono.empty())
            out += coefficient_factor(c);
        else if (c.is_one())
            out += mono;
        else
            out += coefficient_factor(c) + "*" + mono;
    }
    return out;
}

// --------------------------------------------------------------- degree data

DegreeData degree_data_total(const Poly& f) {
    return DegreeData{f.total_degree(), f.leading_form()};
}

DegreeData degree_data_in_var(const Poly& f, const std::string& var) {
    const Degree d = f.degree_in(var);
    if (d.is_minus_infinity()) return DegreeData{d, Poly::zero(f.ring())};
    return DegreeData{d, f.coefficient_in(var, static_cast<std::uint32_t>(d.value()))};
}

// ---------------------------------------------------------------- substitute

Poly substitute(const Poly& f, const std::map<std::string, Poly>& images) {
    if (f.is_zero() || images.empty()) {
        if (!images.empty()) {
            const RingPtr& target = images.begin()->second.ring();
            if (!target->field()->same(*f.ring()->field()))
                throw RingMismatch("substitution must preserve the coefficient field");
            return Poly::zero(target);
        }
        return f;
    }
    const RingPtr& source = f.ring();
    const RingPtr& target = images.begin()->second.ring();
    if (!target->field()->same(*source->field()))
        throw RingMismatch("substitution must preserve the coefficient field");
    for (const auto& [name, img] : images) {
        if (!source->index_of(name))
            throw UnknownVariable("image given for '" + name + "' which is not in " +
                                  source->name());
        if (!img.ring()->same(*target))
            throw RingMismatch("images do not share one ring");
    }

    // power cache per source variable
    std::vector<std::vector<Poly>> powers(source->arity());
    std::vector<const Poly*> image_of(source->arity(), nullptr);
    for (const auto& [name, img] : images)
        image_of[*source->index_of(name)] = &img;

    auto power = [&](std::size_t i, std::uint32_t e) -> const Poly& {
        auto& cache = powers[i];
        if (cache.empty()) cache.push_back(Poly::one(target));
        while (cache.size() <= e) cache.push_back(cache.back() * *image_of[i]);
        return cache[e];
    };

    Poly result(target);
    for (const auto& [e, c] : f.terms()) {
        Poly term = Poly::constant(target, c);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!image_of[i])
                throw MissingImage("no image for variable '" + source->vars()[i] + "'");
            term = term * power(i, e[i]);
        }
        result = result + term;
    }
    return result;
}

Poly partial_derivative(const Poly& f, const std::string& var) {
    return f.derivative(var);
}

Poly jacobian_det(const Poly& f, const Poly& g, const std::string& v1,
                  const std::string& v2) {
    if (!f.ring()->same(*g.ring()))
        throw RingMismatch("jacobian_det operands live in different rings");
    return f.derivative(v1) * g.derivative(v2) - f.derivative(v2) * g.derivative(v1);
}

// ------------------------------------------------------------------- matrix2

Matrix2 Matrix2::identity(const RingPtr& ring) {
    return Matrix2{Poly::one(ring), Poly::zero(ring), Poly::zero(ring), Poly::one(ring)};
}

Matrix2 Matrix2::from_scalars(const RingPtr& ring, const FieldValue& a,
                              const FieldValue& b, const FieldValue& c,
                              const FieldValue& d) {
    return Matrix2{Poly::constant(ring, a), Poly::constant(ring, b),
                   Poly::constant(ring, c), Poly::constant(ring, d)};
}

Matrix2 Matrix2::mul(const Matrix2& o) const {
    return Matrix2{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
                   c * o.b + d * o.d};
}

Poly Matrix2::det() const { return a * d - b * c; }

} // namespace qem

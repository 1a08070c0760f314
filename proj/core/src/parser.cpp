#include "qem/parser.hpp"

#include <cctype>

namespace qem {

namespace {

class Parser {
public:
    Parser(const std::string& text, const RingPtr& ring) : text_(text), ring_(ring) {}

    Poly run() {
        Poly p = expression();
        skip_ws();
        if (pos_ != text_.size())
            throw SyntaxError("unexpected trailing input", pos_);
        return p;
    }

private:
    const std::string& text_;
    const RingPtr& ring_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool starts_factor(char c) const {
        return std::isalpha(static_cast<unsigned char>(c)) ||
               std::isdigit(static_cast<unsigned char>(c)) || c == '(' || c == '_';
    }

    Poly expression() {
        bool negate = false;
        char c = peek();
        if (c == '+' || c == '-') {
            ++pos_;
            negate = c == '-';
        }
        Poly acc = term();
        if (negate) acc = -acc;
        while (true) {
            c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                const Poly t = term();
                acc = c == '+' ? acc + t : acc - t;
            } else {
                break;
            }
        }
        return acc;
    }

    Poly term() {
        Poly acc = factor();
        while (true) {
            const char c = peek();
            if (c == '*' || c == '/') {
                ++pos_;
                const std::size_t at = pos_;
                const Poly f = factor();
                if (c == '*') {
                    acc = acc * f;
                } else {
                    if (!f.is_constant())
                        throw SyntaxError("division by a non-constant expression", at);
                    const FieldValue d = f.as_constant();
                    if (d.is_zero())
                        throw CoefficientError("division by zero in expression");
                    acc = acc.scaled(d.inverse());
                }
            } else if (starts_factor(c)) {
                acc = acc * factor(); // implicit multiplication, e.g. "z(z+1)"
            } else {
                break;
            }
        }
        return acc;
    }

    Poly factor() {
        Poly base = atom();
        if (peek() == '^') {
            ++pos_;
            const std::size_t at = pos_;
            const unsigned long e = integer_literal("exponent");
            if (e > 1000000) throw SyntaxError("exponent too large", at);
            base = base.pow(e);
        }
        return base;
    }

    Poly atom() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Poly p = expression();
            if (peek() != ')') throw SyntaxError("expected ')'", pos_);
            ++pos_;
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mpz_class n = big_integer_literal();
            return Poly::constant(ring_, FieldValue::from_mpz(ring_->field(), n));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t at = pos_;
            std::string name;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                name += text_[pos_++];
            if (ring_->index_of(name)) return Poly::variable(ring_, name);
            if (ring_->field()->has_parameter(name))
                return Poly::constant(
                    ring_, FieldValue::parameter_by_name(ring_->field(), name));
            throw UnknownVariable("'" + name + "' is not a variable of " + ring_->name() +
                                  " (at position " + std::to_string(at) + ")");
        }
        throw SyntaxError("expected a number, variable, or '('", pos_);
    }

    unsigned long integer_literal(const char* what) {
        skip_ws();
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            throw SyntaxError(std::string("expected ") + what, pos_);
        unsigned long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + static_cast<unsigned long>(text_[pos_] - '0');
            if (v > 100000000UL) throw SyntaxError("integer literal too large", pos_);
            ++pos_;
        }
        return v;
    }

    mpz_class big_integer_literal() {
        skip_ws();
        std::string digits;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            digits += text_[pos_++];
        return mpz_class(digits);
    }
};

} // namespace

Poly parse_poly(const std::string& text, const RingPtr& ring) {
    return Parser(text, ring).run();
}

} // namespace qem

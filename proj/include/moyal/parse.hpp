#pragma once

#include "moyal/poly.hpp"

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace moyal {

struct PolyParseError : std::runtime_error {
    std::size_t position;
    PolyParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

// Recursive-descent parser for the polynomial grammar:
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' uint)?
//   base   := number | var | 'i' | '(' expr ')'
//   var    := 'q'|'p'|'h'|'lq'|'lp' | ('q'|'p'|'lq'|'lp') uint
//   number := uint | uint '.' digits | uint '/' uint
// Unsubscripted q,p,lq,lp are valid only for N=1. Decimal literals are
// converted exactly to rationals; exponents must be non-negative integers.
class PolyParser {
public:
    PolyParser(std::string text, int N) : text_(std::move(text)), n_(N) {
        if (N < 1) throw std::invalid_argument("parse_poly: N must be positive");
    }

    PolySymbol parse() {
        PolySymbol out = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return out;
    }

private:
    std::string text_;
    int n_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw PolyParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }
    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    PolySymbol expr() {
        bool negate = false;
        skip_ws();
        if (accept('-')) negate = true;
        PolySymbol acc = term();
        if (negate) acc = -acc;
        for (;;) {
            if (accept('+')) {
                acc += term();
            } else if (accept('-')) {
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    PolySymbol term() {
        PolySymbol acc = factor();
        while (accept('*')) acc = acc * factor();
        return acc;
    }

    PolySymbol factor() {
        PolySymbol b = base();
        if (accept('^')) {
            skip_ws();
            if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+'))
                fail("exponent must be a non-negative integer");
            return b.pow(parse_uint("exponent"));
        }
        return b;
    }

    PolySymbol base() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            PolySymbol inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return variable();
        fail(std::string("unexpected character '") + c + "'");
    }

    unsigned parse_uint(const char* what) {
        skip_ws();
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail(std::string("expected ") + what);
        unsigned long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + static_cast<unsigned long>(text_[pos_] - '0');
            if (v > 1000000) fail("integer literal too large");
            ++pos_;
        }
        return static_cast<unsigned>(v);
    }

    PolySymbol number() {
        BigInt intpart = big_digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            std::size_t start = pos_;
            BigInt frac = big_digits();
            std::size_t ndigits = pos_ - start;
            if (ndigits == 0) fail("expected digits after decimal point");
            BigInt den = 1;
            for (std::size_t k = 0; k < ndigits; ++k) den *= 10;
            return PolySymbol::constant(n_, ComplexRational(Rational(intpart * den + frac, den)));
        }
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            skip_ws();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                fail("expected denominator");
            BigInt den = big_digits();
            if (den == 0) fail("zero denominator");
            return PolySymbol::constant(n_, ComplexRational(Rational(intpart, den)));
        }
        return PolySymbol::constant(n_, ComplexRational(Rational(intpart)));
    }

    BigInt big_digits() {
        BigInt v = 0;
        bool any = false;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            any = true;
            ++pos_;
        }
        if (!any) fail("expected digits");
        return v;
    }

    PolySymbol variable() {
        std::size_t start = pos_;
        std::string name;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
            name += text_[pos_++];

        if (name == "i") return PolySymbol::constant(n_, ComplexRational::unit_i());
        if (name == "h") return PolySymbol::variable(n_, VariableId::hbar());

        bool is_lambda = false;
        if (name.size() == 2 && name[0] == 'l') {
            is_lambda = true;
            name = name.substr(1);
        }
        if (name != "q" && name != "p") {
            pos_ = start;
            fail("unknown variable '" + name + "'");
        }

        int index;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            index = static_cast<int>(parse_uint("variable index")) - 1;
            if (index < 0 || index >= n_) {
                pos_ = start;
                fail("variable index out of range for N=" + std::to_string(n_));
            }
        } else {
            if (n_ != 1) {
                pos_ = start;
                fail("unsubscripted variable requires N=1");
            }
            index = 0;
        }
        int a = (name == "q") ? index : n_ + index;
        return PolySymbol::variable(n_, is_lambda ? VariableId::lambda(a) : VariableId::phase(a));
    }
};

inline PolySymbol parse_poly(const std::string& text, int N) {
    return PolyParser(text, N).parse();
}

}  // namespace moyal

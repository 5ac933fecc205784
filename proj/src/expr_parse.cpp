#include "poissonkit/expr.hpp"
#include "tokenizer.hpp"

namespace poissonkit {

namespace {

using detail::Tok;
using detail::Token;

class ScalarParser {
public:
    ScalarParser(const std::string& text, ChartPtr chart)
        : toks_(detail::tokenize(text)), chart_(std::move(chart)) {}

    Expr run() {
        Expr e = sum();
        expect(Tok::End, "trailing input");
        return e;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    void advance() { ++pos_; }

    void expect(Tok k, const char* what) {
        if (cur().kind != k) throw ParseError(std::string("syntax error: ") + what, cur().offset);
    }

    Expr sum() {
        Expr e = product();
        while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
            bool minus = cur().kind == Tok::Minus;
            advance();
            Expr rhs = product();
            e = minus ? e - rhs : e + rhs;
        }
        return e;
    }

    Expr product() {
        Expr e = unary();
        while (cur().kind == Tok::Star || cur().kind == Tok::Slash) {
            bool div = cur().kind == Tok::Slash;
            size_t off = cur().offset;
            advance();
            Expr rhs = unary();
            if (div && rhs.is_zero()) throw ParseError("division by zero", off);
            e = div ? e / rhs : e * rhs;
        }
        return e;
    }

    Expr unary() {
        if (cur().kind == Tok::Minus) {
            advance();
            return -unary();
        }
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (cur().kind != Tok::Caret) return base;
        advance();
        long e = integer_exponent();
        if (e < 0 && base.is_zero()) {
            throw ParseError("negative power of zero", cur().offset);
        }
        return base.pow(e);
    }

    // The exponent must be an integer literal, optionally negated and/or
    // parenthesized; anything else is rejected.
    long integer_exponent() {
        bool neg = false;
        if (cur().kind == Tok::LParen) {
            advance();
            if (cur().kind == Tok::Minus) {
                neg = true;
                advance();
            }
            long v = literal();
            expect(Tok::RParen, "expected ')'");
            advance();
            return neg ? -v : v;
        }
        if (cur().kind == Tok::Minus) {
            neg = true;
            advance();
        }
        long v = literal();
        return neg ? -v : v;
    }

    long literal() {
        if (cur().kind != Tok::Number) {
            throw ParseError("exponent must be an integer literal", cur().offset);
        }
        long v = std::stol(cur().text);
        advance();
        return v;
    }

    Expr atom() {
        switch (cur().kind) {
            case Tok::Number: {
                Expr e = Expr::constant(chart_, mpq_class(cur().text));
                advance();
                return e;
            }
            case Tok::Ident: {
                int idx = chart_->index_of(cur().text);
                if (idx < 0) {
                    throw ParseError("unknown identifier '" + cur().text + "'", cur().offset);
                }
                advance();
                return Expr::variable(chart_, idx);
            }
            case Tok::LParen: {
                advance();
                Expr e = sum();
                expect(Tok::RParen, "expected ')'");
                advance();
                return e;
            }
            default:
                throw ParseError("syntax error: expected a term", cur().offset);
        }
    }

    std::vector<Token> toks_;
    ChartPtr chart_;
    size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text, const ChartPtr& chart) {
    return ScalarParser(text, chart).run();
}

}  // namespace poissonkit

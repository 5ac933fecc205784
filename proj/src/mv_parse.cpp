#include "poissonkit/multivector.hpp"
#include "tokenizer.hpp"

#include <stdexcept>

namespace poissonkit {

namespace {

using detail::Tok;
using detail::Token;

// Grammar for multivectors and forms, on top of the scalar grammar:
//   tensor := ['-'] term (('+'|'-') term)*
//   term   := coef '*' blade | coef | blade
//   coef   := '(' scalar ')' | NUMBER | VAR
//   blade  := basis ('^' basis)*
//   basis  := '@'VAR   (multivector)  |  dVAR   (form)
// Inside parentheses '^' is scalar exponentiation; between basis symbols it
// is the wedge. Coefficients other than a literal, a bare variable or a
// parenthesized expression must be parenthesized.
template <typename Tag>
class TensorParser {
public:
    TensorParser(const std::string& text, ChartPtr chart)
        : text_(text), toks_(detail::tokenize(text)), chart_(std::move(chart)) {}

    Alternating<Tag> run() {
        Alternating<Tag> acc;
        bool first = true;
        int sign = 1;
        if (cur().kind == Tok::Minus) {
            sign = -1;
            advance();
        }
        while (true) {
            Alternating<Tag> t = term();
            if (sign < 0) t = -t;
            if (first) {
                acc = t;
                first = false;
            } else {
                if (!t.is_zero() && !acc.is_zero() && t.grade() != acc.grade()) {
                    throw ParseError("mixed grades in tensor expression", cur().offset);
                }
                acc = acc + t;
            }
            if (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
                sign = cur().kind == Tok::Minus ? -1 : 1;
                advance();
                continue;
            }
            break;
        }
        if (cur().kind != Tok::End) throw ParseError("trailing input", cur().offset);
        return acc;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    void advance() { ++pos_; }

    bool at_basis() const {
        if (std::is_same_v<Tag, detail::VectorTag>) return cur().kind == Tok::At;
        if (cur().kind != Tok::Ident) return false;
        const std::string& t = cur().text;
        return t.size() > 1 && t[0] == 'd' && chart_->index_of(t.substr(1)) >= 0;
    }

    int basis_index() {
        if constexpr (std::is_same_v<Tag, detail::VectorTag>) {
            advance();  // '@'
            if (cur().kind != Tok::Ident) throw ParseError("expected variable after '@'", cur().offset);
            int idx = chart_->index_of(cur().text);
            if (idx < 0) throw ParseError("unknown variable '" + cur().text + "'", cur().offset);
            advance();
            return idx;
        } else {
            int idx = chart_->index_of(cur().text.substr(1));
            advance();
            return idx;
        }
    }

    Alternating<Tag> term() {
        Expr coeff = Expr::one(chart_);
        bool have_coeff = false;
        if (!at_basis()) {
            coeff = coef_atom();
            have_coeff = true;
            if (cur().kind == Tok::Star) {
                advance();
            } else {
                return Alternating<Tag>::scalar(chart_, coeff);
            }
        }
        if (!at_basis()) {
            throw ParseError(have_coeff ? "expected basis symbol after '*'" : "expected a term",
                             cur().offset);
        }
        std::vector<int> idx;
        idx.push_back(basis_index());
        while (cur().kind == Tok::Caret) {
            advance();
            if (!at_basis()) throw ParseError("expected basis symbol after '^'", cur().offset);
            idx.push_back(basis_index());
        }
        Alternating<Tag> t(chart_, static_cast<int>(idx.size()));
        t.add_term(idx, coeff);
        return t;
    }

    Expr coef_atom() {
        if (cur().kind == Tok::Number) {
            Expr e = Expr::constant(chart_, mpq_class(cur().text));
            advance();
            return e;
        }
        if (cur().kind == Tok::Ident) {
            int idx = chart_->index_of(cur().text);
            if (idx < 0) throw ParseError("unknown identifier '" + cur().text + "'", cur().offset);
            advance();
            return Expr::variable(chart_, idx);
        }
        if (cur().kind == Tok::LParen) {
            // balanced-parenthesis scan, then delegate to the scalar parser
            size_t start = cur().offset;
            int depth = 0;
            size_t i = pos_;
            for (; toks_[i].kind != Tok::End; ++i) {
                if (toks_[i].kind == Tok::LParen) ++depth;
                if (toks_[i].kind == Tok::RParen && --depth == 0) break;
            }
            if (depth != 0) throw ParseError("unbalanced parentheses", start);
            size_t end = toks_[i].offset;
            std::string inner = text_.substr(start + 1, end - start - 1);
            Expr e;
            try {
                e = Expr::parse(inner, chart_);
            } catch (const ParseError& pe) {
                throw ParseError(pe.what(), start + 1 + pe.offset());
            }
            pos_ = i + 1;
            return e;
        }
        throw ParseError("expected coefficient or basis symbol", cur().offset);
    }

    const std::string& text_;
    std::vector<Token> toks_;
    ChartPtr chart_;
    size_t pos_ = 0;
};

}  // namespace

KVector parse_kvector(const std::string& text, const ChartPtr& chart) {
    return TensorParser<detail::VectorTag>(text, chart).run();
}

KForm parse_kform(const std::string& text, const ChartPtr& chart) {
    return TensorParser<detail::FormTag>(text, chart).run();
}

}  // namespace poissonkit

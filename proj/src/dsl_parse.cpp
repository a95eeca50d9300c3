#include <cctype>
#include <charconv>
#include <string>

#include "gencdf/dsl.hpp"
#include "gencdf/errors.hpp"

namespace gencdf::dsl {

namespace {

// Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := base ('^' number)?
//   base   := 'g' int | number | '-' number | 'inf' | '-inf'
//           | '(' expr ')' | '-ln' '(' expr ')' | 'exp' '(' '-' expr ')'
class Parser {
public:
    Parser(std::string_view text, std::size_t arity) : text_(text), arity_(arity) {}

    MonotoneExpr run() {
        MonotoneExpr e = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    std::string_view text_;
    std::size_t arity_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(std::string_view token) {
        skip_space();
        return text_.substr(pos_, token.size()) == token;
    }

    bool accept(std::string_view token) {
        if (!peek(token)) return false;
        pos_ += token.size();
        return true;
    }

    void expect(std::string_view token) {
        if (!accept(token)) fail("expected '" + std::string(token) + "'");
    }

    // Wraps builder errors so they carry the offset of the operator.
    template <typename F>
    MonotoneExpr build(std::size_t at, F&& f) {
        try {
            return f();
        } catch (const DomainError& e) {
            throw ParseError(e.what(), at);
        }
    }

    MonotoneExpr expr() {
        MonotoneExpr acc = term();
        for (;;) {
            const std::size_t at = (skip_space(), pos_);
            if (accept("+")) {
                MonotoneExpr rhs = term();
                acc = build(at, [&] { return sum({acc, rhs}); });
            } else if (peek("-")) {
                ++pos_;
                if (peek("ln")) {
                    // a - ln(x) reads as a + (-ln(x)).
                    pos_ += 2;
                    expect("(");
                    MonotoneExpr inner = expr();
                    expect(")");
                    MonotoneExpr rhs = build(at, [&] { return neg_log(inner); });
                    acc = build(at, [&] { return sum({acc, rhs}); });
                    continue;
                }
                MonotoneExpr rhs = term();
                acc = build(at, [&] { return subtract(acc, rhs); });
            } else {
                return acc;
            }
        }
    }

    MonotoneExpr subtract(const MonotoneExpr& a, const MonotoneExpr& b) {
        const std::size_t m = a.arity();
        if (b.root().kind == NodeKind::Const) return sum({a, constant(-b.root().param, m)});
        if (a.root().kind == NodeKind::Const) {
            const double c = a.root().param;
            if (c == 1.0) return complement(b);
            return sum({complement(b), constant(c - 1.0, m)});
        }
        return sum({a, complement(b), constant(-1.0, m)});
    }

    MonotoneExpr term() {
        MonotoneExpr acc = factor();
        for (;;) {
            const std::size_t at = (skip_space(), pos_);
            if (accept("*")) {
                MonotoneExpr rhs = factor();
                acc = build(at, [&] { return product({acc, rhs}); });
            } else if (accept("/")) {
                MonotoneExpr rhs = factor();
                acc = build(at, [&] {
                    if (rhs.root().kind == NodeKind::Const && rhs.root().param > 0.0) {
                        return product({acc, constant(1.0 / rhs.root().param, acc.arity())});
                    }
                    return ratio(acc, rhs);
                });
            } else {
                return acc;
            }
        }
    }

    MonotoneExpr factor() {
        MonotoneExpr b = base();
        const std::size_t at = (skip_space(), pos_);
        if (accept("^")) {
            const double alpha = number();
            return build(at, [&] { return power(b, alpha); });
        }
        return b;
    }

    double number() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ == start) fail("expected a number");
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double value = 0.0;
        const auto* first = text_.data() + start;
        const auto* last = text_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) {
            pos_ = start;
            fail("malformed number");
        }
        return value;
    }

    MonotoneExpr base() {
        skip_space();
        const std::size_t at = pos_;
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        if (accept("(")) {
            MonotoneExpr e = expr();
            expect(")");
            return e;
        }
        if (accept("-ln")) {
            expect("(");
            MonotoneExpr e = expr();
            expect(")");
            return build(at, [&] { return neg_log(e); });
        }
        if (accept("-inf")) return neg_inf(arity_);
        if (accept("inf")) return pos_inf(arity_);
        if (accept("exp")) {
            expect("(");
            expect("-");
            MonotoneExpr e = expr();
            expect(")");
            return build(at, [&] { return exp_neg(e); });
        }
        if (accept("-")) {
            skip_space();
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                return constant(-number(), arity_);
            }
            fail("unary minus applies only to numbers, ln and inf");
        }
        if (text_[pos_] == 'g') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == start) fail("expected a variable index after 'g'");
            std::size_t index = 0;
            std::from_chars(text_.data() + start, text_.data() + pos_, index);
            if (index == 0 || index > arity_) {
                throw ParseError("variable g" + std::to_string(index) + " outside 1.." + std::to_string(arity_), at);
            }
            return var(index, arity_);
        }
        if (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.') {
            return constant(number(), arity_);
        }
        fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    }
};

}  // namespace

MonotoneExpr parse(std::string_view text, std::size_t arity) {
    if (arity == 0) throw ParseError("arity must be positive", 0);
    return Parser(text, arity).run();
}

}  // namespace gencdf::dsl

#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "quadforms/error.hpp"
#include "quadforms/weil.hpp"

namespace quadforms {

constexpr int kMaxVariables = 8;

enum class Func { Sin, Cos, Exp, Ln, Sqrt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable AST node. Payload fields are meaningful per kind only:
/// Num uses value, Var uses var (0-based), Pow uses a + exponent,
/// Call uses func + a, binary nodes use a + b, Neg uses a.
struct Expr {
    enum class Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Call };

    Kind kind;
    double value = 0.0;
    int var = 0;
    int exponent = 0;
    Func func = Func::Sin;
    ExprPtr a, b;

    static ExprPtr num(double v) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Num;
        e->value = v;
        return e;
    }
    static ExprPtr variable(int i) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Var;
        e->var = i;
        return e;
    }
    static ExprPtr add(ExprPtr x, ExprPtr y) { return binary(Kind::Add, std::move(x), std::move(y)); }
    static ExprPtr sub(ExprPtr x, ExprPtr y) { return binary(Kind::Sub, std::move(x), std::move(y)); }
    static ExprPtr mul(ExprPtr x, ExprPtr y) { return binary(Kind::Mul, std::move(x), std::move(y)); }
    static ExprPtr div(ExprPtr x, ExprPtr y) { return binary(Kind::Div, std::move(x), std::move(y)); }
    static ExprPtr neg(ExprPtr x) {
        // Fold literal negation so "-0.75" means the literal -0.75; keeps
        // printed expressions reparsing to identical trees.
        if (x->kind == Kind::Num) return num(-x->value);
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Neg;
        e->a = std::move(x);
        return e;
    }
    static ExprPtr pow(ExprPtr base, int exponent) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Pow;
        e->a = std::move(base);
        e->exponent = exponent;
        return e;
    }
    static ExprPtr call(Func f, ExprPtr arg) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Call;
        e->func = f;
        e->a = std::move(arg);
        return e;
    }

private:
    static ExprPtr binary(Kind k, ExprPtr x, ExprPtr y) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->a = std::move(x);
        e->b = std::move(y);
        return e;
    }
};

/// 1 + the largest variable index used (0 for constant expressions).
inline int arity(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Num: return 0;
    case Expr::Kind::Var: return e.var + 1;
    case Expr::Kind::Neg:
    case Expr::Kind::Pow:
    case Expr::Kind::Call: return arity(*e.a);
    default: return std::max(arity(*e.a), arity(*e.b));
    }
}

inline bool structural_equal(const Expr& x, const Expr& y) {
    if (x.kind != y.kind) return false;
    switch (x.kind) {
    case Expr::Kind::Num: return x.value == y.value;
    case Expr::Kind::Var: return x.var == y.var;
    case Expr::Kind::Neg: return structural_equal(*x.a, *y.a);
    case Expr::Kind::Pow:
        return x.exponent == y.exponent && structural_equal(*x.a, *y.a);
    case Expr::Kind::Call:
        return x.func == y.func && structural_equal(*x.a, *y.a);
    default:
        return structural_equal(*x.a, *y.a) && structural_equal(*x.b, *y.b);
    }
}

inline double real_part(double x) { return x; }
inline double real_part(const WeilNumber& w) { return w.real(); }

inline double apply_func(Func f, double x) {
    switch (f) {
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Exp: return std::exp(x);
    case Func::Ln:
        if (x <= 0.0) throw DomainError("ln of a non-positive real part");
        return std::log(x);
    case Func::Sqrt:
        if (x < 0.0) throw DomainError("sqrt of a negative number");
        return std::sqrt(x);
    }
    throw Error("unreachable: bad Func");
}

inline WeilNumber apply_func(Func f, const WeilNumber& w) {
    switch (f) {
    case Func::Sin: return sin(w);
    case Func::Cos: return cos(w);
    case Func::Exp: return exp(w);
    case Func::Ln: return log(w);
    case Func::Sqrt: return sqrt(w);
    }
    throw Error("unreachable: bad Func");
}

inline double checked_div(double x, double y) {
    if (y == 0.0) throw DomainError("division by zero");
    return x / y;
}
inline WeilNumber checked_div(const WeilNumber& x, const WeilNumber& y) { return x / y; }

/// Evaluates over any scalar S with ring ops, pow_int, apply_func and
/// checked_div — in practice S = double or S = WeilNumber. The double
/// path and the real parts of the Weil path perform the identical
/// floating-point operation sequence, so they agree bit-for-bit.
template <class S>
S eval(const Expr& e, std::span<const S> p) {
    switch (e.kind) {
    case Expr::Kind::Num: return S(e.value);
    case Expr::Kind::Var:
        if (e.var < 0 || static_cast<std::size_t>(e.var) >= p.size())
            throw Error("variable x" + std::to_string(e.var + 1) +
                        " outside point of dimension " + std::to_string(p.size()));
        return p[static_cast<std::size_t>(e.var)];
    case Expr::Kind::Add: return eval(*e.a, p) + eval(*e.b, p);
    case Expr::Kind::Sub: return eval(*e.a, p) - eval(*e.b, p);
    case Expr::Kind::Mul: return eval(*e.a, p) * eval(*e.b, p);
    case Expr::Kind::Div: return checked_div(eval(*e.a, p), eval(*e.b, p));
    case Expr::Kind::Neg: return -eval(*e.a, p);
    case Expr::Kind::Pow: {
        S base = eval(*e.a, p);
        if (e.exponent < 0 && real_part(base) == 0.0)
            throw DomainError("negative power of a non-invertible value");
        return pow_int(base, e.exponent);
    }
    case Expr::Kind::Call: return apply_func(e.func, eval(*e.a, p));
    }
    throw Error("unreachable: bad Expr kind");
}

inline double eval_real(const Expr& e, std::span<const double> p) { return eval<double>(e, p); }
inline WeilNumber eval_weil(const Expr& e, std::span<const WeilNumber> p) {
    return eval<WeilNumber>(e, p);
}

namespace detail {

struct Token {
    enum class Type { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
    Type type = Type::End;
    double num = 0.0;
    bool is_integer = false;
    long long int_value = 0;
    std::string text;
    std::size_t offset = 0;
};

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto single = [&](Token::Type t, char c) {
        Token tok;
        tok.type = t;
        tok.text = std::string(1, c);
        tok.offset = i;
        out.push_back(tok);
        ++i;
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        switch (c) {
        case '+': single(Token::Type::Plus, c); continue;
        case '-': single(Token::Type::Minus, c); continue;
        case '*': single(Token::Type::Star, c); continue;
        case '/': single(Token::Type::Slash, c); continue;
        case '^': single(Token::Type::Caret, c); continue;
        case '(': single(Token::Type::LParen, c); continue;
        case ')': single(Token::Type::RParen, c); continue;
        case ',': single(Token::Type::Comma, c); continue;
        default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t start = i;
            bool integral = true;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            if (i < src.size() && src[i] == '.') {
                integral = false;
                ++i;
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t mark = i;
                ++i;
                if (i < src.size() && (src[i] == '+' || src[i] == '-')) ++i;
                if (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                    integral = false;
                    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                } else {
                    i = mark;  // "2e" — the 'e' is not part of the number
                }
            }
            Token tok;
            tok.type = Token::Type::Num;
            tok.text = std::string(src.substr(start, i - start));
            tok.offset = start;
            tok.num = std::strtod(tok.text.c_str(), nullptr);
            tok.is_integer = integral;
            if (integral) {
                errno = 0;
                tok.int_value = std::strtoll(tok.text.c_str(), nullptr, 10);
                if (errno == ERANGE) throw ParseError("integer literal out of range", start);
            }
            out.push_back(tok);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                                      src[i] == '_'))
                ++i;
            Token tok;
            tok.type = Token::Type::Ident;
            tok.text = std::string(src.substr(start, i - start));
            tok.offset = start;
            out.push_back(tok);
            continue;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", i);
    }
    Token end;
    end.type = Token::Type::End;
    end.offset = src.size();
    end.text = "end of input";
    out.push_back(end);
    return out;
}

/// Returns the 0-based variable index for x/y/z or x1..x8, or -1.
inline int variable_index(const std::string& name) {
    if (name == "x") return 0;
    if (name == "y") return 1;
    if (name == "z") return 2;
    if (name.size() >= 2 && name[0] == 'x') {
        for (std::size_t i = 1; i < name.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
        long v = std::strtol(name.c_str() + 1, nullptr, 10);
        if (v >= 1 && v <= kMaxVariables) return static_cast<int>(v) - 1;
        return -2;  // xN with N out of range
    }
    return -1;
}

class Parser {
public:
    Parser(std::string_view src, int dim) : toks_(lex(src)), dim_(dim) {}

    ExprPtr run() {
        ExprPtr e = parse_sum();
        if (peek().type != Token::Type::End)
            throw ParseError("unexpected token '" + peek().text + "'", peek().offset);
        return e;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& get() { return toks_[i_++]; }
    bool accept(Token::Type t) {
        if (peek().type == t) {
            ++i_;
            return true;
        }
        return false;
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_product();
        for (;;) {
            if (accept(Token::Type::Plus)) e = Expr::add(e, parse_product());
            else if (accept(Token::Type::Minus)) e = Expr::sub(e, parse_product());
            else return e;
        }
    }

    ExprPtr parse_product() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (accept(Token::Type::Star)) e = Expr::mul(e, parse_unary());
            else if (accept(Token::Type::Slash)) e = Expr::div(e, parse_unary());
            else return e;
        }
    }

    ExprPtr parse_unary() {
        if (accept(Token::Type::Minus)) return Expr::neg(parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (!accept(Token::Type::Caret)) return base;
        bool negated = accept(Token::Type::Minus);
        const Token& t = peek();
        if (t.type != Token::Type::Num || !t.is_integer)
            throw ParseError("expected integer exponent after '^'", t.offset);
        get();
        if (t.int_value > 1000000)
            throw ParseError("exponent out of range", t.offset);
        int exponent = static_cast<int>(t.int_value);
        return Expr::pow(base, negated ? -exponent : exponent);
    }

    ExprPtr parse_atom() {
        const Token& t = peek();
        switch (t.type) {
        case Token::Type::Num:
            get();
            return Expr::num(t.num);
        case Token::Type::LParen: {
            get();
            ExprPtr e = parse_sum();
            if (!accept(Token::Type::RParen))
                throw ParseError("expected ')'", peek().offset);
            return e;
        }
        case Token::Type::Ident: {
            Token id = get();
            if (peek().type == Token::Type::LParen) {
                Func f;
                if (id.text == "sin") f = Func::Sin;
                else if (id.text == "cos") f = Func::Cos;
                else if (id.text == "exp") f = Func::Exp;
                else if (id.text == "ln" || id.text == "log") f = Func::Ln;
                else if (id.text == "sqrt") f = Func::Sqrt;
                else throw ParseError("unknown function '" + id.text + "'", id.offset);
                get();  // '('
                ExprPtr arg = parse_sum();
                if (!accept(Token::Type::RParen))
                    throw ParseError("expected ')'", peek().offset);
                return Expr::call(f, arg);
            }
            if (id.text == "sin" || id.text == "cos" || id.text == "exp" ||
                id.text == "ln" || id.text == "log" || id.text == "sqrt")
                throw ParseError("function '" + id.text + "' needs a parenthesized argument",
                                 peek().offset);
            int v = variable_index(id.text);
            if (v == -2)
                throw ParseError("variable '" + id.text + "' exceeds the " +
                                     std::to_string(kMaxVariables) + "-variable limit",
                                 id.offset);
            if (v < 0)
                throw ParseError("unknown variable '" + id.text + "'", id.offset);
            if (dim_ >= 0 && v >= dim_)
                throw ParseError("variable '" + id.text + "' exceeds declared dimension " +
                                     std::to_string(dim_),
                                 id.offset);
            return Expr::variable(v);
        }
        default:
            if (t.type == Token::Type::End)
                throw ParseError("unexpected end of input", t.offset);
            throw ParseError("unexpected token '" + t.text + "'", t.offset);
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    int dim_;
};

}  // namespace detail

/// Parses infix text into an AST. Precedence ^ > unary- > * / > + -;
/// exponents are integer literals; no implicit multiplication.
/// dim >= 0 rejects variables at or beyond that index; dim < 0 allows
/// any of x1..x8.
inline ExprPtr parse(std::string_view src, int dim = -1) {
    return detail::Parser(src, dim).run();
}

/// Shortest decimal string that reads back as exactly v.
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace detail {

inline int print_level(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    case Expr::Kind::Num:
        // A negative literal prints with a leading '-', so it binds like
        // unary minus: (-2)^2 must keep its parentheses.
        return std::signbit(e.value) ? 3 : 5;
    default: return 5;
    }
}

inline const char* func_name(Func f) {
    switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
    }
    return "?";
}

inline std::string variable_name(int i) {
    switch (i) {
    case 0: return "x";
    case 1: return "y";
    case 2: return "z";
    default: return "x" + std::to_string(i + 1);
    }
}

inline void print_rec(std::ostringstream& os, const Expr& e, int min_level) {
    const bool paren = print_level(e) < min_level;
    if (paren) os << '(';
    switch (e.kind) {
    case Expr::Kind::Num: os << format_double(e.value); break;
    case Expr::Kind::Var: os << variable_name(e.var); break;
    case Expr::Kind::Add:
        print_rec(os, *e.a, 1);
        os << " + ";
        print_rec(os, *e.b, 2);
        break;
    case Expr::Kind::Sub:
        print_rec(os, *e.a, 1);
        os << " - ";
        print_rec(os, *e.b, 2);
        break;
    case Expr::Kind::Mul:
        print_rec(os, *e.a, 2);
        os << '*';
        print_rec(os, *e.b, 3);
        break;
    case Expr::Kind::Div:
        print_rec(os, *e.a, 2);
        os << '/';
        print_rec(os, *e.b, 3);
        break;
    case Expr::Kind::Neg:
        os << '-';
        print_rec(os, *e.a, 4);
        break;
    case Expr::Kind::Pow:
        print_rec(os, *e.a, 5);
        os << '^' << e.exponent;
        break;
    case Expr::Kind::Call:
        os << func_name(e.func) << '(';
        print_rec(os, *e.a, 0);
        os << ')';
        break;
    }
    if (paren) os << ')';
}

}  // namespace detail

/// Canonical text form; parse(to_string(e)) is structurally equal to e
/// for every AST the parser itself can produce.
inline std::string to_string(const Expr& e) {
    std::ostringstream os;
    detail::print_rec(os, e, 0);
    return os.str();
}

}  // namespace quadforms

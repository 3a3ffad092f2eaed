#include "nilmax/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "nilmax/error.hpp"

namespace nilmax {

struct Expr::Node {
    enum Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Func } kind;
    cplx value{};
    std::string func;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;

NodeP make(Expr::Node::Kind k, NodeP a = nullptr, NodeP b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodeP number(cplx v) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Num;
    n->value = v;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodeP parse() {
        NodeP n = expression();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return n;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorCode::ParseError, msg + " at column " + std::to_string(pos_ + 1) + " in '" + s_ + "'");
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodeP expression() {
        NodeP lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Expr::Node::Add, lhs, term());
            else if (accept('-')) lhs = make(Expr::Node::Sub, lhs, term());
            else return lhs;
        }
    }

    NodeP term() {
        NodeP lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Expr::Node::Mul, lhs, unary());
            else if (accept('/')) lhs = make(Expr::Node::Div, lhs, unary());
            else return lhs;
        }
    }

    NodeP unary() {
        if (accept('-')) return make(Expr::Node::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodeP power() {
        NodeP base = primary();
        if (accept('^')) return make(Expr::Node::Pow, base, unary());
        return base;
    }

    NodeP primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodeP n = expression();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            return number(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string id = s_.substr(start, pos_ - start);
            if (id == "x" || id == "z") return make(Expr::Node::Var);
            if (id == "i") return number(cplx(0.0, 1.0));
            if (id == "pi") return number(std::numbers::pi);
            if (id == "e") return number(std::numbers::e);
            static const char* funcs[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh"};
            for (const char* f : funcs) {
                if (id == f) {
                    if (!accept('(')) fail("expected '(' after " + id);
                    NodeP arg = expression();
                    if (!accept(')')) fail("expected ')'");
                    auto n = std::make_shared<Expr::Node>();
                    n->kind = Expr::Node::Func;
                    n->func = id;
                    n->a = arg;
                    return n;
                }
            }
            pos_ = start;
            fail("unknown identifier '" + id + "'");
        }
        fail("unexpected character");
    }
};

bool integer_exponent(const Dual& e, int& k) {
    if (e.d != cplx(0.0) || e.v.imag() != 0.0) return false;
    const double r = std::round(e.v.real());
    if (r != e.v.real() || std::abs(r) > 64) return false;
    k = static_cast<int>(r);
    return true;
}

Dual ipow(const Dual& a, int k) {
    if (k == 0) return {1.0, 0.0};
    if (k < 0) {
        const Dual p = ipow(a, -k);
        return {1.0 / p.v, -p.d / (p.v * p.v)};
    }
    cplx v = 1.0;
    for (int n = 0; n < k - 1; ++n) v *= a.v;
    return {v * a.v, static_cast<double>(k) * v * a.d};
}

Dual eval(const Expr::Node& n, cplx z) {
    using K = Expr::Node::Kind;
    switch (n.kind) {
        case K::Num: return {n.value, 0.0};
        case K::Var: return {z, 1.0};
        case K::Neg: {
            const Dual a = eval(*n.a, z);
            return {-a.v, -a.d};
        }
        case K::Add: {
            const Dual a = eval(*n.a, z), b = eval(*n.b, z);
            return {a.v + b.v, a.d + b.d};
        }
        case K::Sub: {
            const Dual a = eval(*n.a, z), b = eval(*n.b, z);
            return {a.v - b.v, a.d - b.d};
        }
        case K::Mul: {
            const Dual a = eval(*n.a, z), b = eval(*n.b, z);
            return {a.v * b.v, a.d * b.v + a.v * b.d};
        }
        case K::Div: {
            const Dual a = eval(*n.a, z), b = eval(*n.b, z);
            return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
        }
        case K::Pow: {
            const Dual a = eval(*n.a, z), b = eval(*n.b, z);
            int k = 0;
            if (integer_exponent(b, k)) return ipow(a, k);
            const cplx v = std::pow(a.v, b.v);
            return {v, v * (b.d * std::log(a.v) + b.v * a.d / a.v)};
        }
        case K::Func: {
            const Dual a = eval(*n.a, z);
            const std::string& f = n.func;
            if (f == "sin") return {std::sin(a.v), std::cos(a.v) * a.d};
            if (f == "cos") return {std::cos(a.v), -std::sin(a.v) * a.d};
            if (f == "tan") {
                const cplx c = std::cos(a.v);
                return {std::tan(a.v), a.d / (c * c)};
            }
            if (f == "exp") {
                const cplx v = std::exp(a.v);
                return {v, v * a.d};
            }
            if (f == "log") return {std::log(a.v), a.d / a.v};
            if (f == "sqrt") {
                const cplx v = std::sqrt(a.v);
                return {v, 0.5 * a.d / v};
            }
            if (f == "sinh") return {std::sinh(a.v), std::cosh(a.v) * a.d};
            if (f == "cosh") return {std::cosh(a.v), std::sinh(a.v) * a.d};
            break;
        }
    }
    throw Error(ErrorCode::ParseError, "corrupt expression tree");
}

}  // namespace

Expr::Expr() : root_(number(0.0)), source_("0") {}

Expr Expr::parse(const std::string& source) {
    Expr e;
    e.root_ = Parser(source).parse();
    e.source_ = source;
    return e;
}

Expr Expr::constant(cplx c) {
    Expr e;
    e.root_ = number(c);
    e.source_ = "const";
    return e;
}

cplx Expr::operator()(cplx z) const { return eval(*root_, z).v; }

Dual Expr::eval_dual(cplx z) const { return eval(*root_, z); }

HoloFn HoloFn::constant(cplx c) {
    return {[c](cplx) { return Dual{c, 0.0}; }};
}

HoloFn HoloFn::polynomial(std::vector<cplx> coeffs) {
    return {[coeffs = std::move(coeffs)](cplx z) {
        Dual acc;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = {acc.v * z + *it, acc.d * z + acc.v};
        return acc;
    }};
}

HoloFn HoloFn::from_expr(const Expr& e) {
    return {[e](cplx z) { return e.eval_dual(z); }};
}

HoloFn HoloFn::parse(const std::string& source) { return from_expr(Expr::parse(source)); }

HoloFn operator+(const HoloFn& a, const HoloFn& b) {
    return {[a, b](cplx z) {
        const Dual x = a.fn(z), y = b.fn(z);
        return Dual{x.v + y.v, x.d + y.d};
    }};
}

HoloFn operator*(const HoloFn& a, const HoloFn& b) {
    return {[a, b](cplx z) {
        const Dual x = a.fn(z), y = b.fn(z);
        return Dual{x.v * y.v, x.d * y.v + x.v * y.d};
    }};
}

HoloFn operator*(cplx s, const HoloFn& a) {
    return {[s, a](cplx z) {
        const Dual x = a.fn(z);
        return Dual{s * x.v, s * x.d};
    }};
}

}  // namespace nilmax

#include "ccop/expr.hpp"

#include "ccop/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

namespace ccop {

namespace {

NodePtr make_const(double c) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = c;
    return n;
}

NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr, int exponent = 0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->exponent = exponent;
    return n;
}

bool is_const(const NodePtr& n) { return n->op == Op::Const; }
bool is_const(const NodePtr& n, double c) { return n->op == Op::Const && n->value == c; }

double int_pow(double base, int exponent) {
    double result = 1.0;
    for (int i = 0; i < exponent; ++i) result *= base;
    return result;
}

// Smart constructors. Constant subtrees are folded whenever the folded value
// is finite; additive/multiplicative identities are dropped. Parsing and
// differentiation both go through these, which is what makes the canonical
// printer round-trip.

NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b) && std::isfinite(a->value + b->value))
        return make_const(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make_node(Op::Add, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
    if (is_const(a)) return make_const(-a->value);
    if (a->op == Op::Neg) return a->lhs;
    return make_node(Op::Neg, std::move(a));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b) && std::isfinite(a->value - b->value))
        return make_const(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    return make_node(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b) && std::isfinite(a->value * b->value))
        return make_const(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make_node(Op::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b) && b->value != 0.0 && std::isfinite(a->value / b->value))
        return make_const(a->value / b->value);
    if (is_const(b, 1.0)) return a;
    if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
    return make_node(Op::Div, std::move(a), std::move(b));
}

NodePtr power(NodePtr a, int exponent) {
    if (exponent == 0) return make_const(1.0);
    if (exponent == 1) return a;
    if (is_const(a) && std::isfinite(int_pow(a->value, exponent)))
        return make_const(int_pow(a->value, exponent));
    return make_node(Op::Pow, std::move(a), nullptr, exponent);
}

bool in_domain(Op fn, double v) {
    switch (fn) {
        case Op::Log: return v > 0.0;
        case Op::Sqrt: return v >= 0.0;
        default: return true;
    }
}

double apply_fn(Op fn, double v) {
    switch (fn) {
        case Op::Sin: return std::sin(v);
        case Op::Cos: return std::cos(v);
        case Op::Exp: return std::exp(v);
        case Op::Log: return std::log(v);
        case Op::Sqrt: return std::sqrt(v);
        default: return v;
    }
}

NodePtr function(Op fn, NodePtr a) {
    if (is_const(a) && in_domain(fn, a->value) && std::isfinite(apply_fn(fn, a->value)))
        return make_const(apply_fn(fn, a->value));
    return make_node(fn, std::move(a));
}

const char* function_name(Op fn) {
    switch (fn) {
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Sqrt: return "sqrt";
        default: return "?";
    }
}

// ---------------------------------------------------------------- printing

int precedence(const Node& n) {
    switch (n.op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        case Op::Const: return n.value < 0.0 || std::signbit(n.value) ? 3 : 5;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void print(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool parens, std::string& out) {
    if (parens) out += '(';
    print(n, out);
    if (parens) out += ')';
}

void print(const Node& n, std::string& out) {
    switch (n.op) {
        case Op::Const:
            out += format_number(n.value);
            return;
        case Op::Var:
            out += 'x';
            out += std::to_string(n.index);
            return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            const int p = precedence(n);
            print_wrapped(*n.lhs, precedence(*n.lhs) < p, out);
            out += n.op == Op::Add   ? " + "
                   : n.op == Op::Sub ? " - "
                   : n.op == Op::Mul ? " * "
                                     : " / ";
            // all binary operators are left-associative
            print_wrapped(*n.rhs, precedence(*n.rhs) <= p, out);
            return;
        }
        case Op::Neg:
            out += '-';
            print_wrapped(*n.lhs, precedence(*n.lhs) < 3, out);
            return;
        case Op::Pow:
            print_wrapped(*n.lhs, precedence(*n.lhs) <= 4, out);
            out += '^';
            out += std::to_string(n.exponent);
            return;
        default:
            out += function_name(n.op);
            out += '(';
            print(*n.lhs, out);
            out += ')';
            return;
    }
}

// -------------------------------------------------------------- evaluation

double eval(const Node& n, std::span<const double> x) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return x[static_cast<std::size_t>(n.index - 1)];
        case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
        case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
        case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
        case Op::Div: {
            const double den = eval(*n.rhs, x);
            if (den == 0.0) {
                std::string s;
                print(n, s);
                throw DomainError("division by zero", s);
            }
            return eval(*n.lhs, x) / den;
        }
        case Op::Pow: return int_pow(eval(*n.lhs, x), n.exponent);
        case Op::Neg: return -eval(*n.lhs, x);
        default: {
            const double arg = eval(*n.lhs, x);
            if (!in_domain(n.op, arg)) {
                std::string s;
                print(n, s);
                throw DomainError(n.op == Op::Log ? "log of nonpositive argument"
                                                  : "sqrt of negative argument",
                                  s);
            }
            return apply_fn(n.op, arg);
        }
    }
}

int max_var(const Node& n) {
    int m = n.op == Op::Var ? n.index : 0;
    if (n.lhs) m = std::max(m, max_var(*n.lhs));
    if (n.rhs) m = std::max(m, max_var(*n.rhs));
    return m;
}

// ---------------------------------------------------------- differentiation

NodePtr diff(const NodePtr& p, int index) {
    const Node& n = *p;
    switch (n.op) {
        case Op::Const: return make_const(0.0);
        case Op::Var: return make_const(n.index == index ? 1.0 : 0.0);
        case Op::Add: return add(diff(n.lhs, index), diff(n.rhs, index));
        case Op::Sub: return sub(diff(n.lhs, index), diff(n.rhs, index));
        case Op::Neg: return neg(diff(n.lhs, index));
        case Op::Mul:
            return add(mul(diff(n.lhs, index), n.rhs), mul(n.lhs, diff(n.rhs, index)));
        case Op::Div: {
            // (a/b)' = (a' b - a b') / b^2
            NodePtr num = sub(mul(diff(n.lhs, index), n.rhs), mul(n.lhs, diff(n.rhs, index)));
            return div(std::move(num), power(n.rhs, 2));
        }
        case Op::Pow:
            return mul(mul(make_const(static_cast<double>(n.exponent)),
                           power(n.lhs, n.exponent - 1)),
                       diff(n.lhs, index));
        case Op::Sin: return mul(function(Op::Cos, n.lhs), diff(n.lhs, index));
        case Op::Cos: return neg(mul(function(Op::Sin, n.lhs), diff(n.lhs, index)));
        case Op::Exp: return mul(p, diff(n.lhs, index));
        case Op::Log: return div(diff(n.lhs, index), n.lhs);
        case Op::Sqrt: return div(diff(n.lhs, index), mul(make_const(2.0), p));
    }
    return make_const(0.0);
}

bool equal(const Node& a, const Node& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
        case Op::Const:
            return std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value);
        case Op::Var: return a.index == b.index;
        case Op::Pow: return a.exponent == b.exponent && equal(*a.lhs, *b.lhs);
        default:
            if (!equal(*a.lhs, *b.lhs)) return false;
            if (a.rhs || b.rhs) return a.rhs && b.rhs && equal(*a.rhs, *b.rhs);
            return true;
    }
}

// ------------------------------------------------------------------ parser

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        skip_ws();
        if (pos_ == src_.size()) fail("empty expression");
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
        throw ParseError("expression syntax error at offset " + std::to_string(at) + ": " + msg, at);
    }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                      src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' but reached end");
            fail(std::string("expected '") + c + "'");
        }
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = add(lhs, term());
            else if (accept('-'))
                lhs = sub(lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = mul(lhs, unary());
            else if (accept('/'))
                lhs = div(lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return neg(unary());
        if (accept('+')) return unary();
        return pow_expr();
    }

    NodePtr pow_expr() {
        NodePtr base = primary();
        if (accept('^')) return power(base, exponent());
        return base;
    }

    int exponent() {
        skip_ws();
        const std::size_t start = pos_;
        std::size_t end = start;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        const bool is_int = end > start &&
                            (end == src_.size() ||
                             (src_[end] != '.' && src_[end] != 'e' && src_[end] != 'E'));
        if (!is_int) fail_at("exponent must be a nonnegative integer literal", start);
        int value = 0;
        auto res = std::from_chars(src_.data() + start, src_.data() + end, value);
        if (res.ec != std::errc()) fail_at("exponent out of range", start);
        pos_ = end;
        if (accept('^')) {
            const int outer = exponent();
            // right-associative: a^b^c = a^(b^c)
            long double v = 1.0L;
            for (int i = 0; i < outer; ++i) {
                v *= value;
                if (v > 1e6L) fail_at("exponent out of range", start);
            }
            value = static_cast<int>(v);
        }
        if (value > 1000000) fail_at("exponent out of range", start);
        return value;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        double v = 0.0;
        auto res = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v,
                                   std::chars_format::general);
        if (res.ec != std::errc() || !std::isfinite(v)) fail_at("malformed number", start);
        pos_ = static_cast<std::size_t>(res.ptr - src_.data());
        return make_const(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);

        if (name.size() >= 2 && name[0] == 'x' &&
            name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
            int index = 0;
            auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (res.ec != std::errc() || index < 1)
                fail_at("variable index must be a positive integer in '" + std::string(name) + "'",
                        start);
            auto n = std::make_shared<Node>();
            n->op = Op::Var;
            n->index = index;
            return n;
        }

        Op fn;
        if (name == "sin")
            fn = Op::Sin;
        else if (name == "cos")
            fn = Op::Cos;
        else if (name == "exp")
            fn = Op::Exp;
        else if (name == "log")
            fn = Op::Log;
        else if (name == "sqrt")
            fn = Op::Sqrt;
        else
            fail_at("unknown identifier '" + std::string(name) + "'", start);

        expect('(');
        NodePtr arg = expr();
        expect(')');
        return function(fn, std::move(arg));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

// ------------------------------------------------------------------- Expr

Expr::Expr() : root_(make_const(0.0)) {}
Expr::Expr(NodePtr root) : root_(std::move(root)), max_var_(max_var(*root_)) {}

Expr Expr::constant(double c) { return Expr(make_const(c)); }

Expr Expr::variable(int index) {
    if (index < 1) throw DimensionError("variable index must be >= 1");
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->index = index;
    return Expr(std::move(n));
}


double Expr::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) < max_variable())
        throw DimensionError("point has fewer coordinates than the expression uses");
    const double v = eval(*root_, x);
    if (!std::isfinite(v)) throw DomainError("non-finite value", to_string());
    return v;
}

double Expr::evaluate(const Eigen::VectorXd& x) const {
    return evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Expr Expr::derivative(int index) const { return Expr(diff(root_, index)); }

std::string Expr::to_string() const {
    std::string out;
    print(*root_, out);
    return out;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.root_, b.root_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.root_, b.root_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.root_, b.root_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(div(a.root_, b.root_)); }
Expr operator-(const Expr& a) { return Expr(neg(a.root_)); }
Expr pow(const Expr& a, int exponent) {
    if (exponent < 0) throw DimensionError("negative exponent");
    return Expr(power(a.root_, exponent));
}
Expr apply(Op fn, const Expr& a) { return Expr(function(fn, a.root_)); }

bool structurally_equal(const Expr& a, const Expr& b) { return equal(a.root(), b.root()); }

Expr parse(std::string_view source) { return Expr(Parser(source).parse_all()); }

// ---------------------------------------------------------- SmoothFunction

SmoothFunction::SmoothFunction(Expr e, int n) : expr_(std::move(e)), n_(n) {
    if (expr_.max_variable() > n)
        throw DimensionError("expression references x" + std::to_string(expr_.max_variable()) +
                             " but n = " + std::to_string(n));
    gradient_.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) gradient_.push_back(expr_.derivative(i));
    hessian_upper_.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j)
            hessian_upper_.push_back(gradient_[static_cast<std::size_t>(i - 1)].derivative(j));
}

double SmoothFunction::value(const Eigen::VectorXd& x) const { return expr_.evaluate(x); }

Eigen::VectorXd SmoothFunction::gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g(n_);
    for (int i = 0; i < n_; ++i) g[i] = gradient_[static_cast<std::size_t>(i)].evaluate(x);
    return g;
}

DiffBundle SmoothFunction::evaluate(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw DimensionError("point dimension does not match function dimension");
    DiffBundle b;
    b.value = expr_.evaluate(x);
    b.gradient = gradient(x);
    b.hessian.resize(n_, n_);
    std::size_t k = 0;
    for (int i = 0; i < n_; ++i) {
        for (int j = i; j < n_; ++j) {
            const double v = hessian_upper_[k++].evaluate(x);
            b.hessian(i, j) = v;
            b.hessian(j, i) = v;
        }
    }
    return b;
}

DiffBundle differentiate(const Expr& e, const Eigen::VectorXd& x) {
    return SmoothFunction(e, static_cast<int>(x.size())).evaluate(x);
}

}  // namespace ccop

#pragma once

// Scalar expressions over x1..xn with exact symbolic first and second
// derivatives.
//
// Grammar (see docs/problem-format.md):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' exponent)?
//   exponent:= INT ('^' exponent)?          nonnegative integer literals only
//   primary := NUMBER | 'x' INT | FUNC '(' expr ')' | '(' expr ')'
//   FUNC    := sin | cos | exp | log | sqrt

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ccop {

enum class Op : std::uint8_t {
    Const,
    Var,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Const;
    double value = 0.0;  // Const
    int index = 0;       // Var (1-based)
    int exponent = 0;    // Pow
    NodePtr lhs;         // unary operand or left operand
    NodePtr rhs;
};

/// Immutable expression handle. Copies share the underlying tree.
class Expr {
public:
    Expr();  // constant 0
    explicit Expr(NodePtr root);

    static Expr constant(double c);
    static Expr variable(int index);

    const Node& root() const { return *root_; }
    const NodePtr& node() const { return root_; }

    /// Largest variable index referenced, 0 for constants.
    int max_variable() const { return max_var_; }

    bool is_constant() const { return root_->op == Op::Const; }
    bool is_zero() const { return is_constant() && root_->value == 0.0; }

    /// Value at x (x[0] is x1). Throws DomainError.
    double evaluate(std::span<const double> x) const;
    double evaluate(const Eigen::VectorXd& x) const;

    /// Symbolic partial derivative with respect to x_index (1-based).
    Expr derivative(int index) const;

    /// Canonical text; parse(print()) reproduces the same tree.
    std::string to_string() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& a, int exponent);
    friend Expr apply(Op fn, const Expr& a);

private:
    NodePtr root_;
    int max_var_ = 0;
};

/// Structural equality (constants compared bitwise).
bool structurally_equal(const Expr& a, const Expr& b);

Expr parse(std::string_view source);

struct DiffBundle {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

/// Builds the derivative expressions for a single evaluation. For repeated
/// evaluation use SmoothFunction.
DiffBundle differentiate(const Expr& e, const Eigen::VectorXd& x);

/// An expression in n variables with its gradient and Hessian expressions
/// precomputed. The Hessian is stored as its upper triangle and mirrored on
/// evaluation, so evaluated Hessians are exactly symmetric.
class SmoothFunction {
public:
    SmoothFunction() = default;
    SmoothFunction(Expr e, int n);

    const Expr& expr() const { return expr_; }
    int dimension() const { return n_; }

    double value(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    DiffBundle evaluate(const Eigen::VectorXd& x) const;

private:
    Expr expr_;
    int n_ = 0;
    std::vector<Expr> gradient_;
    std::vector<Expr> hessian_upper_;  // row-major upper triangle
};

}  // namespace ccop

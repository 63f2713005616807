#include "ccop/error.hpp"
#include "ccop/expr.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ccop;
using testutil::vec;

TEST(Expr, EvaluatesPolynomial) {
    const Expr e = parse("(x1-1)^2 + 3*(x1-1)*(x2-1) + (x2-1)^2 + x3^2");
    EXPECT_DOUBLE_EQ(e.evaluate(vec({1, 1, 0})), 0.0);
    EXPECT_DOUBLE_EQ(e.evaluate(vec({2, 3, 1})), 1 + 6 + 4 + 1);
    EXPECT_EQ(e.max_variable(), 3);
}

TEST(Expr, PrecedenceAndAssociativity) {
    EXPECT_DOUBLE_EQ(parse("-x1^2").evaluate(vec({3})), -9.0);
    EXPECT_DOUBLE_EQ(parse("2^3^2").evaluate(vec({0})), 512.0);
    EXPECT_DOUBLE_EQ(parse("8 / 4 / 2").evaluate(vec({0})), 1.0);
    EXPECT_DOUBLE_EQ(parse("1 - 2 - 3").evaluate(vec({0})), -4.0);
    EXPECT_DOUBLE_EQ(parse("2 * x1 + 3 * x2 ^ 2").evaluate(vec({1, 2})), 14.0);
}

TEST(Expr, Functions) {
    const Expr e = parse("sin(x1) + cos(x2) + exp(x1 * x2) + log(1 + x1^2) + sqrt(4 + x2)");
    const double x1 = 0.3, x2 = -0.7;
    const double want =
        std::sin(x1) + std::cos(x2) + std::exp(x1 * x2) + std::log(1 + x1 * x1) + std::sqrt(4 + x2);
    EXPECT_NEAR(e.evaluate(vec({x1, x2})), want, 1e-15);
}

TEST(Expr, SymbolicDerivativesOfQuadratic) {
    const Expr e = parse("x1^2 + 3*x1*x2 + x2^2");
    const DiffBundle d = differentiate(e, vec({1.0, 2.0}));
    EXPECT_DOUBLE_EQ(d.value, 1 + 6 + 4);
    EXPECT_DOUBLE_EQ(d.gradient(0), 2 * 1 + 3 * 2);
    EXPECT_DOUBLE_EQ(d.gradient(1), 3 * 1 + 2 * 2);
    EXPECT_DOUBLE_EQ(d.hessian(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(d.hessian(0, 1), 3.0);
    EXPECT_DOUBLE_EQ(d.hessian(1, 0), 3.0);
    EXPECT_DOUBLE_EQ(d.hessian(1, 1), 2.0);
}

TEST(Expr, DerivativeOfTranscendentals) {
    const Expr e = parse("exp(x1) * sin(x2) / (1 + x1^2)");
    const Eigen::VectorXd x = vec({0.4, 1.1});
    const DiffBundle d = differentiate(e, x);
    auto f = [&](const Eigen::VectorXd& y) { return e.evaluate(y); };
    const Eigen::VectorXd g = testutil::fd_gradient(f, x);
    EXPECT_NEAR((d.gradient - g).norm(), 0.0, 1e-8);
    const Eigen::MatrixXd H = testutil::fd_hessian(f, x);
    EXPECT_NEAR((d.hessian - H).norm(), 0.0, 1e-5);
}

TEST(Expr, HessianIsExactlySymmetric) {
    const SmoothFunction f(parse("sin(x1*x2) * exp(x3) + x1^3*x2"), 3);
    const DiffBundle d = f.evaluate(vec({0.2, -1.3, 0.7}));
    EXPECT_EQ(d.hessian, d.hessian.transpose());
}

TEST(Expr, CanonicalPrinterRoundTrips) {
    for (const char* src : {"(x1-1)^2 + 3*(x1-1)*(x2-1) + (x2-1)^2 + x3^2", "-x1^2 - -x2",
                            "x1 / (x2 * x3) - x1 / x2 * x3", "sqrt(exp(-x1)) ^ 3",
                            "1e-3 * x1 - 0.5", "2 - (3 - x1)", "-(x1 + x2)^2"}) {
        const Expr a = parse(src);
        const Expr b = parse(a.to_string());
        EXPECT_TRUE(structurally_equal(a, b)) << src << " -> " << a.to_string();
        EXPECT_EQ(a.to_string(), b.to_string());
    }
}

TEST(Expr, PrinterKeepsValues) {
    const Expr a = parse("x1 - (x2 - x3) / (x1 * x2) ^ 2");
    const Expr b = parse(a.to_string());
    const Eigen::VectorXd x = vec({1.3, -0.4, 2.2});
    EXPECT_EQ(a.evaluate(x), b.evaluate(x));
}

TEST(Expr, OperatorsBuildTrees) {
    const Expr x1 = Expr::variable(1), x2 = Expr::variable(2);
    const Expr e = pow(x1 - Expr::constant(1), 2) + Expr::constant(3) * x1 * x2;
    EXPECT_DOUBLE_EQ(e.evaluate(vec({2, 5})), 1 + 30);
    EXPECT_EQ(e.max_variable(), 2);
}

TEST(Expr, DerivativeOfConstantIsZero) {
    EXPECT_TRUE(parse("3 + 4").derivative(1).is_zero());
    EXPECT_TRUE(parse("x2^2").derivative(1).is_zero());
}

TEST(Expr, ParseErrorsCarryOffset) {
    try {
        parse("x1 + * x2");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 5u);
    }
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("x1 + (x2"), ParseError);
    EXPECT_THROW(parse("foo(x1)"), ParseError);
    EXPECT_THROW(parse("x0"), ParseError);
    EXPECT_THROW(parse("x1 ^ 1.5"), ParseError);
    EXPECT_THROW(parse("x1 ^ -2"), ParseError);
    EXPECT_THROW(parse("x1 x2"), ParseError);
}

TEST(Expr, DomainErrorsNameTheSubterm) {
    try {
        parse("1 + log(x1 - 2)").evaluate(vec({1.0}));
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(e.subterm().find("log"), std::string::npos);
    }
    EXPECT_THROW(parse("sqrt(x1)").evaluate(vec({-1.0})), DomainError);
    EXPECT_THROW(parse("1 / x1").evaluate(vec({0.0})), DomainError);
}

TEST(Expr, DimensionMismatch) {
    EXPECT_THROW(parse("x3").evaluate(vec({1.0, 2.0})), DimensionError);
    EXPECT_THROW(SmoothFunction(parse("x3"), 2), DimensionError);
    EXPECT_THROW(Expr::variable(0), DimensionError);
}

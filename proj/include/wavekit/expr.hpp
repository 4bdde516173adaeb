#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wavekit/errors.hpp"

namespace wavekit::expr {

/* Expression grammar (recursive descent):
 *
 *   expr   := term (('+'|'-') term)*
 *   term   := factor (('*'|'/') factor)*
 *   factor := power
 *   power  := atom ('^' power)?
 *   atom   := number | 'u' | name | func '(' expr ')' | '(' expr ')' | '-' atom
 *
 * '^' is right-associative. Unary minus binds at the atom level, so
 * "-u^2" reads as (-u)^2. Functions: sqrt, abs, exp, ln, sin, cos.
 */

enum class UnaryOp { Neg, Sqrt, Abs, Exp, Ln, Sin, Cos };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable AST node. Trees are shared freely across threads.
struct Node {
    enum class Kind { Constant, Variable, Parameter, Unary, Binary };
    Kind kind;
    double value = 0.0;     // Constant
    std::string name;       // Parameter
    UnaryOp uop{};          // Unary
    BinaryOp bop{};         // Binary
    NodePtr lhs, rhs;       // Unary uses lhs only
};

class Expression {
public:
    Expression() = default;
    explicit Expression(NodePtr root) : root_(std::move(root)) {}

    const NodePtr& root() const { return root_; }
    bool empty() const { return root_ == nullptr; }

    /// Render back to source text, parenthesised so that re-parsing yields
    /// a structurally identical tree.
    std::string unparse() const;

    /// Expression for the pointwise negation (-this).
    Expression negated() const;

    /// Free parameter names appearing in the tree.
    std::vector<std::string> parameters() const;

    bool structurally_equal(const Expression& other) const;

private:
    NodePtr root_;
};

/// Parse source text into an AST. All free names must resolve in params.
Expression parse(const std::string& source,
                 const std::map<std::string, double>& params);

/// An evaluable real function of u in [0, 1]: a parsed expression with its
/// parameters bound. Immutable and reentrant after construction; the
/// constructor probes a grid over [0, 1] and throws EvalDomainError if the
/// expression leaves the real domain anywhere on it.
class ScalarFunction {
public:
    ScalarFunction() = default;
    ScalarFunction(Expression expr, std::map<std::string, double> params,
                   double eval_clamp = 1e-12);

    /// Convenience: parse + bind in one step.
    static ScalarFunction from_source(const std::string& source,
                                      const std::map<std::string, double>& params = {},
                                      double eval_clamp = 1e-12);

    double operator()(double u) const;

    const Expression& expression() const { return expr_; }
    const std::map<std::string, double>& params() const { return params_; }
    double eval_clamp() const { return clamp_; }

    /// Same expression, negated.
    ScalarFunction negated() const;

private:
    struct Instr {
        enum class Op { Push, Var, Add, Sub, Mul, Div, Pow, Neg, Sqrt, Abs, Exp, Ln, Sin, Cos };
        Op op;
        double operand = 0.0;
    };
    static constexpr int kStackCapacity = 192;

    void compile(const NodePtr& n);

    Expression expr_;
    std::map<std::string, double> params_;
    double clamp_ = 1e-12;
    std::vector<Instr> program_;
};

enum class Side { Left, Right, Central };

/// Richardson-extrapolated derivative of f at u0. Base step 1e-3 with four
/// halvings and two extrapolation levels. When the difference quotients
/// diverge monotonically (endpoint cusps such as sqrt(u) at 0) the signed
/// infinity is returned instead.
double derivative_at(const std::function<double(double)>& f, double u0, Side side);
double derivative_at(const ScalarFunction& f, double u0, Side side);

struct SecantLimit {
    double value = 0.0;
    bool converged = true;
};

/// Limit of h(u)/(u - u0) as u -> u0 from the given side, Richardson
/// extrapolated. Requires h(u0) = 0 within 1e-12. If h > 0 on the probed
/// side the result is clamped to be non-negative.
SecantLimit secant_limit_at(const std::function<double(double)>& h, double u0, Side side);
SecantLimit secant_limit_at(const ScalarFunction& h, double u0, Side side);

}  // namespace wavekit::expr

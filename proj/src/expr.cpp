#include "wavekit/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>

namespace wavekit::expr {

namespace {

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->value = v;
    return n;
}

NodePtr make_var() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    return n;
}

NodePtr make_param(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Parameter;
    n->name = std::move(name);
    return n;
}

NodePtr make_unary(UnaryOp op, NodePtr child) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->uop = op;
    n->lhs = std::move(child);
    return n;
}

NodePtr make_binary(BinaryOp op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->bop = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

struct Parser {
    const std::string& src;
    const std::map<std::string, double>& params;
    std::size_t pos = 0;
    int depth = 0;

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth > 128) throw ParseError("expression nested too deeply", p.pos);
        }
        ~DepthGuard() { --p.depth; }
    };

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos); }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (consume('+'))
                lhs = make_binary(BinaryOp::Add, lhs, parse_term());
            else if (peek() == '-' && (++pos, true))
                lhs = make_binary(BinaryOp::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_power();
        for (;;) {
            if (consume('*'))
                lhs = make_binary(BinaryOp::Mul, lhs, parse_power());
            else if (consume('/'))
                lhs = make_binary(BinaryOp::Div, lhs, parse_power());
            else
                return lhs;
        }
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^')) return make_binary(BinaryOp::Pow, base, parse_power());
        return base;
    }

    NodePtr parse_atom() {
        DepthGuard guard(*this);
        const char c = peek();
        if (c == '-') {
            ++pos;
            return make_unary(UnaryOp::Neg, parse_atom());
        }
        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail(c == '\0' ? "unexpected end of expression" : std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        skip_ws();
        const char* begin = src.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos += static_cast<std::size_t>(end - begin);
        return make_const(v);
    }

    NodePtr parse_name() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        const std::string name = src.substr(start, pos - start);

        static const std::map<std::string, UnaryOp> funcs = {
            {"sqrt", UnaryOp::Sqrt}, {"abs", UnaryOp::Abs}, {"exp", UnaryOp::Exp},
            {"ln", UnaryOp::Ln},     {"sin", UnaryOp::Sin}, {"cos", UnaryOp::Cos}};
        const auto fit = funcs.find(name);
        if (fit != funcs.end()) {
            if (!consume('(')) throw ArityMismatch(name, start);
            NodePtr arg = parse_expr();
            if (consume(',')) throw ArityMismatch(name, start);
            if (!consume(')')) fail("expected ')'");
            return make_unary(fit->second, arg);
        }
        if (name == "u") return make_var();
        if (params.count(name)) return make_param(name);
        throw UnknownIdentifier(name, start);
    }
};

int precedence(const Node& n) {
    if (n.kind != Node::Kind::Binary) {
        if (n.kind == Node::Kind::Unary && n.uop == UnaryOp::Neg) return 1;
        return 5;
    }
    switch (n.bop) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
    }
    return 5;
}

void unparse_node(const Node& n, std::ostringstream& out) {
    auto child = [&](const Node& c, bool need_parens) {
        if (need_parens) out << '(';
        unparse_node(c, out);
        if (need_parens) out << ')';
    };
    switch (n.kind) {
        case Node::Kind::Constant: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out << buf;
            return;
        }
        case Node::Kind::Variable: out << 'u'; return;
        case Node::Kind::Parameter: out << n.name; return;
        case Node::Kind::Unary: {
            if (n.uop == UnaryOp::Neg) {
                out << '-';
                child(*n.lhs, n.lhs->kind == Node::Kind::Binary);
                return;
            }
            const char* f = "";
            switch (n.uop) {
                case UnaryOp::Sqrt: f = "sqrt"; break;
                case UnaryOp::Abs: f = "abs"; break;
                case UnaryOp::Exp: f = "exp"; break;
                case UnaryOp::Ln: f = "ln"; break;
                case UnaryOp::Sin: f = "sin"; break;
                case UnaryOp::Cos: f = "cos"; break;
                case UnaryOp::Neg: break;
            }
            out << f << '(';
            unparse_node(*n.lhs, out);
            out << ')';
            return;
        }
        case Node::Kind::Binary: {
            const int p = precedence(n);
            const char* op = "";
            switch (n.bop) {
                case BinaryOp::Add: op = "+"; break;
                case BinaryOp::Sub: op = "-"; break;
                case BinaryOp::Mul: op = "*"; break;
                case BinaryOp::Div: op = "/"; break;
                case BinaryOp::Pow: op = "^"; break;
            }
            // Right operand of -, / and left operand of ^ need parens at
            // equal precedence; '^' is right-associative.
            const bool lp = precedence(*n.lhs) < p ||
                            (n.bop == BinaryOp::Pow && precedence(*n.lhs) <= p);
            const bool rp = precedence(*n.rhs) < p ||
                            (precedence(*n.rhs) == p &&
                             (n.bop == BinaryOp::Sub || n.bop == BinaryOp::Div));
            child(*n.lhs, lp);
            out << ' ' << op << ' ';
            child(*n.rhs, rp);
            return;
        }
    }
}

void collect_params(const NodePtr& n, std::set<std::string>& out) {
    if (!n) return;
    if (n->kind == Node::Kind::Parameter) out.insert(n->name);
    collect_params(n->lhs, out);
    collect_params(n->rhs, out);
}

bool nodes_equal(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Node::Kind::Constant: return a->value == b->value;
        case Node::Kind::Variable: return true;
        case Node::Kind::Parameter: return a->name == b->name;
        case Node::Kind::Unary:
            return a->uop == b->uop && nodes_equal(a->lhs, b->lhs);
        case Node::Kind::Binary:
            return a->bop == b->bop && nodes_equal(a->lhs, b->lhs) &&
                   nodes_equal(a->rhs, b->rhs);
    }
    return false;
}

}  // namespace

std::string Expression::unparse() const {
    std::ostringstream out;
    if (root_) unparse_node(*root_, out);
    return out.str();
}

Expression Expression::negated() const { return Expression(make_unary(UnaryOp::Neg, root_)); }

std::vector<std::string> Expression::parameters() const {
    std::set<std::string> s;
    collect_params(root_, s);
    return {s.begin(), s.end()};
}

bool Expression::structurally_equal(const Expression& other) const {
    return nodes_equal(root_, other.root_);
}

Expression parse(const std::string& source, const std::map<std::string, double>& params) {
    if (source.empty()) throw ParseError("empty expression", 0);
    Parser p{source, params};
    NodePtr root = p.parse_expr();
    p.skip_ws();
    if (p.pos != source.size()) p.fail("trailing characters");
    return Expression(std::move(root));
}

ScalarFunction::ScalarFunction(Expression expr, std::map<std::string, double> params,
                               double eval_clamp)
    : expr_(std::move(expr)), params_(std::move(params)), clamp_(eval_clamp) {
    if (expr_.empty()) throw ParseError("empty expression", 0);
    for (const auto& name : expr_.parameters())
        if (!params_.count(name)) throw UnknownIdentifier(name, 0);
    compile(expr_.root());

    int height = 0, peak = 0;
    for (const Instr& in : program_) {
        switch (in.op) {
            case Instr::Op::Push:
            case Instr::Op::Var: ++height; break;
            case Instr::Op::Add:
            case Instr::Op::Sub:
            case Instr::Op::Mul:
            case Instr::Op::Div:
            case Instr::Op::Pow: --height; break;
            default: break;
        }
        peak = std::max(peak, height);
    }
    if (peak > kStackCapacity) throw ParseError("expression nested too deeply", 0);

    // Construction fails if evaluation is undefined anywhere on [0, 1].
    for (int i = 0; i <= 256; ++i) (*this)(i / 256.0);
}

ScalarFunction ScalarFunction::from_source(const std::string& source,
                                           const std::map<std::string, double>& params,
                                           double eval_clamp) {
    return ScalarFunction(parse(source, params), params, eval_clamp);
}

ScalarFunction ScalarFunction::negated() const {
    return ScalarFunction(expr_.negated(), params_, clamp_);
}

void ScalarFunction::compile(const NodePtr& n) {
    using Op = Instr::Op;
    switch (n->kind) {
        case Node::Kind::Constant: program_.push_back({Op::Push, n->value}); return;
        case Node::Kind::Variable: program_.push_back({Op::Var}); return;
        case Node::Kind::Parameter:
            program_.push_back({Op::Push, params_.at(n->name)});
            return;
        case Node::Kind::Unary: {
            compile(n->lhs);
            Op op = Op::Neg;
            switch (n->uop) {
                case UnaryOp::Neg: op = Op::Neg; break;
                case UnaryOp::Sqrt: op = Op::Sqrt; break;
                case UnaryOp::Abs: op = Op::Abs; break;
                case UnaryOp::Exp: op = Op::Exp; break;
                case UnaryOp::Ln: op = Op::Ln; break;
                case UnaryOp::Sin: op = Op::Sin; break;
                case UnaryOp::Cos: op = Op::Cos; break;
            }
            program_.push_back({op});
            return;
        }
        case Node::Kind::Binary: {
            compile(n->lhs);
            compile(n->rhs);
            Op op = Op::Add;
            switch (n->bop) {
                case BinaryOp::Add: op = Op::Add; break;
                case BinaryOp::Sub: op = Op::Sub; break;
                case BinaryOp::Mul: op = Op::Mul; break;
                case BinaryOp::Div: op = Op::Div; break;
                case BinaryOp::Pow: op = Op::Pow; break;
            }
            program_.push_back({op});
            return;
        }
    }
}

double ScalarFunction::operator()(double u) const {
    using Op = Instr::Op;
    double stack[kStackCapacity];
    int top = -1;
    for (const Instr& in : program_) {
        switch (in.op) {
            case Op::Push: stack[++top] = in.operand; break;
            case Op::Var: stack[++top] = u; break;
            case Op::Add: --top; stack[top] += stack[top + 1]; break;
            case Op::Sub: --top; stack[top] -= stack[top + 1]; break;
            case Op::Mul: --top; stack[top] *= stack[top + 1]; break;
            case Op::Div:
                --top;
                if (stack[top + 1] == 0.0) throw EvalDomainError("division by zero", u);
                stack[top] /= stack[top + 1];
                break;
            case Op::Pow: {
                --top;
                const double r = std::pow(stack[top], stack[top + 1]);
                if (!std::isfinite(r))
                    throw EvalDomainError("power out of the real domain", u);
                stack[top] = r;
                break;
            }
            case Op::Neg: stack[top] = -stack[top]; break;
            case Op::Sqrt: {
                double a = stack[top];
                if (a < 0.0) {
                    if (a < -clamp_) throw EvalDomainError("sqrt of a negative", u);
                    a = 0.0;
                }
                stack[top] = std::sqrt(a);
                break;
            }
            case Op::Abs: stack[top] = std::fabs(stack[top]); break;
            case Op::Exp: stack[top] = std::exp(stack[top]); break;
            case Op::Ln:
                if (stack[top] <= 0.0) throw EvalDomainError("ln of a non-positive", u);
                stack[top] = std::log(stack[top]);
                break;
            case Op::Sin: stack[top] = std::sin(stack[top]); break;
            case Op::Cos: stack[top] = std::cos(stack[top]); break;
        }
    }
    return stack[0];
}

namespace {

constexpr double kBaseStep = 1e-3;
constexpr int kHalvings = 4;
constexpr double kDivergenceCap = 1e12;

// Monotone growth of the quotient magnitudes marks a power-law endpoint
// cusp: the extrapolation cannot settle and the limit is a signed infinity.
bool diverges_monotonically(const double* d, int n) {
    if (std::fabs(d[n - 1]) > kDivergenceCap) return true;
    for (int i = 0; i + 1 < n; ++i)
        if (!(std::fabs(d[i + 1]) >= 1.2 * std::fabs(d[i]))) return false;
    return std::fabs(d[n - 1]) > 10.0 &&
           std::fabs(d[n - 1]) >= 3.0 * std::fabs(d[0]);
}

// Two Richardson levels assuming an error expansion in powers of
// step^order. `ratio` is 2^order for step halving.
double richardson(const double* d, int n, double ratio, double* spread) {
    double t0[8], t1[8], t2[8];
    for (int i = 0; i < n; ++i) t0[i] = d[i];
    for (int i = 0; i + 1 < n; ++i) t1[i] = (ratio * t0[i + 1] - t0[i]) / (ratio - 1.0);
    const double r2 = ratio * ratio;
    for (int i = 0; i + 2 < n; ++i) t2[i] = (r2 * t1[i + 1] - t1[i]) / (r2 - 1.0);
    *spread = std::fabs(t2[n - 3] - t2[n - 4]);
    return t2[n - 3];
}

}  // namespace

double derivative_at(const std::function<double(double)>& f, double u0, Side side) {
    double d[kHalvings + 1];
    double step = kBaseStep;
    for (int j = 0; j <= kHalvings; ++j, step *= 0.5) {
        switch (side) {
            case Side::Central: d[j] = (f(u0 + step) - f(u0 - step)) / (2.0 * step); break;
            case Side::Right: d[j] = (f(u0 + step) - f(u0)) / step; break;
            case Side::Left: d[j] = (f(u0) - f(u0 - step)) / step; break;
        }
    }
    if (diverges_monotonically(d, kHalvings + 1))
        return d[kHalvings] > 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
    double spread = 0.0;
    const double ratio = side == Side::Central ? 4.0 : 2.0;
    return richardson(d, kHalvings + 1, ratio, &spread);
}

double derivative_at(const ScalarFunction& f, double u0, Side side) {
    return derivative_at([&f](double u) { return f(u); }, u0, side);
}

SecantLimit secant_limit_at(const std::function<double(double)>& h, double u0, Side side) {
    if (std::fabs(h(u0)) > 1e-12)
        throw EvalDomainError("secant limit requested at a non-zero of h", u0);
    const double sign = side == Side::Left ? -1.0 : 1.0;

    double d[kHalvings + 2];
    bool positive_quotient = true;
    double step = kBaseStep;
    const int n = kHalvings + 2;
    for (int j = 0; j < n; ++j, step *= 0.5) {
        d[j] = h(u0 + sign * step) / (sign * step);
        if (d[j] <= 0.0) positive_quotient = false;
    }
    double spread = 0.0;
    double value = richardson(d, n, 2.0, &spread);
    SecantLimit out;
    out.converged = spread <= 1e-6 * (1.0 + std::fabs(value));
    // A positive quotient on the probed side (h > 0 beyond u0, or h < 0
    // before it) forces a non-negative one-sided slope.
    out.value = positive_quotient ? std::max(value, 0.0) : value;
    return out;
}

SecantLimit secant_limit_at(const ScalarFunction& h, double u0, Side side) {
    return secant_limit_at([&h](double u) { return h(u); }, u0, side);
}

}  // namespace wavekit::expr

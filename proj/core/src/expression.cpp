#include "egm/expression.hpp"

#include <cctype>
#include <cmath>

#include "egm/parallel.hpp"

namespace egm {

namespace {

enum class Op { constant, var_tau, var_x, var_y, var_z, add, sub, mul_, div_, neg, sin_, cos_, exp_ };

} // namespace

struct Expression::Node {
    Op op;
    Complex value{};
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_node(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, Complex v = {}) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->value = v;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+'))
                lhs = make_node(Op::add, lhs, term());
            else if (eat('-'))
                lhs = make_node(Op::sub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (eat('*'))
                lhs = make_node(Op::mul_, lhs, unary());
            else if (eat('/'))
                lhs = make_node(Op::div_, lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (eat('-')) return make_node(Op::neg, unary());
        if (eat('+')) return unary();
        return primary();
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) throw ParseError("missing ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                s_[pos_] == 'e' || s_[pos_] == 'E' ||
                ((s_[pos_] == '+' || s_[pos_] == '-') && pos_ > start &&
                 (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
            ++pos_;
        try {
            const double v = std::stod(s_.substr(start, pos_ - start));
            return make_node(Op::constant, nullptr, nullptr, Complex(v));
        } catch (const std::exception&) {
            throw ParseError("malformed number", start);
        }
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "tau") return make_node(Op::var_tau);
        if (name == "x") return make_node(Op::var_x);
        if (name == "y") return make_node(Op::var_y);
        if (name == "z") return make_node(Op::var_z);
        if (name == "i") return make_node(Op::constant, nullptr, nullptr, IMAG_UNIT);
        if (name == "pi") return make_node(Op::constant, nullptr, nullptr, Complex(M_PI));
        if (name == "sin" || name == "cos" || name == "exp") {
            if (!eat('(')) throw ParseError("expected '(' after " + name, pos_);
            NodePtr arg = expr();
            if (!eat(')')) throw ParseError("missing ')' after " + name + " argument", pos_);
            const Op op = (name == "sin") ? Op::sin_ : (name == "cos") ? Op::cos_ : Op::exp_;
            return make_node(op, arg);
        }
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

Complex eval_node(const Expression::Node& n, double tau, double x, double y, double z) {
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::var_tau: return Complex(tau);
        case Op::var_x: return Complex(x);
        case Op::var_y: return Complex(y);
        case Op::var_z: return Complex(z);
        case Op::add: return eval_node(*n.lhs, tau, x, y, z) + eval_node(*n.rhs, tau, x, y, z);
        case Op::sub: return eval_node(*n.lhs, tau, x, y, z) - eval_node(*n.rhs, tau, x, y, z);
        case Op::mul_: return eval_node(*n.lhs, tau, x, y, z) * eval_node(*n.rhs, tau, x, y, z);
        case Op::div_: return eval_node(*n.lhs, tau, x, y, z) / eval_node(*n.rhs, tau, x, y, z);
        case Op::neg: return -eval_node(*n.lhs, tau, x, y, z);
        case Op::sin_: return std::sin(eval_node(*n.lhs, tau, x, y, z));
        case Op::cos_: return std::cos(eval_node(*n.lhs, tau, x, y, z));
        case Op::exp_: return std::exp(eval_node(*n.lhs, tau, x, y, z));
    }
    return {};
}

} // namespace

Expression::Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::~Expression() = default;

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).parse();
    e.text_ = text;
    return e;
}

Complex Expression::eval(double tau, double x, double y, double z) const {
    if (!root_) return {};
    return eval_node(*root_, tau, x, y, z);
}

namespace {

void check_finite_at(const Complex& v, double tau, const Vec3& p) {
    if (!finite(v))
        throw NonFiniteValue("expression produced a non-finite value at tau=" +
                             std::to_string(tau) + " x=" + std::to_string(p.x) +
                             " y=" + std::to_string(p.y) + " z=" + std::to_string(p.z));
}

} // namespace

BiquatField emit_expression_field(const std::string& expr, const Grid4& grid) {
    const Expression e = Expression::parse(expr);
    BiquatField out(grid);
    parallel_for(std::size_t(grid.nt), [&](std::size_t b, std::size_t en) {
        for (std::size_t itz = b; itz < en; ++itz) {
            const int it = int(itz);
            const double tau = grid.tau(it);
            for (int ix = 0; ix < grid.nx; ++ix)
                for (int iy = 0; iy < grid.ny; ++iy)
                    for (int iz = 0; iz < grid.nz; ++iz) {
                        const Vec3 p = grid.point(ix, iy, iz);
                        const Complex v = e.eval(tau, p.x, p.y, p.z);
                        check_finite_at(v, tau, p);
                        out.at(it, ix, iy, iz) = Biquaternion::scalar(v);
                    }
        }
    });
    return out;
}

BiquatField emit_component_field(const std::string& s, const std::string& v1,
                                 const std::string& v2, const std::string& v3,
                                 const Grid4& grid) {
    const Expression es = Expression::parse(s);
    const Expression e1 = Expression::parse(v1);
    const Expression e2 = Expression::parse(v2);
    const Expression e3 = Expression::parse(v3);
    BiquatField out(grid);
    parallel_for(std::size_t(grid.nt), [&](std::size_t b, std::size_t en) {
        for (std::size_t itz = b; itz < en; ++itz) {
            const int it = int(itz);
            const double tau = grid.tau(it);
            for (int ix = 0; ix < grid.nx; ++ix)
                for (int iy = 0; iy < grid.ny; ++iy)
                    for (int iz = 0; iz < grid.nz; ++iz) {
                        const Vec3 p = grid.point(ix, iy, iz);
                        const Biquaternion val{
                            es.eval(tau, p.x, p.y, p.z),
                            {e1.eval(tau, p.x, p.y, p.z), e2.eval(tau, p.x, p.y, p.z),
                             e3.eval(tau, p.x, p.y, p.z)}};
                        if (!finite(val)) check_finite_at(Complex(NAN, 0), tau, p);
                        out.at(it, ix, iy, iz) = val;
                    }
        }
    });
    return out;
}

} // namespace egm

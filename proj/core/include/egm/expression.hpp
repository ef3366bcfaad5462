#pragma once

#include <memory>
#include <string>

#include "egm/grid.hpp"

namespace egm {

/// Tiny closed-form expression language for initial data entry:
/// variables tau, x, y, z; operators + - * / with parentheses; functions
/// sin, cos, exp; numeric literals; the imaginary unit i and pi.
/// No user-defined functions.
class Expression {
public:
    /// Throws ParseError (with character position) on malformed input.
    static Expression parse(const std::string& text);

    Complex eval(double tau, double x, double y, double z) const;
    const std::string& text() const { return text_; }

    Expression();
    Expression(Expression&&) noexcept;
    Expression& operator=(Expression&&) noexcept;
    Expression(const Expression&);
    Expression& operator=(const Expression&);
    ~Expression();

    struct Node;  // exposed for the parser implementation only

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

/// Evaluates the expression into the scalar part of a biquaternion field.
/// Throws NonFiniteValue (naming the node coordinates) if any node value is
/// not finite.
BiquatField emit_expression_field(const std::string& expr, const Grid4& grid);

/// Full biquaternion field from four component expressions (scalar, v1..v3).
BiquatField emit_component_field(const std::string& s, const std::string& v1,
                                 const std::string& v2, const std::string& v3,
                                 const Grid4& grid);

} // namespace egm

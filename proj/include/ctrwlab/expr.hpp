#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ctrwlab {

// Coefficient expressions for the SDE and SDDE configs.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | variable | 'pi' | func '(' expr (',' expr)? ')' | '(' expr ')'
//
// Variables: t, y, ytilde, xdel, s. Unary functions: abs exp tanh sin cos log
// sqrt; binary: min max. Unset variables read as 0.
struct Vars {
    double t = 0.0;
    double y = 0.0;
    double ytilde = 0.0;
    double xdel = 0.0;
    double s = 0.0;
};

class Expr {
public:
    Expr() = default;
    static Expr parse(std::string_view src);
    static Expr constant(double c);

    double operator()(const Vars& v) const;
    const std::string& source() const { return src_; }
    bool is_constant() const;
    // Value when constant (or at the zero point otherwise).
    double constant_value() const;

    enum class Op : unsigned char {
        num, var_t, var_y, var_ytilde, var_xdel, var_s,
        neg, add, sub, mul, div, pow,
        abs, exp, tanh, sin, cos, log, sqrt, min, max
    };

private:
    struct Instr {
        Op op;
        double value;
    };
    std::vector<Instr> code_;
    std::string src_;
    int depth_ = 0;

    friend class ExprParser;
};

}  // namespace ctrwlab

#include "ctrwlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "ctrwlab/error.hpp"

namespace ctrwlab {

class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    Expr run() {
        Expr e;
        e.src_ = std::string(s_);
        out_ = &e;
        expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        if (e.code_.empty()) fail("empty expression");
        // stack depth for evaluation
        int d = 0, best = 0;
        for (const auto& in : e.code_) {
            switch (in.op) {
                case Expr::Op::num: case Expr::Op::var_t: case Expr::Op::var_y: case Expr::Op::var_ytilde:
                case Expr::Op::var_xdel: case Expr::Op::var_s:
                    ++d;
                    break;
                case Expr::Op::add: case Expr::Op::sub: case Expr::Op::mul: case Expr::Op::div:
                case Expr::Op::pow: case Expr::Op::min: case Expr::Op::max:
                    --d;
                    break;
                default:
                    break;
            }
            best = std::max(best, d);
        }
        e.depth_ = best;
        return e;
    }

private:
    using Op = Expr::Op;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParamError("EXPR_PARSE", msg + " at position " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(std::string_view tok) {
        skip();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void emit(Op op, double v = 0.0) { out_->code_.push_back({op, v}); }

    void expr() {
        term();
        for (;;) {
            if (eat("+")) {
                term();
                emit(Op::add);
            } else if (eat("-") || eat("−")) {
                term();
                emit(Op::sub);
            } else {
                return;
            }
        }
    }

    void term() {
        unary();
        for (;;) {
            if (eat("*") || eat("×")) {
                unary();
                emit(Op::mul);
            } else if (eat("/") || eat("÷")) {
                unary();
                emit(Op::div);
            } else {
                return;
            }
        }
    }

    void unary() {
        if (eat("-") || eat("−")) {
            unary();
            emit(Op::neg);
            return;
        }
        if (eat("+")) {
            unary();
            return;
        }
        power();
    }

    void power() {
        primary();
        if (eat("^") || eat("**")) {
            unary();
            emit(Op::pow);
        }
    }

    void primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::string tmp(s_.substr(pos_));
            char* end = nullptr;
            const double v = std::strtod(tmp.c_str(), &end);
            if (end == tmp.c_str()) fail("bad number");
            pos_ += static_cast<std::size_t>(end - tmp.c_str());
            emit(Op::num, v);
            return;
        }
        if (eat("(")) {
            expr();
            if (!eat(")")) fail("expected ')'");
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t b = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string id(s_.substr(b, pos_ - b));
            if (id == "t") return emit(Op::var_t);
            if (id == "y") return emit(Op::var_y);
            if (id == "ytilde") return emit(Op::var_ytilde);
            if (id == "xdel") return emit(Op::var_xdel);
            if (id == "s") return emit(Op::var_s);
            if (id == "pi") return emit(Op::num, std::numbers::pi);
            static const std::pair<const char*, Op> unary_fns[] = {{"abs", Op::abs}, {"exp", Op::exp},
                                                                   {"tanh", Op::tanh}, {"sin", Op::sin},
                                                                   {"cos", Op::cos}, {"log", Op::log},
                                                                   {"sqrt", Op::sqrt}};
            for (const auto& [name, op] : unary_fns) {
                if (id != name) continue;
                if (!eat("(")) fail("expected '(' after " + id);
                expr();
                if (!eat(")")) fail("expected ')'");
                return emit(op);
            }
            if (id == "min" || id == "max") {
                if (!eat("(")) fail("expected '(' after " + id);
                expr();
                if (!eat(",")) fail("expected ','");
                expr();
                if (!eat(")")) fail("expected ')'");
                return emit(id == "min" ? Op::min : Op::max);
            }
            pos_ = b;
            fail("unknown identifier '" + id + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    Expr* out_ = nullptr;
};

Expr Expr::parse(std::string_view src) { return ExprParser(src).run(); }

Expr Expr::constant(double c) {
    Expr e;
    e.code_.push_back({Op::num, c});
    e.depth_ = 1;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    e.src_ = buf;
    return e;
}

double Expr::operator()(const Vars& v) const {
    double st[64];
    std::vector<double> big;
    double* sp = st;
    if (depth_ > 64) {
        big.resize(static_cast<std::size_t>(depth_));
        sp = big.data();
    }
    double* top = sp;  // one past the last element
    for (const auto& in : code_) {
        switch (in.op) {
            case Op::num: *top++ = in.value; break;
            case Op::var_t: *top++ = v.t; break;
            case Op::var_y: *top++ = v.y; break;
            case Op::var_ytilde: *top++ = v.ytilde; break;
            case Op::var_xdel: *top++ = v.xdel; break;
            case Op::var_s: *top++ = v.s; break;
            case Op::neg: top[-1] = -top[-1]; break;
            case Op::add: --top; top[-1] += top[0]; break;
            case Op::sub: --top; top[-1] -= top[0]; break;
            case Op::mul: --top; top[-1] *= top[0]; break;
            case Op::div: --top; top[-1] /= top[0]; break;
            case Op::pow: --top; top[-1] = std::pow(top[-1], top[0]); break;
            case Op::min: --top; top[-1] = std::min(top[-1], top[0]); break;
            case Op::max: --top; top[-1] = std::max(top[-1], top[0]); break;
            case Op::abs: top[-1] = std::abs(top[-1]); break;
            case Op::exp: top[-1] = std::exp(top[-1]); break;
            case Op::tanh: top[-1] = std::tanh(top[-1]); break;
            case Op::sin: top[-1] = std::sin(top[-1]); break;
            case Op::cos: top[-1] = std::cos(top[-1]); break;
            case Op::log: top[-1] = std::log(top[-1]); break;
            case Op::sqrt: top[-1] = std::sqrt(top[-1]); break;
        }
    }
    return top[-1];
}

bool Expr::is_constant() const {
    for (const auto& in : code_)
        if (in.op == Op::var_t || in.op == Op::var_y || in.op == Op::var_ytilde || in.op == Op::var_xdel ||
            in.op == Op::var_s)
            return false;
    return !code_.empty();
}

double Expr::constant_value() const { return code_.empty() ? 0.0 : (*this)(Vars{}); }

}  // namespace ctrwlab

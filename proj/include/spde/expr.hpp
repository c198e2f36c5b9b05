#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

// Minimal arithmetic expression compiler for custom diffusion coefficients.
// Grammar: + - * / ^ (right assoc), unary minus, parentheses, variable `r`,
// functions abs sqrt exp log sin cos tanh, two-arg pow/min/max.
class Expression {
public:
    static Expression parse(const std::string& text) {
        Parser p(text);
        Expression e;
        e.root_ = p.parse_expr();
        p.skip_ws();
        if (!p.at_end())
            throw std::invalid_argument("expression: trailing input at '" +
                                        text.substr(p.pos()) + "'");
        return e;
    }

    double operator()(double r) const { return root_->eval(r); }

private:
    struct Node {
        virtual ~Node() = default;
        virtual double eval(double r) const = 0;
    };
    using NodePtr = std::unique_ptr<Node>;

    struct Const : Node {
        double value;
        explicit Const(double v) : value(v) {}
        double eval(double) const override { return value; }
    };
    struct Var : Node {
        double eval(double r) const override { return r; }
    };
    struct Unary : Node {
        double (*fn)(double);
        NodePtr arg;
        double eval(double r) const override { return fn(arg->eval(r)); }
    };
    struct Binary : Node {
        double (*fn)(double, double);
        NodePtr lhs, rhs;
        double eval(double r) const override { return fn(lhs->eval(r), rhs->eval(r)); }
    };

    class Parser {
    public:
        explicit Parser(const std::string& s) : s_(s) {}

        NodePtr parse_expr() {
            NodePtr lhs = parse_term();
            for (;;) {
                skip_ws();
                if (consume('+'))
                    lhs = make_binary([](double a, double b) { return a + b; },
                                      std::move(lhs), parse_term());
                else if (consume('-'))
                    lhs = make_binary([](double a, double b) { return a - b; },
                                      std::move(lhs), parse_term());
                else
                    return lhs;
            }
        }

        void skip_ws() {
            while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
        bool at_end() const { return i_ >= s_.size(); }
        std::size_t pos() const { return i_; }

    private:
        NodePtr parse_term() {
            NodePtr lhs = parse_power();
            for (;;) {
                skip_ws();
                if (consume('*'))
                    lhs = make_binary([](double a, double b) { return a * b; },
                                      std::move(lhs), parse_power());
                else if (consume('/'))
                    lhs = make_binary([](double a, double b) { return a / b; },
                                      std::move(lhs), parse_power());
                else
                    return lhs;
            }
        }

        NodePtr parse_power() {
            NodePtr base = parse_unary();
            skip_ws();
            if (consume('^'))
                return make_binary([](double a, double b) { return std::pow(a, b); },
                                   std::move(base), parse_power());
            return base;
        }

        NodePtr parse_unary() {
            skip_ws();
            if (consume('-')) {
                auto u = std::make_unique<Unary>();
                u->fn = [](double x) { return -x; };
                u->arg = parse_unary();
                return u;
            }
            consume('+');
            return parse_primary();
        }

        NodePtr parse_primary() {
            skip_ws();
            if (at_end()) throw std::invalid_argument("expression: unexpected end");
            const char c = s_[i_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (c == '(') {
                ++i_;
                NodePtr e = parse_expr();
                expect(')');
                return e;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
            throw std::invalid_argument(std::string("expression: unexpected '") + c + "'");
        }

        NodePtr parse_number() {
            std::size_t consumed = 0;
            const double v = std::stod(s_.substr(i_), &consumed);
            i_ += consumed;
            return std::make_unique<Const>(v);
        }

        NodePtr parse_name() {
            std::size_t j = i_;
            while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
                ++j;
            const std::string name = s_.substr(i_, j - i_);
            i_ = j;
            if (name == "r") return std::make_unique<Var>();
            if (name == "pi") return std::make_unique<Const>(M_PI);

            static const struct {
                const char* name;
                double (*fn)(double);
            } unary_fns[] = {{"abs", [](double x) { return std::abs(x); }},
                             {"sqrt", [](double x) { return std::sqrt(x); }},
                             {"exp", [](double x) { return std::exp(x); }},
                             {"log", [](double x) { return std::log(x); }},
                             {"sin", [](double x) { return std::sin(x); }},
                             {"cos", [](double x) { return std::cos(x); }},
                             {"tanh", [](double x) { return std::tanh(x); }}};
            for (const auto& f : unary_fns) {
                if (name == f.name) {
                    expect('(');
                    auto u = std::make_unique<Unary>();
                    u->fn = f.fn;
                    u->arg = parse_expr();
                    expect(')');
                    return u;
                }
            }

            static const struct {
                const char* name;
                double (*fn)(double, double);
            } binary_fns[] = {{"pow", [](double a, double b) { return std::pow(a, b); }},
                              {"min", [](double a, double b) { return std::fmin(a, b); }},
                              {"max", [](double a, double b) { return std::fmax(a, b); }}};
            for (const auto& f : binary_fns) {
                if (name == f.name) {
                    expect('(');
                    NodePtr lhs = parse_expr();
                    expect(',');
                    NodePtr rhs = parse_expr();
                    expect(')');
                    return make_binary(f.fn, std::move(lhs), std::move(rhs));
                }
            }
            throw std::invalid_argument("expression: unknown name '" + name + "'");
        }

        static NodePtr make_binary(double (*fn)(double, double), NodePtr lhs, NodePtr rhs) {
            auto b = std::make_unique<Binary>();
            b->fn = fn;
            b->lhs = std::move(lhs);
            b->rhs = std::move(rhs);
            return b;
        }

        bool consume(char c) {
            skip_ws();
            if (i_ < s_.size() && s_[i_] == c) {
                ++i_;
                return true;
            }
            return false;
        }
        void expect(char c) {
            if (!consume(c))
                throw std::invalid_argument(std::string("expression: expected '") + c + "'");
        }

        const std::string& s_;
        std::size_t i_ = 0;
    };

    std::shared_ptr<Node> root_;
};

}  // namespace spde

#include "levychain/expression.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace levychain {

namespace {

using Fn = std::function<double(std::span<const double>)>;

class Parser {
public:
    Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

    Fn parse() {
        Fn f = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Fn sum() {
        Fn lhs = product();
        while (true) {
            if (eat('+')) {
                Fn rhs = product();
                lhs = [lhs, rhs](std::span<const double> v) { return lhs(v) + rhs(v); };
            } else if (eat('-')) {
                Fn rhs = product();
                lhs = [lhs, rhs](std::span<const double> v) { return lhs(v) - rhs(v); };
            } else {
                return lhs;
            }
        }
    }

    Fn product() {
        Fn lhs = unary();
        while (true) {
            if (eat('*')) {
                Fn rhs = unary();
                lhs = [lhs, rhs](std::span<const double> v) { return lhs(v) * rhs(v); };
            } else if (eat('/')) {
                Fn rhs = unary();
                lhs = [lhs, rhs](std::span<const double> v) { return lhs(v) / rhs(v); };
            } else {
                return lhs;
            }
        }
    }

    Fn unary() {
        if (eat('-')) {
            Fn f = unary();
            return [f](std::span<const double> v) { return -f(v); };
        }
        if (eat('+')) return unary();
        return power();
    }

    // Right associative; binds tighter than unary minus on its left.
    Fn power() {
        Fn base = atom();
        if (eat('^')) {
            Fn ex = unary();
            return [base, ex](std::span<const double> v) { return std::pow(base(v), ex(v)); };
        }
        return base;
    }

    Fn atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (eat('(')) {
            Fn f = sum();
            if (!eat(')')) fail("expected ')'");
            return f;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double value = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            return [value](std::span<const double>) { return value; };
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            skip();
            if (pos_ < s_.size() && s_[pos_] == '(') return call(name);
            for (size_t i = 0; i < vars_.size(); ++i)
                if (vars_[i] == name) return [i](std::span<const double> v) { return v[i]; };
            if (name == "pi") return [](std::span<const double>) { return std::numbers::pi; };
            pos_ = start;
            fail("unknown variable '" + name + "'");
        }
        fail("unexpected character");
    }

    Fn call(const std::string& name) {
        eat('(');
        std::vector<Fn> args{sum()};
        while (eat(',')) args.push_back(sum());
        if (!eat(')')) fail("expected ')'");
        auto unary_fn = [&](double (*g)(double)) -> Fn {
            if (args.size() != 1) fail(name + " takes one argument");
            Fn a = args[0];
            return [a, g](std::span<const double> v) { return g(a(v)); };
        };
        if (name == "exp") return unary_fn([](double a) { return std::exp(a); });
        if (name == "log") return unary_fn([](double a) { return std::log(a); });
        if (name == "sqrt") return unary_fn([](double a) { return std::sqrt(a); });
        if (name == "abs") return unary_fn([](double a) { return std::abs(a); });
        if (name == "step") return unary_fn([](double a) { return a >= 0.0 ? 1.0 : 0.0; });
        if (name == "max" || name == "min") {
            if (args.size() != 2) fail(name + " takes two arguments");
            Fn a = args[0], b = args[1];
            if (name == "max") return [a, b](std::span<const double> v) { return std::max(a(v), b(v)); };
            return [a, b](std::span<const double> v) { return std::min(a(v), b(v)); };
        }
        fail("unknown function '" + name + "'");
    }

    const std::string& s_;
    const std::vector<std::string>& vars_;
    size_t pos_ = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t p = s.find(sep, start);
        out.push_back(s.substr(start, p - start));
        if (p == std::string::npos) return out;
        start = p + 1;
    }
}

}  // namespace

Expression::Expression(const std::string& text, std::vector<std::string> variables) : text_(text) {
    Parser p(text_, variables);
    fn_ = p.parse();
}

std::function<double(std::span<const double>)> parse_payoff(const std::string& spec, int dim) {
    auto parts = split(spec, ':');
    auto number = [&](size_t i) {
        if (i >= parts.size()) throw std::invalid_argument("payoff '" + spec + "': missing parameter");
        return std::stod(parts[i]);
    };
    if (parts[0] == "one") return [](std::span<const double>) { return 1.0; };
    if (parts[0] == "put" && parts.size() == 2) {
        double K = number(1);
        return [K](std::span<const double> x) { return std::max(K - x[0], 0.0); };
    }
    if (parts[0] == "call" && parts.size() == 2) {
        double K = number(1);
        return [K](std::span<const double> x) { return std::max(x[0] - K, 0.0); };
    }
    if (parts[0] == "indicator" && parts.size() == 3) {
        double a = number(1), b = number(2);
        return [a, b](std::span<const double> x) { return (x[0] >= a && x[0] <= b) ? 1.0 : 0.0; };
    }
    std::vector<std::string> vars;
    if (dim == 1) vars.push_back("x");
    for (int j = 1; j <= dim; ++j) vars.push_back("x" + std::to_string(j));
    auto expr = std::make_shared<Expression>(spec, vars);
    if (dim == 1) {
        return [expr](std::span<const double> x) {
            double v[2] = {x[0], x[0]};
            return (*expr)(std::span<const double>(v, 2));
        };
    }
    return [expr](std::span<const double> x) { return (*expr)(x); };
}

}  // namespace levychain

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace levychain {

/// Compiled arithmetic expression over named variables.
///
/// Grammar: numbers, variables, + - * / ^, unary minus, parentheses, and the
/// functions exp log sqrt abs max min step (step(a) = 1 if a >= 0 else 0).
/// The constant pi is predefined.
class Expression {
public:
    /// Throws std::invalid_argument with the offending position on bad input.
    Expression(const std::string& text, std::vector<std::string> variables);

    double operator()(std::span<const double> values) const { return fn_(values); }
    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::function<double(std::span<const double>)> fn_;
};

/// Payoff shorthands: "put:K", "call:K", "indicator:a:b", "one", or a raw
/// expression in x (d = 1) / x1..xd.
std::function<double(std::span<const double>)> parse_payoff(const std::string& spec, int dim = 1);

}  // namespace levychain

#pragma once

#include <span>
#include <string>
#include <vector>

namespace fiap {

// Small arithmetic grammar for user-supplied model functions: numeric
// constants, + - *, unary minus, abs, max, min, exp, and a declared set of
// variable names. Parsed once into a flat AST; eval takes the variable
// values in declaration order.
class Expr {
  public:
    static Expr parse(const std::string& text, const std::vector<std::string>& vars);

    double eval(std::span<const double> values) const;
    double eval1(double v) const;
    double eval2(double a, double b) const;

    const std::string& text() const { return text_; }
    bool is_constant() const;
    double constant_value() const;

  private:
    enum class Op { constant, variable, add, sub, neg, mul, abs, max, min, exp };

    struct Node {
        Op op;
        double value = 0.0;  // constant
        int a = -1;          // child indices
        int b = -1;
    };

    double eval_node(int idx, std::span<const double> values) const;

    std::string text_;
    std::vector<Node> nodes_;
    int root_ = -1;
    std::size_t n_vars_ = 0;
};

}  // namespace fiap

#include "fiap/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>

namespace fiap {

namespace {

struct Parser {
    const std::string& text;
    const std::vector<std::string>& vars;
    std::size_t pos = 0;

    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
    }

    bool consume(char c) {
        skip_space();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression error in \"" + text + "\" at offset " +
                                    std::to_string(pos) + ": " + what);
    }
};

}  // namespace

bool Expr::is_constant() const {
    return nodes_.size() == 1 && nodes_[0].op == Op::constant;
}

double Expr::constant_value() const {
    if (!is_constant()) {
        throw std::logic_error("Expr::constant_value on non-constant expression");
    }
    return nodes_[0].value;
}

double Expr::eval_node(int idx, std::span<const double> values) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
        case Op::constant:
            return n.value;
        case Op::variable:
            return values[static_cast<std::size_t>(n.a)];
        case Op::add:
            return eval_node(n.a, values) + eval_node(n.b, values);
        case Op::sub:
            return eval_node(n.a, values) - eval_node(n.b, values);
        case Op::neg:
            return -eval_node(n.a, values);
        case Op::mul:
            return eval_node(n.a, values) * eval_node(n.b, values);
        case Op::abs:
            return std::abs(eval_node(n.a, values));
        case Op::max:
            return std::max(eval_node(n.a, values), eval_node(n.b, values));
        case Op::min:
            return std::min(eval_node(n.a, values), eval_node(n.b, values));
        case Op::exp:
            return std::exp(eval_node(n.a, values));
    }
    throw std::logic_error("unreachable expression op");
}

double Expr::eval(std::span<const double> values) const {
    if (values.size() != n_vars_) {
        throw std::invalid_argument("Expr::eval: wrong number of variable values");
    }
    return eval_node(root_, values);
}

double Expr::eval1(double v) const {
    const double vals[1] = {v};
    return eval(std::span<const double>(vals, n_vars_));
}

double Expr::eval2(double a, double b) const {
    const double vals[2] = {a, b};
    return eval(std::span<const double>(vals, n_vars_));
}

Expr Expr::parse(const std::string& text, const std::vector<std::string>& vars) {
    Expr out;
    out.text_ = text;
    out.n_vars_ = vars.size();
    Parser p{text, vars};

    auto add_node = [&out](Node n) {
        out.nodes_.push_back(n);
        return static_cast<int>(out.nodes_.size()) - 1;
    };

    // expr := term (('+'|'-') term)*
    // term := unary ('*' unary)*
    // unary := '-' unary | primary
    // primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
    std::function<int()> parse_expr;

    auto parse_primary = [&]() -> int {
        p.skip_space();
        if (p.pos >= text.size()) {
            p.fail("unexpected end of input");
        }
        const char c = text[p.pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double value = std::strtod(text.c_str() + p.pos, &end);
            if (end == text.c_str() + p.pos) {
                p.fail("bad number");
            }
            p.pos = static_cast<std::size_t>(end - text.c_str());
            return add_node({Op::constant, value, -1, -1});
        }
        if (c == '(') {
            ++p.pos;
            const int inner = parse_expr();
            if (!p.consume(')')) {
                p.fail("expected ')'");
            }
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = p.pos;
            while (p.pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[p.pos])) || text[p.pos] == '_')) {
                ++p.pos;
            }
            const std::string name = text.substr(start, p.pos - start);
            if (p.consume('(')) {
                std::vector<int> args;
                args.push_back(parse_expr());
                while (p.consume(',')) {
                    args.push_back(parse_expr());
                }
                if (!p.consume(')')) {
                    p.fail("expected ')'");
                }
                if (name == "abs" && args.size() == 1) {
                    return add_node({Op::abs, 0.0, args[0], -1});
                }
                if (name == "exp" && args.size() == 1) {
                    return add_node({Op::exp, 0.0, args[0], -1});
                }
                if (name == "max" && args.size() == 2) {
                    return add_node({Op::max, 0.0, args[0], args[1]});
                }
                if (name == "min" && args.size() == 2) {
                    return add_node({Op::min, 0.0, args[0], args[1]});
                }
                p.fail("unknown function or wrong arity: " + name);
            }
            for (std::size_t i = 0; i < vars.size(); ++i) {
                if (vars[i] == name) {
                    return add_node({Op::variable, 0.0, static_cast<int>(i), -1});
                }
            }
            p.fail("unknown variable: " + name);
        }
        p.fail("unexpected character");
    };

    std::function<int()> parse_unary = [&]() -> int {
        if (p.consume('-')) {
            return add_node({Op::neg, 0.0, parse_unary(), -1});
        }
        return parse_primary();
    };

    auto parse_term = [&]() -> int {
        int lhs = parse_unary();
        while (p.consume('*')) {
            lhs = add_node({Op::mul, 0.0, lhs, parse_unary()});
        }
        return lhs;
    };

    parse_expr = [&]() -> int {
        int lhs = parse_term();
        while (true) {
            if (p.consume('+')) {
                lhs = add_node({Op::add, 0.0, lhs, parse_term()});
            } else if (p.consume('-')) {
                lhs = add_node({Op::sub, 0.0, lhs, parse_term()});
            } else {
                return lhs;
            }
        }
    };

    out.root_ = parse_expr();
    p.skip_space();
    if (p.pos != text.size()) {
        p.fail("trailing input");
    }

    // Fold a pure-constant tree so is_constant() reflects the value.
    bool any_var = false;
    for (const Node& n : out.nodes_) {
        if (n.op == Op::variable) {
            any_var = true;
            break;
        }
    }
    if (!any_var && out.nodes_.size() > 1) {
        const double value = out.eval_node(out.root_, {});
        out.nodes_.assign(1, Node{Op::constant, value, -1, -1});
        out.root_ = 0;
    }
    return out;
}

}  // namespace fiap

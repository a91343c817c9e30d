#include "nambu/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>
#include <type_traits>

namespace nambu {

namespace {

// -----------------------------------------------------------------------------
// Dual scalars
// -----------------------------------------------------------------------------

struct Dual {
    double v = 0.0;
    double d = 0.0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator-(Dual a) { return {-a.v, -a.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) {
    const double inv = 1.0 / b.v;
    return {a.v * inv, (a.d - a.v * b.d * inv) * inv};
}
Dual sqrt(Dual a) {
    const double r = std::sqrt(a.v);
    return {r, r > 0.0 ? a.d / (2.0 * r) : std::numeric_limits<double>::quiet_NaN()};
}

Dual powi(Dual a, long long e) {
    if (e == 0) return {1.0, 0.0};
    const bool neg = e < 0;
    unsigned long long k = neg ? (unsigned long long)(-e) : (unsigned long long)e;
    Dual acc{1.0, 0.0}, base = a;
    while (k) {
        if (k & 1ull) acc = acc * base;
        if (k >>= 1) base = base * base;
    }
    if (neg) return Dual{1.0, 0.0} / acc;
    return acc;
}

Dual pow(Dual a, Dual b, bool exponent_constant) {
    if (exponent_constant) {
        const double e = b.v;
        if (e == std::floor(e) && std::abs(e) <= 1024.0) return powi(a, (long long)e);
        const double val = std::pow(a.v, e);
        return {val, e * std::pow(a.v, e - 1.0) * a.d};
    }
    const double val = std::pow(a.v, b.v);
    return {val, val * (b.d * std::log(a.v) + b.v * a.d / a.v)};
}

double powi(double a, long long e) { return powi(Dual{a, 0.0}, e).v; }

double pow_plain(double a, double b, bool exponent_constant) {
    if (exponent_constant && b == std::floor(b) && std::abs(b) <= 1024.0)
        return powi(a, (long long)b);
    return std::pow(a, b);
}

} // namespace

// -----------------------------------------------------------------------------
// Parse tree
// -----------------------------------------------------------------------------

struct Expression::Tree {
    enum class Kind { number, variable, add, sub, mul, divide, power, negate, sqrt_fn };
    struct Node {
        Kind kind;
        double value = 0.0;
        int var = -1;
        int a = -1, b = -1;
        bool const_exponent = false;
    };
    std::vector<Node> nodes;
    int root = -1;

    bool is_constant(int idx) const {
        const Node& n = nodes[idx];
        switch (n.kind) {
        case Kind::number: return true;
        case Kind::variable: return false;
        case Kind::negate:
        case Kind::sqrt_fn: return is_constant(n.a);
        default: return is_constant(n.a) && is_constant(n.b);
        }
    }

    template <class T>
    T eval(int idx, std::span<const T> vars) const {
        const Node& n = nodes[idx];
        switch (n.kind) {
        case Kind::number: return T{n.value};
        case Kind::variable: return vars[n.var];
        case Kind::add: return eval(n.a, vars) + eval(n.b, vars);
        case Kind::sub: return eval(n.a, vars) - eval(n.b, vars);
        case Kind::mul: return eval(n.a, vars) * eval(n.b, vars);
        case Kind::divide: return eval(n.a, vars) / eval(n.b, vars);
        case Kind::negate: return -eval(n.a, vars);
        case Kind::sqrt_fn: {
            using std::sqrt;
            return sqrt(eval(n.a, vars));
        }
        case Kind::power: {
            if constexpr (std::is_same_v<T, double>) {
                return pow_plain(eval(n.a, vars), eval(n.b, vars), n.const_exponent);
            } else {
                return pow(eval(n.a, vars), eval(n.b, vars), n.const_exponent);
            }
        }
        }
        return T{};
    }
};

namespace {

struct Parser {
    std::string_view text;
    size_t pos = 0;
    std::span<const std::string> names;
    Expression::Tree& tree;

    using Kind = Expression::Tree::Kind;

    [[noreturn]] void fail(const std::string& what, size_t at) {
        throw ParseError("parse error at column " + std::to_string(at + 1) + ": " + what,
                         (int)at + 1);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool consume(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    int add_node(Expression::Tree::Node n) {
        tree.nodes.push_back(n);
        return (int)tree.nodes.size() - 1;
    }

    int parse_expression() {
        int left = parse_term();
        for (;;) {
            skip_ws();
            if (consume('+'))
                left = add_node({Kind::add, 0, -1, left, parse_term()});
            else if (consume('-'))
                left = add_node({Kind::sub, 0, -1, left, parse_term()});
            else
                return left;
        }
    }

    int parse_term() {
        int left = parse_unary();
        for (;;) {
            skip_ws();
            if (consume('*'))
                left = add_node({Kind::mul, 0, -1, left, parse_unary()});
            else if (consume('/'))
                left = add_node({Kind::divide, 0, -1, left, parse_unary()});
            else
                return left;
        }
    }

    int parse_unary() {
        skip_ws();
        if (consume('-')) return add_node({Kind::negate, 0, -1, parse_unary(), -1});
        return parse_power();
    }

    int parse_power() {
        const int base = parse_atom();
        skip_ws();
        if (consume('^')) {
            const int exponent = parse_unary();
            Expression::Tree::Node n{Kind::power, 0, -1, base, exponent};
            n.const_exponent = tree.is_constant(exponent);
            return add_node(n);
        }
        return base;
    }

    int parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression", pos);
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            const int inner = parse_expression();
            skip_ws();
            if (!consume(')')) fail("expected ')'", pos);
            return inner;
        }
        if (std::isdigit((unsigned char)c) || c == '.') return parse_number();
        if (std::isalpha((unsigned char)c) || c == '_') return parse_ident();
        fail(std::string("unexpected '") + c + "'", pos);
    }

    int parse_number() {
        const size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit((unsigned char)text[pos]) || text[pos] == '.'))
            ++pos;
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            size_t look = pos + 1;
            if (look < text.size() && (text[look] == '+' || text[look] == '-')) ++look;
            if (look < text.size() && std::isdigit((unsigned char)text[look])) {
                pos = look;
                while (pos < text.size() && std::isdigit((unsigned char)text[pos])) ++pos;
            }
        }
        const std::string token(text.substr(start, pos - start));
        char* end = nullptr;
        const double value = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') fail("malformed number", start);
        return add_node({Kind::number, value, -1, -1, -1});
    }

    int parse_ident() {
        const size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum((unsigned char)text[pos]) || text[pos] == '_'))
            ++pos;
        const std::string_view name = text.substr(start, pos - start);
        if (name == "sqrt") {
            skip_ws();
            if (!consume('(')) fail("sqrt needs parentheses", pos);
            const int inner = parse_expression();
            skip_ws();
            if (!consume(')')) fail("expected ')'", pos);
            return add_node({Kind::sqrt_fn, 0, -1, inner, -1});
        }
        for (size_t j = 0; j < names.size(); ++j)
            if (names[j] == name)
                return add_node({Kind::variable, 0, (int)j, -1, -1});
        fail("unknown coordinate '" + std::string(name) + "'", start);
    }
};

} // namespace

Expression Expression::parse(std::string_view text,
                             std::span<const std::string> coordinate_names) {
    auto tree = std::make_shared<Tree>();
    Parser parser{text, 0, coordinate_names, *tree};
    tree->root = parser.parse_expression();
    parser.skip_ws();
    if (parser.pos != text.size())
        parser.fail(std::string("unexpected '") + text[parser.pos] + "'", parser.pos);
    Expression expr;
    expr.tree_ = std::move(tree);
    expr.dim_ = (int)coordinate_names.size();
    return expr;
}

double Expression::value(std::span<const double> x) const {
    return tree_->eval<double>(tree_->root, x);
}

double Expression::derivative(std::span<const double> x, int direction) const {
    std::vector<Dual> vars(x.size());
    for (size_t j = 0; j < x.size(); ++j) vars[j] = {x[j], (int)j == direction ? 1.0 : 0.0};
    return tree_->eval<Dual>(tree_->root, vars).d;
}

ScalarField Expression::field() const {
    const Expression self = *this;
    return make_field(
        dim_, [self](std::span<const double> x) { return self.value(x); },
        [self](std::span<const double> x, std::span<double> g) {
            for (int j = 0; j < (int)x.size(); ++j) g[j] = self.derivative(x, j);
        });
}

ScalarField expression_field(std::string_view text,
                             std::span<const std::string> coordinate_names) {
    return Expression::parse(text, coordinate_names).field();
}

} // namespace nambu

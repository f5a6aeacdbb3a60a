#include "carter/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>

namespace carter {

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Sqrt: return "sqrt";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Abs: return "abs";
    }
    return "?";
}

Expr Expr::make(Node n) { return Expr(std::make_shared<const Node>(std::move(n))); }

Expr Expr::number(double v) {
    Node n;
    n.kind = ExprKind::Number;
    n.value = v;
    return make(std::move(n));
}

Expr Expr::symbol(std::string name) {
    Node n;
    n.kind = ExprKind::Symbol;
    n.name = std::move(name);
    return make(std::move(n));
}

Expr Expr::neg(Expr a) {
    if (a.kind() == ExprKind::Number) return number(-a.value());
    Node n;
    n.kind = ExprKind::Neg;
    n.children = {std::move(a)};
    return make(std::move(n));
}

Expr Expr::add(Expr a, Expr b) {
    Node n;
    n.kind = ExprKind::Add;
    n.children = {std::move(a), std::move(b)};
    return make(std::move(n));
}
Expr Expr::sub(Expr a, Expr b) {
    Node n;
    n.kind = ExprKind::Sub;
    n.children = {std::move(a), std::move(b)};
    return make(std::move(n));
}
Expr Expr::mul(Expr a, Expr b) {
    Node n;
    n.kind = ExprKind::Mul;
    n.children = {std::move(a), std::move(b)};
    return make(std::move(n));
}
Expr Expr::div(Expr a, Expr b) {
    Node n;
    n.kind = ExprKind::Div;
    n.children = {std::move(a), std::move(b)};
    return make(std::move(n));
}
Expr Expr::pow(Expr a, Expr b) {
    Node n;
    n.kind = ExprKind::Pow;
    n.children = {std::move(a), std::move(b)};
    return make(std::move(n));
}
Expr Expr::call(Func f, Expr a) {
    Node n;
    n.kind = ExprKind::Call;
    n.func = f;
    n.children = {std::move(a)};
    return make(std::move(n));
}

bool Expr::operator==(const Expr& other) const {
    if (node_ == other.node_) return true;
    if (!node_ || !other.node_) return false;
    if (node_->kind != other.node_->kind) return false;
    switch (node_->kind) {
        case ExprKind::Number:
            if (node_->value != other.node_->value) return false;
            break;
        case ExprKind::Symbol:
            if (node_->name != other.node_->name) return false;
            break;
        case ExprKind::Call:
            if (node_->func != other.node_->func) return false;
            break;
        default:
            break;
    }
    if (node_->children.size() != other.node_->children.size()) return false;
    for (std::size_t i = 0; i < node_->children.size(); ++i)
        if (node_->children[i] != other.node_->children[i]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            throw ParseError(std::string("expected '") + c + "'", pos);
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (accept('+'))
                e = Expr::add(std::move(e), parse_term());
            else if (accept('-'))
                e = Expr::sub(std::move(e), parse_term());
            else
                return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            if (accept('*'))
                e = Expr::mul(std::move(e), parse_factor());
            else if (accept('/'))
                e = Expr::div(std::move(e), parse_factor());
            else
                return e;
        }
    }

    // factor := unary ('^' factor)?   -- '^' is right-associative
    Expr parse_factor() {
        Expr base = parse_unary();
        if (accept('^')) return Expr::pow(std::move(base), parse_factor());
        return base;
    }

    Expr parse_unary() {
        if (accept('-')) return Expr::neg(parse_unary());
        return parse_atom();
    }

    Expr parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        double value = 0.0;
        const char* begin = text.c_str() + pos;
        auto [ptr, ec] = std::from_chars(begin, text.c_str() + text.size(), value);
        if (ec != std::errc() || ptr == begin) fail("malformed number");
        pos += static_cast<std::size_t>(ptr - begin);
        return Expr::number(value);
    }

    Expr parse_name() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (peek('(')) {
            Func f;
            if (name == "sin") f = Func::Sin;
            else if (name == "cos") f = Func::Cos;
            else if (name == "tan") f = Func::Tan;
            else if (name == "sqrt") f = Func::Sqrt;
            else if (name == "exp") f = Func::Exp;
            else if (name == "log") f = Func::Log;
            else if (name == "abs") f = Func::Abs;
            else throw ParseError("unknown function '" + name + "'", start);
            expect('(');
            Expr arg = parse_expr();
            expect(')');
            return Expr::call(f, std::move(arg));
        }
        return Expr::symbol(std::move(name));
    }
};

} // namespace

Expr parse(const std::string& text) {
    Parser p(text);
    Expr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
        throw ParseError("trailing input", p.pos);
    return e;
}

// ---------------------------------------------------------------------------
// printing

namespace {

void print_rec(const Expr& e, std::string& out);

bool is_atom(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Symbol:
        case ExprKind::Call:
            return true;
        case ExprKind::Number:
            return e.value() >= 0.0; // negative literals print with a '-'
        default:
            return false;
    }
}

void print_paren(const Expr& e, std::string& out) {
    out += '(';
    print_rec(e, out);
    out += ')';
}

// child in a position requiring at least the given grammar level;
// levels: 1 add, 2 mul, 3 unary, 4 pow-operand
void print_child(const Expr& e, int min_level, std::string& out) {
    int level;
    switch (e.kind()) {
        case ExprKind::Add:
        case ExprKind::Sub: level = 1; break;
        case ExprKind::Mul:
        case ExprKind::Div: level = 2; break;
        case ExprKind::Neg: level = 3; break;
        case ExprKind::Pow: level = 4; break;
        default: level = is_atom(e) ? 5 : 3; break; // negative number acts like unary
    }
    // a Pow may not appear bare where a unary is required (it would
    // re-associate), and a Neg may not be the bare base of a Pow target
    bool parens = level < min_level;
    if (min_level == 4 && e.kind() == ExprKind::Pow) parens = true;
    if (parens)
        print_paren(e, out);
    else
        print_rec(e, out);
}

void print_rec(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case ExprKind::Number: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", e.value());
            out += buf;
            break;
        }
        case ExprKind::Symbol:
            out += e.name();
            break;
        case ExprKind::Neg:
            out += '-';
            print_child(e.children()[0], 4, out);
            break;
        case ExprKind::Add:
            print_child(e.children()[0], 1, out);
            out += '+';
            print_child(e.children()[1], 2, out);
            break;
        case ExprKind::Sub:
            print_child(e.children()[0], 1, out);
            out += '-';
            print_child(e.children()[1], 2, out);
            break;
        case ExprKind::Mul:
            print_child(e.children()[0], 2, out);
            out += '*';
            print_child(e.children()[1], 3, out);
            break;
        case ExprKind::Div:
            print_child(e.children()[0], 2, out);
            out += '/';
            print_child(e.children()[1], 3, out);
            break;
        case ExprKind::Pow:
            print_child(e.children()[0], 4, out);
            out += '^';
            print_child(e.children()[1], 3, out);
            break;
        case ExprKind::Call:
            out += func_name(e.func());
            out += '(';
            print_rec(e.children()[0], out);
            out += ')';
            break;
    }
}

} // namespace

std::string print(const Expr& e) {
    std::string out;
    print_rec(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// analysis and evaluation

namespace {

void collect_vars(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == ExprKind::Symbol) {
        out.insert(e.name());
        return;
    }
    for (const Expr& c : e.children()) collect_vars(c, out);
}

[[noreturn]] void domain_error(const char* what, const Expr& at) {
    throw EvalError(std::string(what) + " in '" + print(at) + "'");
}

// wrapper type so that division by zero and domain violations signal instead
// of producing inf/nan
struct Checked {
    double v;
    Checked(double x) : v(x) {}
    Checked operator-() const { return {-v}; }
    friend Checked operator+(Checked a, Checked b) { return {a.v + b.v}; }
    friend Checked operator-(Checked a, Checked b) { return {a.v - b.v}; }
    friend Checked operator*(Checked a, Checked b) { return {a.v * b.v}; }
    friend Checked operator/(Checked a, Checked b) {
        if (b.v == 0.0) throw EvalError("division by zero");
        return {a.v / b.v};
    }
    friend Checked pow(Checked a, Checked b) { return {pow_checked(a.v, b.v)}; }
    friend Checked sin(Checked a) { return {std::sin(a.v)}; }
    friend Checked cos(Checked a) { return {std::cos(a.v)}; }
    friend Checked tan(Checked a) { return {std::tan(a.v)}; }
    friend Checked sqrt(Checked a) {
        if (a.v < 0.0) throw EvalError("sqrt of negative value");
        return {std::sqrt(a.v)};
    }
    friend Checked exp(Checked a) { return {std::exp(a.v)}; }
    friend Checked log(Checked a) {
        if (a.v <= 0.0) throw EvalError("log of non-positive value");
        return {std::log(a.v)};
    }
    friend Checked abs(Checked a) { return {std::fabs(a.v)}; }
};

template <class T, class Lookup>
T eval_rec(const Expr& e, Lookup&& look) {
    switch (e.kind()) {
        case ExprKind::Number:
            return T(e.value());
        case ExprKind::Symbol:
            return look(e.name());
        case ExprKind::Neg:
            return -eval_rec<T>(e.children()[0], look);
        case ExprKind::Add:
            return eval_rec<T>(e.children()[0], look) + eval_rec<T>(e.children()[1], look);
        case ExprKind::Sub:
            return eval_rec<T>(e.children()[0], look) - eval_rec<T>(e.children()[1], look);
        case ExprKind::Mul:
            return eval_rec<T>(e.children()[0], look) * eval_rec<T>(e.children()[1], look);
        case ExprKind::Div: {
            T a = eval_rec<T>(e.children()[0], look);
            T b = eval_rec<T>(e.children()[1], look);
            try {
                return a / b;
            } catch (const EvalError&) {
                domain_error("division by zero", e);
            }
            break;
        }
        case ExprKind::Pow: {
            T a = eval_rec<T>(e.children()[0], look);
            T b = eval_rec<T>(e.children()[1], look);
            try {
                return pow(a, b);
            } catch (const EvalError& err) {
                domain_error(err.what(), e);
            }
            break;
        }
        case ExprKind::Call: {
            T a = eval_rec<T>(e.children()[0], look);
            try {
                switch (e.func()) {
                    case Func::Sin: return sin(a);
                    case Func::Cos: return cos(a);
                    case Func::Tan: return tan(a);
                    case Func::Sqrt: return sqrt(a);
                    case Func::Exp: return exp(a);
                    case Func::Log: return log(a);
                    case Func::Abs: return abs(a);
                }
            } catch (const EvalError& err) {
                domain_error(err.what(), e);
            }
            break;
        }
    }
    throw EvalError("malformed expression tree");
}

} // namespace

std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    collect_vars(e, out);
    return out;
}

double evaluate(const Expr& e, const Environment& env) {
    auto look = [&](const std::string& name) -> double {
        auto it = env.find(name);
        if (it == env.end()) throw EvalError("unbound symbol '" + name + "'");
        return it->second;
    };
    auto clook = [&](const std::string& name) -> Checked { return {look(name)}; };
    return eval_rec<Checked>(e, clook).v;
}

double partial(const Expr& e, const std::string& var, const Environment& env) {
    auto look = [&](const std::string& name) -> Dual {
        auto it = env.find(name);
        if (it == env.end()) throw EvalError("unbound symbol '" + name + "'");
        return {it->second, name == var ? 1.0 : 0.0};
    };
    return eval_rec<Dual>(e, look).d;
}

std::vector<double> gradient(const Expr& e, const std::vector<std::string>& vars,
                             const Environment& env) {
    std::vector<double> out;
    out.reserve(vars.size());
    for (const auto& v : vars) out.push_back(partial(e, v, env));
    return out;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    switch (e.kind()) {
        case ExprKind::Number:
            return e;
        case ExprKind::Symbol: {
            auto it = bindings.find(e.name());
            return it == bindings.end() ? e : it->second;
        }
        case ExprKind::Neg:
            return Expr::neg(substitute(e.children()[0], bindings));
        case ExprKind::Add:
            return Expr::add(substitute(e.children()[0], bindings),
                             substitute(e.children()[1], bindings));
        case ExprKind::Sub:
            return Expr::sub(substitute(e.children()[0], bindings),
                             substitute(e.children()[1], bindings));
        case ExprKind::Mul:
            return Expr::mul(substitute(e.children()[0], bindings),
                             substitute(e.children()[1], bindings));
        case ExprKind::Div:
            return Expr::div(substitute(e.children()[0], bindings),
                             substitute(e.children()[1], bindings));
        case ExprKind::Pow:
            return Expr::pow(substitute(e.children()[0], bindings),
                             substitute(e.children()[1], bindings));
        case ExprKind::Call:
            return Expr::call(e.func(), substitute(e.children()[0], bindings));
    }
    throw EvalError("malformed expression tree");
}

// ---------------------------------------------------------------------------
// compiled tape

Tape Tape::compile(const Expr& e, const std::vector<std::string>& symbols) {
    Tape t;
    t.n_slots_ = symbols.size();
    std::map<std::string, std::size_t> slots;
    for (std::size_t i = 0; i < symbols.size(); ++i) slots[symbols[i]] = i;

    std::size_t depth = 0, max_depth = 0;
    auto emit = [&](const Expr& node, auto&& self) -> void {
        for (const Expr& c : node.children()) self(c, self);
        Op op{node.kind(), node.kind() == ExprKind::Call ? node.func() : Func::Sin,
              node.kind() == ExprKind::Number ? node.value() : 0.0, 0};
        if (node.kind() == ExprKind::Symbol) {
            auto it = slots.find(node.name());
            if (it == slots.end())
                throw EvalError("unbound symbol '" + node.name() + "'");
            op.slot = it->second;
        }
        // stack effect: leaves push one, binaries pop one
        switch (node.kind()) {
            case ExprKind::Number:
            case ExprKind::Symbol:
                ++depth;
                max_depth = std::max(max_depth, depth);
                break;
            case ExprKind::Add:
            case ExprKind::Sub:
            case ExprKind::Mul:
            case ExprKind::Div:
            case ExprKind::Pow:
                --depth;
                break;
            default:
                break;
        }
        t.ops_.push_back(op);
    };
    emit(e, emit);
    t.stack_.resize(max_depth);
    t.dstack_.resize(max_depth);
    return t;
}

double Tape::eval(std::span<const double> values) const {
    double* sp = stack_.data();
    for (const Op& op : ops_) {
        switch (op.kind) {
            case ExprKind::Number: *sp++ = op.value; break;
            case ExprKind::Symbol: *sp++ = values[op.slot]; break;
            case ExprKind::Neg: sp[-1] = -sp[-1]; break;
            case ExprKind::Add: --sp; sp[-1] += *sp; break;
            case ExprKind::Sub: --sp; sp[-1] -= *sp; break;
            case ExprKind::Mul: --sp; sp[-1] *= *sp; break;
            case ExprKind::Div:
                --sp;
                if (*sp == 0.0) throw EvalError("division by zero");
                sp[-1] /= *sp;
                break;
            case ExprKind::Pow:
                --sp;
                sp[-1] = pow_checked(sp[-1], *sp);
                break;
            case ExprKind::Call:
                switch (op.func) {
                    case Func::Sin: sp[-1] = std::sin(sp[-1]); break;
                    case Func::Cos: sp[-1] = std::cos(sp[-1]); break;
                    case Func::Tan: sp[-1] = std::tan(sp[-1]); break;
                    case Func::Sqrt:
                        if (sp[-1] < 0.0) throw EvalError("sqrt of negative value");
                        sp[-1] = std::sqrt(sp[-1]);
                        break;
                    case Func::Exp: sp[-1] = std::exp(sp[-1]); break;
                    case Func::Log:
                        if (sp[-1] <= 0.0) throw EvalError("log of non-positive value");
                        sp[-1] = std::log(sp[-1]);
                        break;
                    case Func::Abs: sp[-1] = std::fabs(sp[-1]); break;
                }
                break;
        }
    }
    return stack_[0];
}

Dual Tape::eval_dual(std::span<const double> values, std::size_t seed_slot) const {
    Dual* sp = dstack_.data();
    for (const Op& op : ops_) {
        switch (op.kind) {
            case ExprKind::Number: *sp++ = Dual(op.value); break;
            case ExprKind::Symbol:
                *sp++ = Dual(values[op.slot], op.slot == seed_slot ? 1.0 : 0.0);
                break;
            case ExprKind::Neg: sp[-1] = -sp[-1]; break;
            case ExprKind::Add: --sp; sp[-1] = sp[-1] + *sp; break;
            case ExprKind::Sub: --sp; sp[-1] = sp[-1] - *sp; break;
            case ExprKind::Mul: --sp; sp[-1] = sp[-1] * *sp; break;
            case ExprKind::Div: --sp; sp[-1] = sp[-1] / *sp; break;
            case ExprKind::Pow: --sp; sp[-1] = pow(sp[-1], *sp); break;
            case ExprKind::Call:
                switch (op.func) {
                    case Func::Sin: sp[-1] = sin(sp[-1]); break;
                    case Func::Cos: sp[-1] = cos(sp[-1]); break;
                    case Func::Tan: sp[-1] = tan(sp[-1]); break;
                    case Func::Sqrt: sp[-1] = sqrt(sp[-1]); break;
                    case Func::Exp: sp[-1] = exp(sp[-1]); break;
                    case Func::Log: sp[-1] = log(sp[-1]); break;
                    case Func::Abs: sp[-1] = abs(sp[-1]); break;
                }
                break;
        }
    }
    return dstack_[0];
}

void Tape::gradient(std::span<const double> values, std::span<double> out) const {
    for (std::size_t i = 0; i < n_slots_; ++i) out[i] = eval_dual(values, i).d;
}

} // namespace carter

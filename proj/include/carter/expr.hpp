#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "carter/dual.hpp"
#include "carter/errors.hpp"

namespace carter {

enum class ExprKind { Number, Symbol, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Sin, Cos, Tan, Sqrt, Exp, Log, Abs };

const char* func_name(Func f);

/// Immutable expression tree over named symbols. Copies are cheap (shared
/// structure); all operations on Expr are pure.
class Expr {
public:
    Expr() = default; // empty handle; only valid after assignment

    ExprKind kind() const { return node_->kind; }
    double value() const { return node_->value; }      // Number nodes
    const std::string& name() const { return node_->name; } // Symbol nodes
    Func func() const { return node_->func; }          // Call nodes
    const std::vector<Expr>& children() const { return node_->children; }
    bool valid() const { return node_ != nullptr; }

    /// Structural equality: kinds, values/names and children match recursively.
    bool operator==(const Expr& other) const;
    bool operator!=(const Expr& other) const { return !(*this == other); }

    // construction
    static Expr number(double v);
    static Expr symbol(std::string name);
    static Expr neg(Expr a); // folds -c for numeric c
    static Expr add(Expr a, Expr b);
    static Expr sub(Expr a, Expr b);
    static Expr mul(Expr a, Expr b);
    static Expr div(Expr a, Expr b);
    static Expr pow(Expr a, Expr b);
    static Expr call(Func f, Expr a);

private:
    struct Node {
        ExprKind kind;
        double value = 0.0;
        std::string name;
        Func func = Func::Sin;
        std::vector<Expr> children;
    };
    std::shared_ptr<const Node> node_;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Expr make(Node n);
};

using Environment = std::map<std::string, double>;

/// Parse `text` against the expression grammar. Throws ParseError with the
/// byte offset of the problem.
Expr parse(const std::string& text);

/// Grammar-conformant rendering; parse(print(e)) is structurally equal to e.
std::string print(const Expr& e);

/// Exactly the set of symbol names appearing in e.
std::set<std::string> free_vars(const Expr& e);

/// IEEE double value of e under env. Throws EvalError on unbound symbols and
/// numeric domain errors, naming the offending subexpression.
double evaluate(const Expr& e, const Environment& env);

/// de/dvar at env by forward-mode dual propagation; exact to floating point.
double partial(const Expr& e, const std::string& var, const Environment& env);

/// partial() over an ordered variable list, one dual pass per variable.
std::vector<double> gradient(const Expr& e, const std::vector<std::string>& vars,
                             const Environment& env);

/// Replace each named symbol by the given expression (single simultaneous pass).
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

/// Expression compiled against a fixed symbol ordering: postfix tape with
/// symbol slots resolved to indices, for hot evaluation loops (brackets,
/// Hamilton right-hand sides). Unbound symbols fail at compile time.
class Tape {
public:
    static Tape compile(const Expr& e, const std::vector<std::string>& symbols);

    double eval(std::span<const double> values) const;
    /// Value and d/d(values[seed_slot]).
    Dual eval_dual(std::span<const double> values, std::size_t seed_slot) const;
    /// All partials with respect to the bound symbols, one dual pass per slot.
    void gradient(std::span<const double> values, std::span<double> out) const;

    std::size_t n_slots() const { return n_slots_; }

private:
    struct Op {
        ExprKind kind;
        Func func;
        double value;
        std::size_t slot;
    };
    std::vector<Op> ops_;
    std::size_t n_slots_ = 0;
    mutable std::vector<double> stack_;
    mutable std::vector<Dual> dstack_;
};

} // namespace carter

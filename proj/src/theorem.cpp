#include "carter/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace carter {

namespace {

Expr sum_of(const std::vector<SeparablePair>& pairs, bool potentials) {
    Expr acc;
    for (const auto& p : pairs) {
        Expr term = potentials ? p.potential : p.hamiltonian;
        acc = acc.valid() ? Expr::add(acc, term) : term;
    }
    return acc;
}

Expr apply_folds(Expr e, const std::map<std::string, Expr>& folds) {
    if (folds.empty()) return e;
    return substitute(e, folds);
}

CarterConstant make_constant(const std::vector<SeparablePair>& pairs, int i,
                             const Expr& sum_u, const Expr& sum_h,
                             const Expr& hamiltonian,
                             const std::map<std::string, Expr>& folds) {
    const Expr& u = pairs[static_cast<std::size_t>(i)].potential;
    const Expr& h = pairs[static_cast<std::size_t>(i)].hamiltonian;
    Expr quotient = Expr::div(
        Expr::sub(Expr::mul(u, sum_h), Expr::mul(sum_u, h)), sum_u);
    Expr product = Expr::sub(
        Expr::mul(Expr::mul(Expr::number(2.0), u), hamiltonian), h);
    CarterConstant c;
    c.index = i;
    c.quotient_form = apply_folds(quotient, folds);
    c.product_form = apply_folds(product, folds);
    return c;
}

std::vector<CarterConstant> constants_for(const std::vector<SeparablePair>& pairs,
                                          SplitKind kind, bool materialize_all,
                                          const std::map<std::string, Expr>& folds) {
    if (pairs.size() < 2) throw ModelError("need at least two separable pairs");
    Expr sum_u = sum_of(pairs, true);
    Expr sum_h = sum_of(pairs, false);
    Expr ham = Expr::mul(Expr::number(0.5), Expr::div(sum_h, sum_u));

    std::vector<CarterConstant> out;
    int n = static_cast<int>(pairs.size());
    int count = kind == SplitKind::Partial ? 1 : (materialize_all ? n : n - 1);
    for (int i = 0; i < count; ++i)
        out.push_back(make_constant(pairs, i, sum_u, sum_h, ham, folds));
    return out;
}

} // namespace

Expr assemble_hamiltonian(const SeparableStructure& s) {
    if (s.pairs.empty()) throw ModelError("empty separable structure");
    Expr sum_u = sum_of(s.pairs, true);
    Expr sum_h = sum_of(s.pairs, false);
    Expr ham = Expr::mul(Expr::number(0.5), Expr::div(sum_h, sum_u));
    return apply_folds(ham, s.folds);
}

std::vector<CarterConstant> carter_constants(const SeparableStructure& s,
                                             bool materialize_all) {
    return constants_for(s.pairs, s.kind, materialize_all, s.folds);
}

std::vector<CarterConstant> nested_constants(const SeparableStructure& s,
                                             const std::vector<SeparablePair>& inner,
                                             const Chart& chart) {
    if (s.kind != SplitKind::Partial || s.pairs.size() != 2)
        throw ModelError("nesting requires a two-block partial split");

    std::set<std::string> allowed;
    for (int idx : s.pairs[1].block) {
        allowed.insert(chart.coords[static_cast<std::size_t>(idx)]);
        allowed.insert(chart.momenta[static_cast<std::size_t>(idx)]);
    }
    for (const auto& p : inner) {
        for (const Expr* side : {&p.potential, &p.hamiltonian}) {
            for (const auto& v : free_vars(*side)) {
                bool is_chart_symbol =
                    std::find(chart.coords.begin(), chart.coords.end(), v) != chart.coords.end() ||
                    std::find(chart.momenta.begin(), chart.momenta.end(), v) != chart.momenta.end();
                if (is_chart_symbol && !allowed.count(v))
                    throw ModelError("nested pair references symbol '" + v +
                                     "' outside the parent block");
            }
        }
    }

    std::vector<CarterConstant> out = constants_for(s.pairs, s.kind, false, s.folds);
    auto inner_out = constants_for(inner, SplitKind::Full, false, s.folds);
    for (auto& c : inner_out) out.push_back(std::move(c));
    return out;
}

double sum_identity_residual(const std::vector<CarterConstant>& constants,
                             const std::vector<Environment>& samples) {
    if (constants.size() < 2) throw ModelError("sum identity needs all constants");
    double worst = 0.0;
    for (const auto& env : samples) {
        double s = 0.0;
        for (const auto& c : constants) s += evaluate(c.quotient_form, env);
        worst = std::max(worst, std::fabs(s));
    }
    return worst;
}

} // namespace carter

#include "carter/bracket.hpp"

#include <algorithm>
#include <cmath>

namespace carter {

namespace {

std::vector<std::string> bound_symbols(const Chart& chart, const Environment& params) {
    std::vector<std::string> syms = chart.symbols();
    for (const auto& [k, v] : params) syms.push_back(k);
    return syms;
}

std::vector<double> bound_values(const PhaseState& s, const Environment& params) {
    std::vector<double> v;
    v.reserve(s.q.size() + s.p.size() + params.size());
    v.insert(v.end(), s.q.begin(), s.q.end());
    v.insert(v.end(), s.p.begin(), s.p.end());
    for (const auto& [k, x] : params) v.push_back(x);
    return v;
}

double bracket_of_gradients(const std::vector<double>& gf, const std::vector<double>& gg,
                            int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += gf[i] * gg[n + i] - gf[n + i] * gg[i];
    return acc;
}

double phase_norm(const std::vector<double>& g, int n) {
    double acc = 0.0;
    for (int i = 0; i < 2 * n; ++i) acc += g[i] * g[i];
    return std::sqrt(acc);
}

} // namespace

double poisson_bracket(const Expr& f, const Expr& g, const PhaseState& state,
                       const Chart& chart, const Environment& params) {
    auto syms = bound_symbols(chart, params);
    Tape tf = Tape::compile(f, syms);
    Tape tg = Tape::compile(g, syms);
    auto values = bound_values(state, params);
    std::vector<double> gf(syms.size()), gg(syms.size());
    tf.gradient(values, gf);
    tg.gradient(values, gg);
    return bracket_of_gradients(gf, gg, chart.dim());
}

BracketReport conservation_check_at(const Expr& K, const Expr& H, const Chart& chart,
                                    const Environment& params,
                                    const std::vector<PhaseState>& states, double tol,
                                    const std::string& k_name,
                                    const std::string& h_name) {
    if (states.empty()) throw ModelError("conservation check needs at least one sample");
    auto syms = bound_symbols(chart, params);
    Tape tk = Tape::compile(K, syms);
    Tape th = Tape::compile(H, syms);
    int n = chart.dim();

    BracketReport rep;
    rep.f_name = k_name;
    rep.g_name = h_name;
    rep.n_samples = static_cast<int>(states.size());

    std::vector<double> gk(syms.size()), gh(syms.size());
    std::vector<double> scales;
    scales.reserve(states.size());
    double sum = 0.0;
    for (const auto& s : states) {
        auto values = bound_values(s, params);
        tk.gradient(values, gk);
        th.gradient(values, gh);
        double b = std::fabs(bracket_of_gradients(gk, gh, n));
        sum += b;
        if (b >= rep.max_abs) {
            rep.max_abs = b;
            rep.worst_state = s;
        }
        scales.push_back(phase_norm(gk, n) * phase_norm(gh, n));
    }
    rep.mean_abs = sum / static_cast<double>(states.size());

    std::nth_element(scales.begin(), scales.begin() + scales.size() / 2, scales.end());
    rep.gradient_scale = scales[scales.size() / 2];
    rep.pass = rep.max_abs <= tol * (1.0 + rep.gradient_scale);
    return rep;
}

BracketReport conservation_check(const Expr& K, const Expr& H, const Chart& chart,
                                 const Environment& params, int n_samples, double tol,
                                 std::uint64_t seed,
                                 const std::string& k_name, const std::string& h_name) {
    if (n_samples < 1) throw ModelError("n_samples must be >= 1");
    StateSampler sampler(chart, params, seed);
    return conservation_check_at(K, H, chart, params, sampler.take(n_samples), tol,
                                 k_name, h_name);
}

} // namespace carter

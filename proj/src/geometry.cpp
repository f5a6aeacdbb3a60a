#include "carter/geometry.hpp"

#include <cmath>
#include <random>

namespace carter {

namespace {

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

/// Residual forward(q) - target, or nullopt when q leaves the map's domain.
std::optional<std::vector<double>> residual_at(const Chart& chart,
                                               const std::vector<double>& q,
                                               const std::vector<double>& target,
                                               const Environment& params) {
    Environment env = chart.coord_env(q, params);
    std::vector<double> r(q.size());
    try {
        for (std::size_t i = 0; i < chart.to_cartesian.size(); ++i)
            r[i] = evaluate(chart.to_cartesian[i], env) - target[i];
    } catch (const EvalError&) {
        return std::nullopt;
    }
    return r;
}

bool newton_from(const Chart& chart, std::vector<double> q,
                 const std::vector<double>& target, const Environment& params,
                 std::vector<double>& out) {
    double tol = 1e-12 * (1.0 + norm2(target));
    // keep polishing well below the acceptance tolerance: near-singular
    // Jacobians amplify the position residual into the chart coordinates
    double polish = 1e-15 * (1.0 + norm2(target));
    auto res = residual_at(chart, q, target, params);
    if (!res) return false;
    for (int iter = 0; iter < 60; ++iter) {
        double rn = norm2(*res);
        if (rn <= polish) break;
        Matrix J;
        try {
            J = jacobian(chart, q, params);
        } catch (const GeometryError&) {
            return false;
        } catch (const EvalError&) {
            return false;
        }
        std::vector<double> step = *res;
        try {
            solve_inplace(J, step);
        } catch (const GeometryError&) {
            return false;
        }
        double lam = 1.0;
        bool advanced = false;
        while (lam > 1e-6) {
            std::vector<double> q_try(q.size());
            for (std::size_t i = 0; i < q.size(); ++i) q_try[i] = q[i] - lam * step[i];
            auto res_try = residual_at(chart, q_try, target, params);
            if (res_try && norm2(*res_try) < rn) {
                q = std::move(q_try);
                res = std::move(res_try);
                advanced = true;
                break;
            }
            lam *= 0.5;
        }
        if (!advanced) break;
    }
    if (!res || norm2(*res) > tol) return false;
    if (!chart.admissible(q, params, 0.0)) return false;
    out = q;
    return true;
}

} // namespace

Matrix jacobian(const Chart& chart, const std::vector<double>& q,
                const Environment& params) {
    int n = chart.dim();
    Matrix J(n, n);
    Environment env = chart.coord_env(q, params);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = partial(chart.to_cartesian[static_cast<std::size_t>(i)],
                               chart.coords[static_cast<std::size_t>(j)], env);
            if (!std::isfinite(v)) throw GeometryError("non-finite Jacobian entry");
            J(i, j) = v;
        }
    return J;
}

PhaseState pushforward(const PhaseState& state, const Chart& from,
                       const Environment& params, const std::string& reference_name) {
    if (from.is_identity()) {
        PhaseState out = state;
        out.chart = reference_name;
        return out;
    }
    PhaseState out;
    out.chart = reference_name;
    Environment env = from.coord_env(state.q, params);
    out.q.resize(state.q.size());
    for (std::size_t i = 0; i < from.to_cartesian.size(); ++i)
        out.q[i] = evaluate(from.to_cartesian[i], env);
    // p_chart = J^T p_cart, so p_cart solves J^T x = p
    Matrix Jt = transpose(jacobian(from, state.q, params));
    out.p = state.p;
    solve_inplace(Jt, out.p);
    return out;
}

std::vector<double> invert_to_chart(const Chart& chart, const std::vector<double>& q_cart,
                                    const Environment& params, std::uint64_t seed) {
    if (chart.is_identity()) return q_cart;
    std::vector<double> out;

    std::vector<double> q0(static_cast<std::size_t>(chart.dim()));
    for (int i = 0; i < chart.dim(); ++i) {
        auto it = chart.sample_ranges.find(chart.coords[static_cast<std::size_t>(i)]);
        auto [lo, hi] = it != chart.sample_ranges.end() ? it->second
                                                        : std::array<double, 2>{0.5, 1.5};
        q0[static_cast<std::size_t>(i)] = 0.5 * (lo + hi);
    }
    if (newton_from(chart, q0, q_cart, params, out)) return out;

    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 16; ++attempt) {
        for (int i = 0; i < chart.dim(); ++i) {
            auto it = chart.sample_ranges.find(chart.coords[static_cast<std::size_t>(i)]);
            auto [lo, hi] = it != chart.sample_ranges.end()
                                ? it->second
                                : std::array<double, 2>{0.5, 1.5};
            q0[static_cast<std::size_t>(i)] =
                std::uniform_real_distribution<double>(lo, hi)(rng);
        }
        if (newton_from(chart, q0, q_cart, params, out)) return out;
    }
    throw GeometryError("chart inversion failed for '" + chart.name + "'");
}

PhaseState pullback(const PhaseState& cart_state, const Chart& to,
                    const Environment& params, std::uint64_t seed) {
    if (to.is_identity()) {
        PhaseState out = cart_state;
        out.chart = to.name;
        return out;
    }
    PhaseState out;
    out.chart = to.name;
    out.q = invert_to_chart(to, cart_state.q, params, seed);
    Matrix Jt = transpose(jacobian(to, out.q, params));
    out.p = matvec(Jt, cart_state.p);
    return out;
}

double pullback_hamiltonian_value(const Expr& h_cart, const Chart& chart,
                                  const PhaseState& state, const Environment& params,
                                  const Chart& reference) {
    PhaseState cart = pushforward(state, chart, params, reference.name);
    return evaluate(h_cart, reference.state_env(cart, params));
}

std::vector<EquivalenceResidual> verify_chart_equivalence(const SystemDefinition& sys,
                                                          int n_samples, double tol,
                                                          std::uint64_t seed) {
    if (sys.presentations.size() < 2)
        throw ModelError("chart equivalence needs at least two presentations");
    const Chart* ref = sys.reference_chart();
    if (!ref) throw ModelError("no reference chart in system '" + sys.name + "'");

    std::vector<EquivalenceResidual> out;
    for (std::size_t a = 0; a < sys.presentations.size(); ++a) {
        for (std::size_t b = a + 1; b < sys.presentations.size(); ++b) {
            const Presentation& A = sys.presentations[a];
            const Presentation& B = sys.presentations[b];
            const Chart& ca = sys.chart(A.chart);
            const Chart& cb = sys.chart(B.chart);

            EquivalenceResidual r;
            r.pair = A.chart + "/" + B.chart;
            StateSampler sampler(ca, sys.parameters, seed);
            int used = 0;
            std::uint64_t inv_seed = seed + 1;
            while (used < n_samples) {
                if (r.skipped > 100 * n_samples + 1000)
                    throw GeometryError("chart pair " + r.pair +
                                        ": nearly all samples skipped");
                PhaseState s = sampler.next();
                double ha, hb;
                try {
                    ha = evaluate(A.hamiltonian, ca.state_env(s, sys.parameters));
                    PhaseState cart = pushforward(s, ca, sys.parameters, ref->name);
                    PhaseState sb = pullback(cart, cb, sys.parameters, inv_seed++);
                    if (!cb.admissible(sb.q, sys.parameters)) {
                        ++r.skipped;
                        continue;
                    }
                    hb = evaluate(B.hamiltonian, cb.state_env(sb, sys.parameters));
                } catch (const GeometryError&) {
                    ++r.skipped;
                    continue;
                }
                r.residual = std::max(r.residual, std::fabs(ha - hb));
                ++used;
            }
            r.pass = r.residual <= tol;
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace carter

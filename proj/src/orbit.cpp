#include "carter/orbit.hpp"

#include <cmath>
#include <cstdio>

namespace carter {

namespace {

struct Flow {
    int n;
    Tape h;
    std::vector<double> values; // q, p, params
    std::vector<double> grad;

    Flow(const Expr& H, const Chart& chart, const Environment& params)
        : n(chart.dim()), h(make_tape(H, chart, params)) {
        values.resize(h.n_slots());
        grad.resize(h.n_slots());
        std::size_t i = static_cast<std::size_t>(2 * n);
        for (const auto& [k, v] : params) values[i++] = v;
    }

    static Tape make_tape(const Expr& H, const Chart& chart, const Environment& params) {
        std::vector<std::string> syms = chart.symbols();
        for (const auto& [k, v] : params) syms.push_back(k);
        return Tape::compile(H, syms);
    }

    /// dz = (dH/dp, -dH/dq) at z = (q, p).
    void rhs(const std::vector<double>& z, std::vector<double>& dz) {
        std::copy(z.begin(), z.end(), values.begin());
        h.gradient(values, grad);
        for (int i = 0; i < n; ++i) {
            dz[static_cast<std::size_t>(i)] = grad[static_cast<std::size_t>(n + i)];
            dz[static_cast<std::size_t>(n + i)] = -grad[static_cast<std::size_t>(i)];
        }
    }
};

bool finite(const std::vector<double>& z) {
    for (double x : z)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

const char* orbit_status_name(OrbitStatus s) {
    switch (s) {
        case OrbitStatus::Ok: return "ok";
        case OrbitStatus::Blowup: return "blowup";
        case OrbitStatus::DomainViolation: return "domain";
        case OrbitStatus::MidpointDivergence: return "midpoint_divergence";
    }
    return "unknown";
}

double Trajectory::max_rel_drift() const {
    double worst = 0.0;
    if (invariants.empty()) return worst;
    const auto& k0 = invariants.front();
    for (const auto& row : invariants)
        for (std::size_t j = 0; j < row.size(); ++j) {
            double rel = std::fabs(row[j] - k0[j]) / (1.0 + std::fabs(k0[j]));
            worst = std::max(worst, rel);
        }
    return worst;
}

std::pair<std::vector<double>, std::vector<double>> hamilton_rhs(const Expr& H,
                                                                 const PhaseState& state,
                                                                 const Chart& chart,
                                                                 const Environment& params) {
    Flow flow(H, chart, params);
    int n = chart.dim();
    std::vector<double> z(state.q);
    z.insert(z.end(), state.p.begin(), state.p.end());
    std::vector<double> dz(z.size());
    flow.rhs(z, dz);
    return {std::vector<double>(dz.begin(), dz.begin() + n),
            std::vector<double>(dz.begin() + n, dz.end())};
}

Trajectory integrate(const Expr& H, const PhaseState& s0, const Chart& chart,
                     const Environment& params, double dt, int steps,
                     const std::string& method,
                     const std::vector<std::pair<std::string, Expr>>& invariants) {
    if (dt <= 0.0) throw ModelError("dt must be positive");
    if (steps < 1) throw ModelError("steps must be >= 1");
    bool midpoint = method == "implicit_midpoint";
    if (!midpoint && method != "rk4") throw ModelError("unknown method '" + method + "'");

    Flow flow(H, chart, params);
    int n = chart.dim();
    std::size_t dim = static_cast<std::size_t>(2 * n);

    std::vector<Tape> inv_tapes;
    Trajectory traj;
    traj.dt = dt;
    traj.method = method;
    for (const auto& [name, e] : invariants) {
        traj.invariant_names.push_back(name);
        inv_tapes.push_back(Flow::make_tape(e, chart, params));
    }

    auto record = [&](const std::vector<double>& z) {
        PhaseState s;
        s.chart = chart.name;
        s.q.assign(z.begin(), z.begin() + n);
        s.p.assign(z.begin() + n, z.end());
        std::vector<double> row;
        std::copy(z.begin(), z.end(), flow.values.begin());
        for (const auto& t : inv_tapes) row.push_back(t.eval(flow.values));
        traj.states.push_back(std::move(s));
        traj.invariants.push_back(std::move(row));
    };

    std::vector<double> z(s0.q);
    z.insert(z.end(), s0.p.begin(), s0.p.end());
    if (!chart.admissible(s0.q, params)) throw ModelError("initial state inadmissible");
    record(z);

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), y(dim), mid(dim);
    for (int step = 1; step <= steps; ++step) {
        try {
            if (midpoint) {
                flow.rhs(z, k1);
                for (std::size_t i = 0; i < dim; ++i) y[i] = z[i] + dt * k1[i];
                bool converged = false;
                for (int it = 0; it < 100; ++it) {
                    for (std::size_t i = 0; i < dim; ++i) mid[i] = 0.5 * (z[i] + y[i]);
                    flow.rhs(mid, k2);
                    double delta = 0.0;
                    for (std::size_t i = 0; i < dim; ++i) {
                        double yi = z[i] + dt * k2[i];
                        delta = std::max(delta, std::fabs(yi - y[i]));
                        y[i] = yi;
                    }
                    if (delta <= 1e-13) {
                        converged = true;
                        break;
                    }
                }
                if (!converged) {
                    traj.status = OrbitStatus::MidpointDivergence;
                    traj.abort_step = step;
                    return traj;
                }
            } else {
                flow.rhs(z, k1);
                for (std::size_t i = 0; i < dim; ++i) tmp[i] = z[i] + 0.5 * dt * k1[i];
                flow.rhs(tmp, k2);
                for (std::size_t i = 0; i < dim; ++i) tmp[i] = z[i] + 0.5 * dt * k2[i];
                flow.rhs(tmp, k3);
                for (std::size_t i = 0; i < dim; ++i) tmp[i] = z[i] + dt * k3[i];
                flow.rhs(tmp, k4);
                for (std::size_t i = 0; i < dim; ++i)
                    y[i] = z[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        } catch (const EvalError&) {
            traj.status = OrbitStatus::DomainViolation;
            traj.abort_step = step;
            return traj;
        }

        if (!finite(y)) {
            traj.status = OrbitStatus::Blowup;
            traj.abort_step = step;
            return traj;
        }
        std::vector<double> q(y.begin(), y.begin() + n);
        if (!chart.admissible(q, params)) {
            traj.status = OrbitStatus::DomainViolation;
            traj.abort_step = step;
            return traj;
        }
        z = y;
        record(z);
    }
    return traj;
}

std::string trajectory_csv(const Trajectory& t, const Chart& chart) {
    std::string out = "t";
    for (const auto& c : chart.coords) out += "," + c;
    for (const auto& p : chart.momenta) out += "," + p;
    for (const auto& k : t.invariant_names) out += "," + k;
    out += "\n";

    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out += buf;
    };
    for (std::size_t k = 0; k < t.states.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(k) * t.dt);
        out += buf;
        for (double v : t.states[k].q) put(v);
        for (double v : t.states[k].p) put(v);
        for (double v : t.invariants[k]) put(v);
        out += "\n";
    }
    if (t.status != OrbitStatus::Ok) {
        out += "# aborted at step " + std::to_string(t.abort_step) + ": " +
               orbit_status_name(t.status) + "\n";
    }
    return out;
}

} // namespace carter

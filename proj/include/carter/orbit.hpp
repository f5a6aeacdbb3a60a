#pragma once

#include <string>
#include <vector>

#include "carter/system.hpp"

namespace carter {

enum class OrbitStatus { Ok, Blowup, DomainViolation, MidpointDivergence };

const char* orbit_status_name(OrbitStatus s);

/// Fixed-step solution of Hamilton's equations with per-invariant drift
/// tracking. On abort the rows up to the failing step are retained.
struct Trajectory {
    double dt = 0.0;
    std::string method;
    std::vector<std::string> invariant_names;
    std::vector<PhaseState> states;              // length = completed steps + 1
    std::vector<std::vector<double>> invariants; // [step][invariant]
    OrbitStatus status = OrbitStatus::Ok;
    int abort_step = -1;

    /// max over steps and invariants of |K(t) - K(0)| / (1 + |K(0)|).
    double max_rel_drift() const;
};

/// (dH/dp, -dH/dq) at the state via AD.
std::pair<std::vector<double>, std::vector<double>> hamilton_rhs(const Expr& H,
                                                                 const PhaseState& state,
                                                                 const Chart& chart,
                                                                 const Environment& params);

/// One-step methods: "rk4" or "implicit_midpoint" (fixed-point stage solve,
/// tol 1e-13, max 100 iterations). Aborts on non-finite states, stage
/// divergence, or approach within the domain margin of a chart boundary.
Trajectory integrate(const Expr& H, const PhaseState& s0, const Chart& chart,
                     const Environment& params, double dt, int steps,
                     const std::string& method,
                     const std::vector<std::pair<std::string, Expr>>& invariants);

/// CSV rows `t,<coords>,<momenta>,<invariants>` at 17 significant digits; an
/// aborted run gains a trailing `# aborted at step k: <reason>` comment.
std::string trajectory_csv(const Trajectory& t, const Chart& chart);

} // namespace carter

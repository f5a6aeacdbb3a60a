#pragma once

#include <string>
#include <vector>

#include "carter/system.hpp"

namespace carter {

struct BracketReport {
    std::string f_name;
    std::string g_name;
    int n_samples = 0;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    /// Median over samples of |grad f| * |grad g|, the scale the tolerance is
    /// relative to.
    double gradient_scale = 0.0;
    PhaseState worst_state;
    bool pass = false;
};

/// {f, g} = sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i) at the state, partials
/// by dual-number AD.
double poisson_bracket(const Expr& f, const Expr& g, const PhaseState& state,
                       const Chart& chart, const Environment& params);

/// Monte-Carlo commutation check over admissible samples. Passes iff
/// max |{K,H}| <= tol * (1 + median |grad K| |grad H|).
BracketReport conservation_check(const Expr& K, const Expr& H, const Chart& chart,
                                 const Environment& params, int n_samples, double tol,
                                 std::uint64_t seed,
                                 const std::string& k_name = "K",
                                 const std::string& h_name = "H");

/// Same check against pre-drawn states (lets several checks share one sample
/// set so reports stay deterministic under a single seed).
BracketReport conservation_check_at(const Expr& K, const Expr& H, const Chart& chart,
                                    const Environment& params,
                                    const std::vector<PhaseState>& states, double tol,
                                    const std::string& k_name = "K",
                                    const std::string& h_name = "H");

} // namespace carter

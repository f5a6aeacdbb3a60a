#pragma once

#include <string>
#include <vector>

#include "carter/linalg.hpp"
#include "carter/system.hpp"

namespace carter {

/// J_ij = d(to_cartesian_i)/d(coord_j) at q, by dual-number AD. Throws
/// GeometryError when an entry is non-finite.
Matrix jacobian(const Chart& chart, const std::vector<double>& q,
                const Environment& params);

/// Canonical point transformation into the reference chart:
/// q_cart = forward(q), p_cart = J^{-T} p. Throws GeometryError on a singular
/// Jacobian.
PhaseState pushforward(const PhaseState& state, const Chart& from,
                       const Environment& params,
                       const std::string& reference_name = "cartesian");

/// Damped Newton inversion of the forward map: find q with forward(q) =
/// q_cart, residual tol 1e-12, max 50 iterations, retrying from seeded random
/// starts when a basin is missed. Throws GeometryError on failure.
std::vector<double> invert_to_chart(const Chart& chart, const std::vector<double>& q_cart,
                                    const Environment& params, std::uint64_t seed = 1);

/// Full inverse transformation: coordinates by Newton, momenta by J^T p_cart.
PhaseState pullback(const PhaseState& cart_state, const Chart& to,
                    const Environment& params, std::uint64_t seed = 1);

/// Evaluate a reference-chart Hamiltonian at the image of a chart state; the
/// numeric oracle for what the chart-form Hamiltonian must equal.
double pullback_hamiltonian_value(const Expr& h_cart, const Chart& chart,
                                  const PhaseState& state, const Environment& params,
                                  const Chart& reference);

struct EquivalenceResidual {
    std::string pair; // "chartA/chartB"
    double residual = 0.0;
    int skipped = 0;  // samples dropped on singular Jacobians
    bool pass = false;
};

/// For each presentation pair (A,B): max over chart-A samples of
/// |H_A(s) - H_B(T(s))| with T routed through the reference chart. Requires
/// at least two presentations.
std::vector<EquivalenceResidual> verify_chart_equivalence(const SystemDefinition& sys,
                                                          int n_samples, double tol,
                                                          std::uint64_t seed);

} // namespace carter

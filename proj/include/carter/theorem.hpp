#pragma once

#include <vector>

#include "carter/system.hpp"

namespace carter {

/// A constant of motion built from a separable structure. Both forms carry
/// any fold substitutions already applied, so their free variables are chart
/// symbols and parameters only.
struct CarterConstant {
    int index = 0;            // which block the constant belongs to
    Expr quotient_form;       // (U_i * sum H_j - sum U_j * H_i) / sum U_j
    Expr product_form;        // 2 U_i H - H_i
};

/// The (1/2) (sum H_i) / (sum U_i) Hamiltonian of the structure, with fold
/// symbols substituted.
Expr assemble_hamiltonian(const SeparableStructure& s);

/// Constants of motion: kappa_1..kappa_{n-1} for a full split, the single
/// block-1 constant for a partial split. Throws ModelError with fewer than
/// two blocks. With materialize_all, the redundant nth constant of a full
/// split is included (their sum vanishes identically).
std::vector<CarterConstant> carter_constants(const SeparableStructure& s,
                                             bool materialize_all = false);

/// Apply the construction again inside block 2, with the block-1 constant of
/// `s` playing the role of the Hamiltonian. Returns {outer, inner}. Throws
/// ModelError when the inner pairs reference coordinates outside block 2.
std::vector<CarterConstant> nested_constants(const SeparableStructure& s,
                                             const std::vector<SeparablePair>& inner,
                                             const Chart& chart);

/// max over samples of |sum_i kappa_i|; requires all n constants of a full
/// split (precondition: at least two).
double sum_identity_residual(const std::vector<CarterConstant>& constants,
                             const std::vector<Environment>& samples);

} // namespace carter

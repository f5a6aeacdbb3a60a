#pragma once

#include <string>
#include <vector>

#include "carter/linalg.hpp"
#include "carter/system.hpp"

namespace carter {

struct RankReport {
    std::vector<std::string> names;
    std::vector<int> per_sample_rank;
    int modal_rank = 0;
    int off_modal = 0;          // samples whose rank differs from the mode
    std::vector<double> pivots; // pivot magnitudes at the first sample
    bool independent = false;   // modal rank == set size and >= 95% at mode
};

/// Row i = grad f_i over the 2n phase-space symbols at the state, via AD.
Matrix gradient_matrix(const std::vector<Expr>& fs, const PhaseState& state,
                       const Chart& chart, const Environment& params);

/// Numeric rank by column-pivoted orthogonalization on unit-normalized rows;
/// a pivot counts while its magnitude >= rel_tol * largest pivot.
int matrix_rank(const Matrix& m, double rel_tol, std::vector<double>* pivots = nullptr);

/// Modal gradient rank over admissible samples (n_samples >= 10).
RankReport functional_rank(const std::vector<Expr>& fs,
                           const std::vector<std::string>& names, const Chart& chart,
                           const Environment& params, int n_samples, double rel_tol,
                           std::uint64_t seed);

} // namespace carter

#include "carter/independence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace carter {

Matrix gradient_matrix(const std::vector<Expr>& fs, const PhaseState& state,
                       const Chart& chart, const Environment& params) {
    std::vector<std::string> syms = chart.symbols();
    Environment env = chart.state_env(state, params);
    Matrix m(static_cast<int>(fs.size()), 2 * chart.dim());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        auto g = gradient(fs[i], syms, env);
        for (int j = 0; j < m.cols; ++j) m(static_cast<int>(i), j) = g[static_cast<std::size_t>(j)];
    }
    return m;
}

int matrix_rank(const Matrix& m, double rel_tol, std::vector<double>* pivots) {
    // modified Gram-Schmidt on unit-normalized rows, picking the row of
    // largest remaining norm at each stage
    int nr = m.rows, nc = m.cols;
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(nr));
    for (int i = 0; i < nr; ++i) {
        auto& r = rows[static_cast<std::size_t>(i)];
        r.resize(static_cast<std::size_t>(nc));
        double norm = 0.0;
        for (int j = 0; j < nc; ++j) norm += m(i, j) * m(i, j);
        norm = std::sqrt(norm);
        for (int j = 0; j < nc; ++j)
            r[static_cast<std::size_t>(j)] = norm > 0.0 ? m(i, j) / norm : 0.0;
    }

    auto dot = [nc](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int j = 0; j < nc; ++j)
            s += a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(j)];
        return s;
    };

    std::vector<double> piv;
    std::vector<bool> used(static_cast<std::size_t>(nr), false);
    for (int stage = 0; stage < std::min(nr, nc); ++stage) {
        int best = -1;
        double best_norm = -1.0;
        for (int i = 0; i < nr; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            double n2 = dot(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(i)]);
            if (n2 > best_norm) {
                best_norm = n2;
                best = i;
            }
        }
        if (best < 0) break;
        piv.push_back(std::sqrt(std::max(0.0, best_norm)));
        used[static_cast<std::size_t>(best)] = true;
        auto& u = rows[static_cast<std::size_t>(best)];
        double un = piv.back();
        if (un == 0.0) break;
        for (int j = 0; j < nc; ++j) u[static_cast<std::size_t>(j)] /= un;
        for (int i = 0; i < nr; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            auto& r = rows[static_cast<std::size_t>(i)];
            double c = dot(r, u);
            for (int j = 0; j < nc; ++j) r[static_cast<std::size_t>(j)] -= c * u[static_cast<std::size_t>(j)];
        }
    }

    int rank = 0;
    double largest = piv.empty() ? 0.0 : piv.front();
    for (double p : piv)
        if (largest > 0.0 && p >= rel_tol * largest) ++rank;
    if (pivots) *pivots = piv;
    return rank;
}

RankReport functional_rank(const std::vector<Expr>& fs,
                           const std::vector<std::string>& names, const Chart& chart,
                           const Environment& params, int n_samples, double rel_tol,
                           std::uint64_t seed) {
    if (n_samples < 10) throw ModelError("functional rank needs n_samples >= 10");
    RankReport rep;
    rep.names = names;

    StateSampler sampler(chart, params, seed);
    for (int k = 0; k < n_samples; ++k) {
        PhaseState s = sampler.next();
        Matrix m = gradient_matrix(fs, s, chart, params);
        int r = matrix_rank(m, rel_tol, k == 0 ? &rep.pivots : nullptr);
        rep.per_sample_rank.push_back(r);
    }

    std::map<int, int> hist;
    for (int r : rep.per_sample_rank) ++hist[r];
    int best_count = -1;
    for (const auto& [r, c] : hist)
        if (c > best_count) {
            best_count = c;
            rep.modal_rank = r;
        }
    rep.off_modal = n_samples - best_count;
    rep.independent = rep.modal_rank == static_cast<int>(fs.size()) &&
                      best_count * 20 >= n_samples * 19;
    return rep;
}

} // namespace carter

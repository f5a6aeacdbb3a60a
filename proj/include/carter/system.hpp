#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "carter/expr.hpp"

namespace carter {

inline constexpr int kMaxDim = 6;
inline constexpr double kDomainMargin = 1e-3;

/// A point (q, p) in 2n-dimensional phase space, tagged with its chart.
struct PhaseState {
    std::string chart;
    std::vector<double> q;
    std::vector<double> p;

    int dim() const { return static_cast<int>(q.size()); }
};

/// Named coordinate system with a forward point map to the reference
/// (Cartesian) chart and strict-inequality domain constraints (expr > 0).
struct Chart {
    std::string name;
    std::vector<std::string> coords;
    std::vector<std::string> momenta;
    std::vector<Expr> to_cartesian;
    std::vector<Expr> domain;
    std::map<std::string, std::array<double, 2>> sample_ranges;

    int dim() const { return static_cast<int>(coords.size()); }

    /// coords followed by momenta: the symbol layout used everywhere a chart
    /// state is flattened to a value vector.
    std::vector<std::string> symbols() const;

    /// True when the forward map is the identity on this chart's coordinates,
    /// which is how the reference chart is recognized.
    bool is_identity() const;

    /// Environment for the point q (coordinates only) plus parameters.
    Environment coord_env(const std::vector<double>& q, const Environment& params) const;
    /// Environment for a full phase-space state plus parameters.
    Environment state_env(const PhaseState& s, const Environment& params) const;

    /// All domain constraints exceed the margin at q.
    bool admissible(const std::vector<double>& q, const Environment& params,
                    double margin = kDomainMargin) const;
};

/// Declares H = (1/2) * (sum H_i) / (sum U_i) over coordinate blocks.
struct SeparablePair {
    Expr potential;   // U_i: coordinates of its block only
    Expr hamiltonian; // H_i: coordinates and momenta of its block only
    std::vector<int> block; // coordinate indices owned by the pair
};

enum class SplitKind { Full, Partial };

struct SeparableStructure {
    SplitKind kind = SplitKind::Full;
    std::vector<SeparablePair> pairs;
    /// Conserved-quantity symbols folded into pair expressions (treated as
    /// parameters during validation, substituted when constants are emitted).
    std::map<std::string, Expr> folds;
    /// Presentation Hamiltonian equals convention_scale * assembled form.
    double convention_scale = 1.0;
    /// Optional second-level split of the constant this structure produces.
    std::optional<std::vector<SeparablePair>> nested;
};

struct Presentation {
    std::string chart;
    Expr hamiltonian;
    std::optional<SeparableStructure> separable;
};

struct DeclaredConstant {
    std::string name;
    std::string chart;
    Expr expr;
};

/// A named physical system: parameters, chart-specific Hamiltonian
/// presentations, declared constants of motion. Immutable after load.
struct SystemDefinition {
    std::string name;
    Environment parameters;
    std::vector<Chart> charts;
    std::vector<Presentation> presentations;
    std::vector<DeclaredConstant> declared_constants;

    const Chart& chart(const std::string& name) const;
    const Presentation* presentation_in(const std::string& chart_name) const;
    /// The chart whose forward map is the identity, if any.
    const Chart* reference_chart() const;
};

struct SeparabilityViolation {
    int pair_index;
    std::string symbol;
    std::string which; // "U" or "H"
};

/// Empty result iff every free-variable containment invariant holds.
std::vector<SeparabilityViolation> validate_separability(const SeparableStructure& s,
                                                         const Chart& chart,
                                                         const Environment& params);

/// Load and invariant-check a system definition file (JSON schema in the
/// project README). Throws ModelError / ParseError on any problem.
SystemDefinition load_system(const std::string& path);
SystemDefinition load_system_text(const std::string& json_text);

/// Serialize back to the file schema.
std::string system_to_json(const SystemDefinition& sys);

/// Seeded rejection sampler over a chart's admissible region. Coordinates are
/// drawn from the chart's declared ranges, momenta from declared ranges or
/// [-2, 2], and candidates within the margin of a domain constraint are
/// rejected. Throws SamplerStarvation when the acceptance rate collapses.
class StateSampler {
public:
    StateSampler(const Chart& chart, const Environment& params, std::uint64_t seed);

    PhaseState next();
    std::vector<PhaseState> take(int n);

private:
    const Chart& chart_;
    Environment params_;
    std::mt19937_64 rng_;
};

/// Verification outcome aggregated by the catalog pipeline.
struct VerificationReport {
    std::string system;
    int seed = 0;
    bool pass = true;

    struct ConstantResult {
        std::string name;
        std::string expr;
        double max_bracket = 0.0;
        bool pass = true;
    };
    struct PairResidual {
        std::string pair;
        double residual = 0.0;
        bool pass = true;
    };
    struct RankResult {
        int modal = 0;
        int per_sample_offmodal = 0;
        int expected = 0;
        bool pass = true;
    };
    struct OrbitResult {
        std::string method;
        double dt = 0.0;
        int steps = 0;
        double max_rel_drift = 0.0;
        bool pass = true;
    };

    bool separability_ok = true;
    std::vector<std::string> separability_violations;
    double assembly_residual = 0.0;
    std::vector<ConstantResult> constants;
    std::vector<PairResidual> chart_equivalence;
    RankResult rank;
    std::optional<OrbitResult> orbit;

    std::string to_json() const;
};

} // namespace carter

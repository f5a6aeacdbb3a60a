#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carter/system.hpp"

namespace carter {

/// Default orbit used by the verification pipeline for one entry.
struct OrbitSpec {
    std::string chart;
    std::vector<double> q0;
    std::vector<double> p0;
    double dt = 1e-3;
    int steps = 5000;
    std::string method = "implicit_midpoint";
    double drift_tol = 1e-6;
};

struct ExpectedVerdicts {
    int constants_per_presentation = 1; // engine constants, minimum
    int modal_rank = 0;                 // of {H} + declared constants
};

struct CatalogEntry {
    std::string name;
    std::string summary;
    SystemDefinition system;
    ExpectedVerdicts expected;
    std::optional<OrbitSpec> orbit;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);
std::vector<std::string> list_catalog();

/// A reference closed-form constant together with the separable structure it
/// must emerge from. The engine's block-0 constant, times sign, must equal
/// the reference form at every admissible sample.
struct ReproductionCase {
    std::string name;
    Chart chart; // sampling domain only; forward map unused
    Environment params;
    SeparableStructure structure;
    Expr reference_form;
    double sign = 1.0;
    bool nested = false; // compare the nested (inner) constant instead
};

const std::vector<ReproductionCase>& reproduction_cases();

struct Tolerances {
    double bracket = 1e-9;
    double equivalence = 1e-10;
    double assembly = 1e-10;
    double rank_rel = 1e-8;
    int samples = 1000;
    int rank_samples = 200;
};

/// Full verification pipeline: separability + assembly, conservation of every
/// engine-derived and declared constant, cross-chart equivalence, gradient
/// rank, one drift orbit. Orbit parameters may be overridden.
VerificationReport run_entry(const std::string& name, const Tolerances& tol,
                             std::uint64_t seed,
                             const Environment& param_overrides = {},
                             const std::optional<OrbitSpec>& orbit_override = std::nullopt);

VerificationReport run_system(const SystemDefinition& sys, const Tolerances& tol,
                              std::uint64_t seed,
                              const std::optional<OrbitSpec>& orbit = std::nullopt,
                              const ExpectedVerdicts* expected = nullptr);

} // namespace carter

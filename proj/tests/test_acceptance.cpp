// Acceptance gate: one line per criterion, exit 0 iff all pass.
// Usage: test_acceptance [path-to-carter-cli]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "carter/bracket.hpp"
#include "carter/catalog.hpp"
#include "carter/geometry.hpp"
#include "carter/independence.hpp"
#include "carter/orbit.hpp"
#include "carter/theorem.hpp"
#include "oracle.hpp"

using namespace carter;

namespace {

int failures = 0;

void verdict(int criterion, bool pass, const std::string& what) {
    std::printf("CRITERION %d: %s - %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1. engine constants equal the reference closed forms, 1000 samples, 1e-9 rel
void criterion1() {
    double worst = 0.0;
    std::string worst_case;
    for (const auto& rc : reproduction_cases()) {
        auto cs = rc.nested
                      ? nested_constants(rc.structure, *rc.structure.nested, rc.chart)
                      : carter_constants(rc.structure);
        const Expr& engine = rc.nested ? cs.back().quotient_form : cs.front().quotient_form;
        StateSampler sampler(rc.chart, rc.params, 1009);
        double local = 0.0;
        for (int i = 0; i < 1000; ++i) {
            Environment env = rc.chart.state_env(sampler.next(), rc.params);
            double got = rc.sign * evaluate(engine, env);
            double want = evaluate(rc.reference_form, env);
            local = std::max(local, std::fabs(got - want) / (1.0 + std::fabs(want)));
        }
        if (local > worst) {
            worst = local;
            worst_case = rc.name;
        }
    }
    verdict(1, worst <= 1e-9,
            "closed-form reproduction, 8 fixtures x 1000 samples, worst rel err " +
                fmt(worst) + " (" + worst_case + ") <= 1e-9");
}

// 2. every catalog constant commutes with H at 1000 samples; negative control fails
void criterion2() {
    Tolerances tol; // bracket 1e-9, samples 1000
    bool all = true;
    double worst = 0.0;
    for (const auto& entry : catalog()) {
        VerificationReport rep = run_entry(entry.name, tol, 42);
        for (const auto& c : rep.constants) {
            all = all && c.pass;
            worst = std::max(worst, c.max_bracket);
        }
    }
    Chart free = oracle::identity_chart(1);
    BracketReport neg =
        conservation_check(parse("q1"), parse("p1^2/2"), free, {}, 1000, 1e-9, 42);
    bool control = !neg.pass && neg.max_abs >= 0.1;
    verdict(2, all && control,
            "all catalog constants commute (worst |{K,H}| " + fmt(worst) +
                "); negative control residual " + fmt(neg.max_abs) + " >= 0.1");
}

// 3. sum identity on catalog full-N structures and 100 random ones
void criterion3() {
    double worst = 0.0;
    std::mt19937_64 rng(301);
    std::uniform_real_distribution<double> shift(1.5, 3.5);
    for (const auto& entry : catalog()) {
        for (const auto& pres : entry.system.presentations) {
            if (!pres.separable || pres.separable->kind != SplitKind::Full) continue;
            if (pres.separable->pairs.size() < 2) continue;
            auto cs = carter_constants(*pres.separable, true);
            StateSampler sampler(entry.system.chart(pres.chart), entry.system.parameters,
                                 303);
            std::vector<Environment> samples;
            for (int i = 0; i < 100; ++i)
                samples.push_back(entry.system.chart(pres.chart)
                                      .state_env(sampler.next(), entry.system.parameters));
            worst = std::max(worst, sum_identity_residual(cs, samples));
        }
    }
    std::uniform_int_distribution<int> dim(2, 4);
    for (int trial = 0; trial < 100; ++trial) {
        int n = dim(rng);
        SeparableStructure s;
        std::vector<std::string> qs, ps;
        for (int i = 1; i <= n; ++i) {
            std::string qi = "q" + std::to_string(i), pi = "p" + std::to_string(i);
            qs.push_back(qi);
            ps.push_back(pi);
            Expr u = Expr::add(Expr::number(0.5), Expr::pow(Expr::symbol(qi), Expr::number(2)));
            s.pairs.push_back({u, oracle::random_poly({qi, pi}, rng), {i - 1}});
        }
        auto cs = carter_constants(s, true);
        std::vector<Environment> samples;
        std::uniform_real_distribution<double> pt(-1.5, 1.5);
        for (int i = 0; i < 100; ++i) {
            Environment env;
            for (int k = 0; k < n; ++k) {
                env[qs[static_cast<std::size_t>(k)]] = pt(rng) + shift(rng);
                env[ps[static_cast<std::size_t>(k)]] = pt(rng);
            }
            samples.push_back(env);
        }
        worst = std::max(worst, sum_identity_residual(cs, samples));
    }
    verdict(3, worst <= 1e-10,
            "sum identity, catalog + 100 random structures (n in 2..4), max |sum kappa| " +
                fmt(worst) + " <= 1e-10");
}

// 4. quotient form == product form at all samples, all entries
void criterion4() {
    double worst = 0.0;
    for (const auto& entry : catalog()) {
        for (const auto& pres : entry.system.presentations) {
            if (!pres.separable || pres.separable->pairs.size() < 2) continue;
            auto cs = carter_constants(*pres.separable,
                                       pres.separable->kind == SplitKind::Full);
            const Chart& chart = entry.system.chart(pres.chart);
            StateSampler sampler(chart, entry.system.parameters, 404);
            for (int i = 0; i < 1000; ++i) {
                Environment env = chart.state_env(sampler.next(), entry.system.parameters);
                for (const auto& c : cs) {
                    double q = evaluate(c.quotient_form, env);
                    double p = evaluate(c.product_form, env);
                    worst = std::max(worst, std::fabs(q - p) / (1.0 + std::fabs(q)));
                }
            }
        }
    }
    verdict(4, worst <= 1e-10,
            "form identity |quotient - product|, worst rel " + fmt(worst) + " <= 1e-10");
}

// 5. modal gradient ranks 3/3/3/4, >= 95% of 200 samples
void criterion5() {
    struct Case {
        const char* entry;
        int expect;
    } cases[] = {{"example1", 3}, {"example2", 3}, {"example3", 3}, {"evans", 4}};
    bool all = true;
    std::string detail;
    for (const auto& cse : cases) {
        const SystemDefinition& sys = catalog_entry(cse.entry).system;
        const Chart* ref = sys.reference_chart();
        const Presentation* pres = sys.presentation_in(ref->name);
        std::vector<Expr> fs{pres->hamiltonian};
        std::vector<std::string> names{"H"};
        for (const auto& d : sys.declared_constants)
            if (d.chart == ref->name) {
                fs.push_back(d.expr);
                names.push_back(d.name);
            }
        RankReport rep = functional_rank(fs, names, *ref, sys.parameters, 200, 1e-8, 505);
        int at_mode = static_cast<int>(rep.per_sample_rank.size()) - rep.off_modal;
        bool ok = rep.modal_rank == cse.expect && rep.independent &&
                  at_mode * 20 >= static_cast<int>(rep.per_sample_rank.size()) * 19;
        all = all && ok;
        detail += std::string(cse.entry) + "=" + std::to_string(rep.modal_rank) + " ";
    }
    verdict(5, all, "modal ranks " + detail + "(expected 3 3 3 4, >=95% of 200 samples)");
}

// 6. chart equivalence <= 1e-10 at 1000 samples per pair; corrupted control fails
void criterion6() {
    double worst = 0.0;
    bool all = true;
    for (const char* name : {"example1", "example2", "example3", "evans"}) {
        auto residuals =
            verify_chart_equivalence(catalog_entry(name).system, 1000, 1e-10, 606);
        for (const auto& r : residuals) {
            all = all && r.pass;
            worst = std::max(worst, r.residual);
        }
    }
    SystemDefinition corrupted = catalog_entry("example2").system;
    for (Presentation& pres : corrupted.presentations)
        if (pres.chart == "parabolic")
            pres.hamiltonian = substitute(pres.hamiltonian, {{"beta", parse("beta + 1")}});
    auto bad = verify_chart_equivalence(corrupted, 200, 1e-10, 606);
    double bad_worst = 0.0;
    for (const auto& r : bad) bad_worst = std::max(bad_worst, r.residual);
    bool control = bad_worst >= 1e-2;
    verdict(6, all && control,
            "cross-chart residual, worst " + fmt(worst) +
                " <= 1e-10; corrupted control " + fmt(bad_worst) + " >= 1e-2");
}

// 7. long implicit-midpoint orbit on the anharmonic quotient system
void criterion7() {
    const SystemDefinition& sys = catalog_entry("example3").system;
    const Presentation* pres = sys.presentation_in("rotparabolic");
    const Chart& chart = sys.chart("rotparabolic");
    Expr K1 = carter_constants(*pres->separable)[0].quotient_form;
    PhaseState s0{"rotparabolic", {1.0, 0.5}, {0.2, -0.3}};
    std::vector<std::pair<std::string, Expr>> invs{{"H", pres->hamiltonian}, {"K1", K1}};

    auto t0 = std::chrono::steady_clock::now();
    Trajectory full = integrate(pres->hamiltonian, s0, chart, sys.parameters, 1e-3,
                                100000, "implicit_midpoint", invs);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double drift = full.max_rel_drift();

    Trajectory half = integrate(pres->hamiltonian, s0, chart, sys.parameters, 5e-4,
                                200000, "implicit_midpoint", invs);
    double ratio = drift / half.max_rel_drift();
    bool ok = full.status == OrbitStatus::Ok && half.status == OrbitStatus::Ok &&
              drift <= 1e-6 && ratio >= 3.0 && secs <= 60.0;
    verdict(7, ok,
            "1e5-step midpoint orbit: drift " + fmt(drift) + " <= 1e-6, halving ratio " +
                fmt(ratio) + " >= 3, runtime " + fmt(secs) + "s <= 60s");
}

// 8. AD vs central differences on every catalog expression; canonical brackets
void criterion8() {
    double worst = 0.0;
    for (const auto& entry : catalog()) {
        std::vector<std::pair<std::string, Expr>> exprs;
        for (const auto& pres : entry.system.presentations)
            exprs.emplace_back(pres.chart, pres.hamiltonian);
        for (const auto& d : entry.system.declared_constants)
            exprs.emplace_back(d.chart, d.expr);
        for (const auto& [chart_name, e] : exprs) {
            const Chart& chart = entry.system.chart(chart_name);
            StateSampler sampler(chart, entry.system.parameters, 808);
            for (int i = 0; i < 100; ++i) {
                Environment env = chart.state_env(sampler.next(), entry.system.parameters);
                for (const auto& sym : chart.symbols()) {
                    double ad = partial(e, sym, env);
                    double fd = oracle::central_diff(e, sym, env);
                    worst = std::max(worst, std::fabs(ad - fd) / (1.0 + std::fabs(fd)));
                }
            }
        }
    }
    bool canonical = true;
    Chart c3 = oracle::identity_chart(3);
    PhaseState s{"cartesian", {0.3, -0.7, 1.1}, {0.9, 0.2, -1.3}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = poisson_bracket(Expr::symbol(c3.coords[static_cast<std::size_t>(i)]),
                                       Expr::symbol(c3.momenta[static_cast<std::size_t>(j)]),
                                       s, c3, {});
            if (std::fabs(v - (i == j ? 1.0 : 0.0)) > 4.0 * 2.220446049250313e-16)
                canonical = false;
        }
    verdict(8, worst <= 1e-5 && canonical,
            "AD vs finite differences, worst rel " + fmt(worst) +
                " <= 1e-5; canonical brackets exact to 4 ulp");
}

// 9. CLI determinism: identical seeds give byte-identical reports
void criterion9(const std::string& cli) {
    std::string out1 = "acceptance_report_1.json", out2 = "acceptance_report_2.json";
    std::string base = "\"" + cli + "\" verify --catalog evans --seed 7 --out ";
    int rc1 = std::system((base + out1).c_str());
    int rc2 = std::system((base + out2).c_str());
    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    std::string a = slurp(out1), b = slurp(out2);
    bool ok = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    verdict(9, ok, "verify --catalog evans --seed 7 twice: " +
                       std::string(ok ? "byte-identical reports" : "reports differ or CLI failed"));
}

} // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "./carter";
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9(cli);
    std::printf("%s\n", failures == 0 ? "ACCEPTANCE: ALL CRITERIA PASS"
                                      : "ACCEPTANCE: FAILURES PRESENT");
    return failures == 0 ? 0 : 1;
}

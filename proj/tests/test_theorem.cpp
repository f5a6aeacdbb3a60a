#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "carter/catalog.hpp"
#include "carter/theorem.hpp"
#include "oracle.hpp"

using namespace carter;

namespace {

SeparableStructure two_dof() {
    SeparableStructure s;
    s.pairs.push_back({parse("q1^2"), parse("p1^2 + q1^4"), {0}});
    s.pairs.push_back({parse("q2^2"), parse("p2^2 + q2^4"), {1}});
    return s;
}

Environment sample_env(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    Environment env;
    for (int i = 1; i <= n; ++i) {
        env["q" + std::to_string(i)] = d(rng) + 2.0; // keep sum U away from 0
        env["p" + std::to_string(i)] = d(rng);
    }
    return env;
}

} // namespace

TEST_CASE("assemble_hamiltonian basic shapes") {
    SeparableStructure s;
    s.pairs.push_back({parse("1"), parse("p^2"), {0}});
    CHECK(evaluate(assemble_hamiltonian(s), {{"p", 3.0}}) == 4.5); // p^2/2

    SeparableStructure t;
    t.pairs.push_back({parse("1"), parse("p1^2"), {0}});
    t.pairs.push_back({parse("1"), parse("p2^2"), {1}});
    CHECK(evaluate(assemble_hamiltonian(t), {{"p1", 2.0}, {"p2", 2.0}}) == 2.0); // (p1^2+p2^2)/4
}

TEST_CASE("reconstruction identity: 2 sum(U) H - sum(H) vanishes") {
    std::mt19937_64 rng(5);
    SeparableStructure s = two_dof();
    Expr H = assemble_hamiltonian(s);
    for (int i = 0; i < 200; ++i) {
        Environment env = sample_env(rng, 2);
        double su = evaluate(parse("q1^2 + q2^2"), env);
        double sh = evaluate(parse("p1^2 + q1^4 + p2^2 + q2^4"), env);
        double resid = 2.0 * su * evaluate(H, env) - sh;
        CHECK(std::fabs(resid) <= 1e-10 * (1.0 + std::fabs(sh)));
    }
}

TEST_CASE("n=2 constant matches the closed two-block formula") {
    SeparableStructure s = two_dof();
    auto cs = carter_constants(s);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].index == 0);
    // (U_1 H_2 - U_2 H_1) / (U_1 + U_2)
    Expr direct = parse("(q1^2*(p2^2 + q2^4) - q2^2*(p1^2 + q1^4))/(q1^2 + q2^2)");
    std::mt19937_64 rng(8);
    for (int i = 0; i < 500; ++i) {
        Environment env = sample_env(rng, 2);
        double a = evaluate(cs[0].quotient_form, env);
        double b = evaluate(direct, env);
        CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(b)));
    }
}

TEST_CASE("quotient and product forms agree at 1000 samples") {
    std::mt19937_64 rng(21);
    for (int n : {2, 3, 4}) {
        SeparableStructure s;
        for (int i = 1; i <= n; ++i) {
            std::string qi = "q" + std::to_string(i), pi = "p" + std::to_string(i);
            s.pairs.push_back({parse("1 + " + qi + "^2"),
                               parse(pi + "^2 + " + qi + "^2*" + pi + "^2"),
                               {i - 1}});
        }
        auto cs = carter_constants(s, true);
        REQUIRE(static_cast<int>(cs.size()) == n);
        for (int i = 0; i < 1000 / n; ++i) {
            Environment env = sample_env(rng, n);
            for (const auto& c : cs) {
                double q = evaluate(c.quotient_form, env);
                double p = evaluate(c.product_form, env);
                CHECK(std::fabs(q - p) <= 1e-10 * (1.0 + std::fabs(q)));
            }
        }
    }
}

TEST_CASE("sum identity over random polynomial structures") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> dim(2, 4);
    for (int trial = 0; trial < 30; ++trial) {
        int n = dim(rng);
        SeparableStructure s;
        for (int i = 1; i <= n; ++i) {
            std::string qi = "q" + std::to_string(i), pi = "p" + std::to_string(i);
            Expr u = Expr::add(parse("0.5 + " + qi + "^2"),
                               Expr::mul(Expr::number(0.1 * static_cast<double>(rng() % 10)),
                                         parse(qi + "^4")));
            Expr h = oracle::random_poly({qi, pi}, rng);
            s.pairs.push_back({u, h, {i - 1}});
        }
        auto cs = carter_constants(s, true);
        std::vector<Environment> samples;
        for (int i = 0; i < 100; ++i) samples.push_back(sample_env(rng, n));
        CHECK(sum_identity_residual(cs, samples) <= 1e-10);
    }
}

TEST_CASE("preconditions") {
    SeparableStructure s;
    s.pairs.push_back({parse("1"), parse("p1^2"), {0}});
    CHECK_THROWS_AS(carter_constants(s), ModelError); // single block
    auto cs = carter_constants(two_dof(), true);
    CHECK_THROWS_AS(sum_identity_residual({cs[0]}, {}), ModelError);
}

TEST_CASE("partial split emits one block-0 constant") {
    // singleton block 0 against a two-coordinate remainder
    Chart chart = oracle::identity_chart(3);
    SeparableStructure s;
    s.kind = SplitKind::Partial;
    s.pairs.push_back({parse("q1^2"), parse("q1^2*p1^2"), {0}});
    s.pairs.push_back({parse("0"), parse("p2^2 + p3^2 + q2^2 + q3^2"), {1, 2}});
    CHECK(validate_separability(s, chart, {}).empty());
    auto cs = carter_constants(s);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].index == 0);
    // kappa = (U_1 H_23 - U_23 H_1)/(U_1 + U_23) with U_23 = 0
    Expr direct = parse("(q1^2*(p2^2 + p3^2 + q2^2 + q3^2) - 0*q1^2*p1^2)/(q1^2 + 0)");
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        Environment env = sample_env(rng, 3);
        double a = evaluate(cs[0].quotient_form, env);
        double b = evaluate(direct, env);
        CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(b)));
    }
}

TEST_CASE("nested constants reject foreign inner coordinates") {
    const SystemDefinition& sys = catalog_entry("evans").system;
    const Presentation* pres = sys.presentation_in("spherical");
    REQUIRE(pres);
    REQUIRE(pres->separable);
    REQUIRE(pres->separable->nested);
    const Chart& chart = sys.chart("spherical");

    // the shipped nesting works and yields outer + inner
    auto cs = nested_constants(*pres->separable, *pres->separable->nested, chart);
    CHECK(cs.size() == 2);

    // an inner pair touching the outer singleton block (r) must be rejected
    auto bad = *pres->separable->nested;
    bad[0].hamiltonian = parse("sin(th)^2*p_th^2/2 + r");
    CHECK_THROWS_AS(nested_constants(*pres->separable, bad, chart), ModelError);
}

TEST_CASE("folds are substituted out of emitted constants") {
    const SystemDefinition& sys = catalog_entry("evans").system;
    const Presentation* pres = sys.presentation_in("rotparabolic");
    REQUIRE(pres);
    REQUIRE(pres->separable);
    CHECK(!pres->separable->folds.empty());
    auto cs = carter_constants(*pres->separable);
    for (const auto& c : cs) {
        auto fv = free_vars(c.quotient_form);
        CHECK(fv.count("I2") == 0);
    }
}

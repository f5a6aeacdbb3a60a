#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "carter/catalog.hpp"
#include "carter/independence.hpp"
#include "carter/theorem.hpp"
#include "oracle.hpp"

using namespace carter;

TEST_CASE("gradient_matrix basic shapes") {
    Chart c = oracle::identity_chart(1);
    PhaseState s{"cartesian", {0.4}, {0.9}};
    Matrix m = gradient_matrix({parse("q1"), parse("p1")}, s, c, {});
    REQUIRE(m.rows == 2);
    REQUIRE(m.cols == 2);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 0.0);
    CHECK(m(1, 0) == 0.0);
    CHECK(m(1, 1) == 1.0);
}

TEST_CASE("matrix_rank detects proportional rows") {
    Chart c = oracle::identity_chart(1);
    PhaseState s{"cartesian", {0.4}, {0.9}};
    Expr H = parse("(p1^2 + q1^2)/2");
    Expr H2 = Expr::mul(H, H);
    Matrix m = gradient_matrix({H, H2}, s, c, {});
    CHECK(matrix_rank(m, 1e-8) == 1); // grad(H^2) = 2H grad(H)
    Matrix id = gradient_matrix({parse("q1"), parse("p1")}, s, c, {});
    std::vector<double> pivots;
    CHECK(matrix_rank(id, 1e-8, &pivots) == 2);
    CHECK(pivots.size() == 2);
}

TEST_CASE("superintegrable sets reach full modal rank") {
    struct Case {
        const char* entry;
        int expect;
    } cases[] = {{"example1", 3}, {"example2", 3}, {"example3", 3}, {"evans", 4}};
    for (const auto& [name, expect] : cases) {
        const SystemDefinition& sys = catalog_entry(name).system;
        const Chart* ref = sys.reference_chart();
        REQUIRE(ref);
        const Presentation* pres = sys.presentation_in(ref->name);
        REQUIRE(pres);
        std::vector<Expr> fs{pres->hamiltonian};
        std::vector<std::string> names{"H"};
        for (const auto& d : sys.declared_constants)
            if (d.chart == ref->name) {
                fs.push_back(d.expr);
                names.push_back(d.name);
            }
        REQUIRE(static_cast<int>(fs.size()) == expect);
        RankReport rep = functional_rank(fs, names, *ref, sys.parameters, 100, 1e-8, 13);
        INFO(name);
        CHECK(rep.modal_rank == expect);
        CHECK(rep.independent);
        CHECK(rep.off_modal * 20 <= static_cast<int>(rep.per_sample_rank.size()));
    }
}

TEST_CASE("full-N set including the redundant constant drops one rank") {
    const SystemDefinition& sys = catalog_entry("example3").system;
    const Presentation* pres = sys.presentation_in("rotparabolic");
    auto cs = carter_constants(*pres->separable, true);
    REQUIRE(cs.size() == 2);
    std::vector<Expr> fs{pres->hamiltonian, cs[0].quotient_form, cs[1].quotient_form};
    RankReport rep = functional_rank(fs, {"H", "kappa_1", "kappa_2"},
                                     sys.chart("rotparabolic"), sys.parameters, 100, 1e-8, 13);
    // sum kappa_i = 0 forces one dependency; n = 2 here so rank is n = 2
    CHECK(rep.modal_rank == 2);
    CHECK(!rep.independent);
}

TEST_CASE("verdict is scale invariant") {
    const SystemDefinition& sys = catalog_entry("example1").system;
    const Chart* ref = sys.reference_chart();
    const Presentation* pres = sys.presentation_in(ref->name);
    std::vector<Expr> fs{pres->hamiltonian};
    for (const auto& d : sys.declared_constants)
        if (d.chart == ref->name) fs.push_back(d.expr);
    RankReport base = functional_rank(fs, {"H", "K1", "K3"}, *ref, sys.parameters, 60, 1e-8, 5);
    fs[1] = Expr::mul(Expr::number(1e6), fs[1]);
    RankReport scaled = functional_rank(fs, {"H", "cK1", "K3"}, *ref, sys.parameters, 60, 1e-8, 5);
    CHECK(base.modal_rank == scaled.modal_rank);
    CHECK(base.independent == scaled.independent);
}

TEST_CASE("adding a dependent element never raises the rank") {
    const SystemDefinition& sys = catalog_entry("example1").system;
    const Chart* ref = sys.reference_chart();
    const Presentation* pres = sys.presentation_in(ref->name);
    std::vector<Expr> fs{pres->hamiltonian};
    for (const auto& d : sys.declared_constants)
        if (d.chart == ref->name) fs.push_back(d.expr);
    // f1 + f2*f3 is functionally dependent on {f1, f2, f3}
    fs.push_back(Expr::add(fs[0], Expr::mul(fs[1], fs[2])));
    RankReport rep = functional_rank(fs, {"H", "K1", "K3", "dep"}, *ref, sys.parameters,
                                     60, 1e-8, 5);
    CHECK(rep.modal_rank == 3);
    CHECK(!rep.independent);
}

TEST_CASE("sample-count precondition") {
    const SystemDefinition& sys = catalog_entry("example1").system;
    const Chart* ref = sys.reference_chart();
    CHECK_THROWS_AS(functional_rank({parse("x")}, {"f"}, *ref, sys.parameters, 5, 1e-8, 1),
                    ModelError);
}

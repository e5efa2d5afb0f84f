#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "qss/potential.hpp"

using namespace qss;

TEST_CASE("constant potential") {
    PotentialModel m = PotentialModel::constant(1.5);
    double x[3] = {1.0, -2.0, 0.5};
    CHECK(m.eval(x, 3) == 1.5);
    CHECK(m.radial_derivative(x, 3) == 0.0);
    CHECK(m.sup_radial() == 0.0);
    CHECK(m.is_constant());
    CHECK_THROWS_WITH_AS(PotentialModel::constant(0.0), "A_0 must be positive", validation_error);
    CHECK_THROWS_WITH_AS(PotentialModel::constant(-1.0), "A_0 must be positive", validation_error);
}

TEST_CASE("well potential matches its closed form") {
    // A(x) = Ainf - (Ainf - A0)/(1 + r^2)
    PotentialModel m = PotentialModel::builtin("well", 1.0, 2.0);
    double o[3] = {0.0, 0.0, 0.0};
    CHECK(m.eval(o, 3) == doctest::Approx(1.0).epsilon(1e-15));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    for (int k = 0; k < 50; ++k) {
        double x[3] = {U(rng), U(rng), U(rng)};
        double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        CHECK(m.eval(x, 3) == doctest::Approx(2.0 - 1.0 / (1.0 + r2)).epsilon(1e-14));
        // nabla A . x = 2 r^2 (Ainf - A0) / (1 + r^2)^2
        double want = 2.0 * r2 / ((1.0 + r2) * (1.0 + r2));
        CHECK(m.radial_derivative(x, 3) == doctest::Approx(want).epsilon(1e-12));
    }
    // the radial derivative peaks at r = 1 with value (Ainf - A0)/2
    CHECK(m.sup_radial() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(PotentialModel::builtin("well", 1.0, 0.5),
                         "Ainf must satisfy A_0 <= Ainf < infinity", validation_error);
}

TEST_CASE("harmonic potential is unbounded by construction") {
    PotentialModel m = PotentialModel::builtin("harmonic", 1.0, 0.0);
    double x[3] = {1.0, 2.0, -1.0};
    CHECK(m.eval(x, 3) == doctest::Approx(1.0 + 6.0).epsilon(1e-15));
    CHECK(m.radial_derivative(x, 3) == doctest::Approx(12.0).epsilon(1e-14));
    CHECK(std::isinf(m.Ainf));
    CHECK(std::isinf(m.sup_radial()));
    CHECK_THROWS_WITH_AS(PotentialModel::builtin("step", 1.0, 2.0),
                         "unknown builtin potential: step", validation_error);
}

TEST_CASE("tabulated potential interpolates its node table") {
    Grid g = Grid::make(3, 9, 8.0);  // h = 2
    std::vector<double> tab(g.total);
    auto well = PotentialModel::builtin("well", 1.0, 2.0);
    for (std::size_t i = 0; i < g.total; ++i) {
        double x[3];
        qsstest::node_coords(g, i, x);
        tab[i] = well.eval(x, 3);
    }
    PotentialModel m = PotentialModel::tabulated(g, tab, {}, 1.0, 2.0);
    // exact at nodes
    for (std::size_t i = 0; i < g.total; i += 37) {
        double x[3];
        qsstest::node_coords(g, i, x);
        CHECK(m.eval(x, 3) == doctest::Approx(tab[i]).epsilon(1e-14));
    }
    // midpoint along one axis averages the two node values
    double xm[3] = {1.0, 0.0, 0.0};  // between nodes x0=0 and x0=2
    double xa[3] = {0.0, 0.0, 0.0}, xb[3] = {2.0, 0.0, 0.0};
    CHECK(m.eval(xm, 3) ==
          doctest::Approx(0.5 * (m.eval(xa, 3) + m.eval(xb, 3))).epsilon(1e-14));
    // outside the box the model reads Ainf
    double xo[3] = {9.0, 0.0, 0.0};
    CHECK(m.eval(xo, 3) == 2.0);
    // finite-difference radial derivative tracks the analytic one loosely
    double xp[3] = {1.0, 1.0, 0.0};
    CHECK(m.radial_derivative(xp, 3) ==
          doctest::Approx(well.radial_derivative(xp, 3)).epsilon(0.5));
    CHECK_THROWS_WITH_AS(PotentialModel::tabulated(g, std::vector<double>(5), {}, 1.0, 2.0),
                         "potential table size mismatch", validation_error);
}

TEST_CASE("tabulated potential prefers supplied gradient tables") {
    Grid g = Grid::make(3, 9, 8.0);
    std::vector<double> tab(g.total, 1.0);
    std::vector<std::vector<double>> grads(3, std::vector<double>(g.total, 0.0));
    // plant a recognizable gradient: dA/dx0 = 3 everywhere
    for (std::size_t i = 0; i < g.total; ++i) grads[0][i] = 3.0;
    PotentialModel m = PotentialModel::tabulated(g, tab, grads, 1.0, 1.0);
    double x[3] = {2.0, 0.0, 0.0};
    // nabla A . x = 3 * x0
    CHECK(m.radial_derivative(x, 3) == doctest::Approx(6.0).epsilon(1e-13));
    std::vector<std::vector<double>> bad(2, std::vector<double>(g.total, 0.0));
    CHECK_THROWS_WITH_AS(PotentialModel::tabulated(g, tab, bad, 1.0, 1.0),
                         "potential gradient tables must number N", validation_error);
}

TEST_CASE("hypothesis checks: constant and well pass all four") {
    Params prm;
    Grid g = Grid::make(3, 21, 8.0);
    for (auto m : {PotentialModel::constant(1.0), PotentialModel::builtin("well", 1.0, 2.0)}) {
        ConditionReport rep = check_conditions(m, prm, g);
        CHECK(rep.all_pass());
        CHECK(rep.entries[0].id == "A1");
        CHECK(rep.entries[1].id == "A2");
        CHECK(rep.entries[2].id == "A3");
        CHECK(rep.entries[3].id == "A4");
        for (const auto& e : rep.entries) CHECK(!e.detail.empty());
    }
}

TEST_CASE("hypothesis checks: harmonic fails boundedness, not symmetry") {
    Params prm;
    Grid g = Grid::make(3, 21, 8.0);
    ConditionReport rep = check_conditions(PotentialModel::builtin("harmonic", 1.0, 0.0), prm, g);
    CHECK(!rep.all_pass());
    CHECK(!rep.entries[0].pass);
    CHECK(rep.entries[0].detail == "Ainf is not finite");
    CHECK(!rep.entries[1].pass);
    CHECK(rep.entries[1].detail == "radial derivative is unbounded");
    CHECK(rep.entries[3].pass);  // still rotation invariant
}

TEST_CASE("hypothesis checks: the sign condition can fail for small alpha+beta") {
    // (alpha+beta-2) A - nabla A . x dips negative for the well once
    // alpha+beta is close to 2
    Params prm;
    prm.alpha = 1.01;
    prm.beta = 1.01;
    prm.validate();
    Grid g = Grid::make(3, 21, 8.0);
    ConditionReport rep = check_conditions(PotentialModel::builtin("well", 1.0, 2.0), prm, g);
    CHECK(!rep.entries[1].pass);
    CHECK(rep.entries[1].detail.find("sign condition violated") == 0);
}

TEST_CASE("hypothesis checks: an asymmetric table trips A4") {
    Params prm;
    Grid g = Grid::make(3, 21, 8.0);
    std::vector<double> tab(g.total);
    for (std::size_t i = 0; i < g.total; ++i) {
        double x[3];
        qsstest::node_coords(g, i, x);
        tab[i] = 1.0 + 0.05 * (x[0] + 8.0);  // depends on y1 alone
    }
    PotentialModel m = PotentialModel::tabulated(g, tab, {}, 1.0, 2.0);
    ConditionReport rep = check_conditions(m, prm, g);
    CHECK(!rep.entries[3].pass);
    CHECK(rep.entries[3].detail.find("rotation variance") == 0);
}

TEST_CASE("params validation messages") {
    Params p;
    p.N = 2;
    CHECK_THROWS_WITH_AS(p.validate(), "N must be at least 3", validation_error);
    p = Params{};
    p.alpha = 1.0;
    CHECK_THROWS_WITH_AS(p.validate(), "alpha must exceed 1", validation_error);
    p = Params{};
    p.beta = 0.5;
    CHECK_THROWS_WITH_AS(p.validate(), "beta must exceed 1", validation_error);
    p = Params{};
    p.alpha = 6.0;
    p.beta = 6.5;
    CHECK_THROWS_WITH_AS(p.validate(), "alpha+beta must lie in (2, 4N/(N-2))",
                         validation_error);
    p = Params{};
    p.B = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), "B must be positive", validation_error);
}

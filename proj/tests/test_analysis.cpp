#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "qss/analysis.hpp"

using namespace qss;

TEST_CASE("nodal domains of the four-lobe angular profile") {
    Grid g = Grid::make(3, 33, 8.0);
    Field f = qsstest::twisted(g, 2, 2.0);  // sin(2 theta) flavor: 4 lobes
    NodalReport rep = nodal_domains(f, 1e-8, "u");
    CHECK(rep.component == "u");
    CHECK(rep.positive_domains == 2);
    CHECK(rep.negative_domains == 2);
    CHECK(rep.total == 4);
    CHECK(rep.threshold == 1e-8);
    // sign flip swaps the positive and negative counts
    Field neg(g);
    for (std::size_t i = 0; i < g.total; ++i) neg.v[i] = -f.v[i];
    NodalReport rneg = nodal_domains(neg, 1e-8);
    CHECK(rneg.positive_domains == 2);
    CHECK(rneg.negative_domains == 2);
}

TEST_CASE("nodal domains: six lobes for the s=3 profile and zero for radial") {
    Grid g = Grid::make(3, 33, 8.0);
    CHECK(nodal_domains(qsstest::twisted(g, 3, 2.0), 1e-8).total == 6);
    Field radial = qsstest::gaussian(g, 2.0);
    NodalReport r = nodal_domains(radial, 1e-8);
    CHECK(r.total == 1);
    CHECK(r.negative_domains == 0);
}

TEST_CASE("nodal count via face adjacency on a hand-built checkerboard") {
    // alternating signs with |f| = 1 everywhere: no two same-sign nodes
    // share a face, so every node is its own domain
    Grid g = Grid::make(3, 5, 2.0);
    Field f(g);
    for (std::size_t i = 0; i < g.total; ++i) {
        int iv[3];
        g.unravel(i, iv);
        f.v[i] = ((iv[0] + iv[1] + iv[2]) % 2 == 0) ? 1.0 : -1.0;
    }
    NodalReport rep = nodal_domains(f, 0.5);
    CHECK(rep.total == 125);
    CHECK(rep.positive_domains == 63);
    CHECK(rep.negative_domains == 62);
}

TEST_CASE("nodal threshold merges weak features monotonically") {
    Grid g = Grid::make(3, 33, 8.0);
    Field f = qsstest::twisted(g, 2, 2.0);
    int lo = nodal_domains(f, 1e-8).total;
    int hi = nodal_domains(f, 1e-2).total;
    CHECK(hi <= lo);
    CHECK_THROWS_WITH_AS(nodal_domains(f, 0.0), "nodal threshold eps must be positive",
                         validation_error);
    CHECK_THROWS_WITH_AS(nodal_domains(f, -1.0), "nodal threshold eps must be positive",
                         validation_error);
}

TEST_CASE("weak residual: zero pair and measured floor at a solution") {
    Params prm;
    PotentialModel model = PotentialModel::constant(1.0);
    Grid g = Grid::make(3, 17, 8.0);
    Pair zero(g);
    CHECK(weak_residual(zero, prm, model) == 0.0);
    // any nonzero non-critical pair has a visibly positive residual
    Pair p(g);
    p.u = qsstest::gaussian(g, 1.5);
    p.v = qsstest::gaussian(g, 1.2);
    CHECK(weak_residual(p, prm, model) > 1e-3);
}

TEST_CASE("weak residual at the converged constrained minimizer") {
    // the constrained minimizer is not an unconstrained critical point of
    // the truncated problem: the Lagrange multiplier leaves a floor,
    // measured 3.53e-2 at n=33 (stable under the solver tolerance)
    SolverConfig cfg;
    Params prm;
    PotentialModel model = PotentialModel::constant(1.0);
    Grid g = Grid::make(3, 21, 8.0);
    SolveReport rep = minimize(cfg, prm, model, g);
    REQUIRE(rep.status == SolveStatus::converged);
    double wr = weak_residual(rep.final_pair, prm, model);
    CHECK(wr > 1e-3);
    CHECK(wr < 0.2);
}

TEST_CASE("diagnose accepts a fresh converged report") {
    SolverConfig cfg;
    Params prm;
    PotentialModel model = PotentialModel::constant(1.0);
    Grid g = Grid::make(3, 17, 8.0);
    DihedralGroup G = build_group(2);
    SolveReport rep = minimize(cfg, prm, model, g);
    REQUIRE(rep.status == SolveStatus::converged);
    DiagnoseSummary s = diagnose(rep, prm, model, G);
    CHECK(s.all_pass);
    REQUIRE(s.checks.size() == 6u);
    CHECK(s.checks[0].name == "m");
    CHECK(s.checks[1].name == "constraint-residual");
    CHECK(s.checks[2].name == "pohozaev-residual");
    CHECK(s.checks[3].name == "equivariance-defect");
    CHECK(s.checks[4].name == "nodal");
    CHECK(s.checks[5].name == "J-positivity");
    for (const auto& c : s.checks) CHECK(c.pass);
}

TEST_CASE("diagnose flags a tampered report") {
    SolverConfig cfg;
    Params prm;
    PotentialModel model = PotentialModel::constant(1.0);
    Grid g = Grid::make(3, 17, 8.0);
    DihedralGroup G = build_group(2);
    SolveReport rep = minimize(cfg, prm, model, g);
    REQUIRE(rep.status == SolveStatus::converged);

    SolveReport bad = rep;
    bad.m_estimate *= 1.001;  // stored value no longer matches the pair
    DiagnoseSummary s1 = diagnose(bad, prm, model, G);
    CHECK(!s1.all_pass);
    CHECK(!s1.checks[0].pass);

    SolveReport broken = rep;
    broken.final_pair.u.v[7] += 0.3;  // pair no longer on the manifold
    DiagnoseSummary s2 = diagnose(broken, prm, model, G);
    CHECK(!s2.all_pass);
}

TEST_CASE("diagnose rejects non-converged input") {
    SolverConfig cfg;
    cfg.max_iter = 2;
    cfg.tol_grad = 1e-14;
    Params prm;
    PotentialModel model = PotentialModel::constant(1.0);
    Grid g = Grid::make(3, 17, 8.0);
    DihedralGroup G = build_group(2);
    SolveReport rep = minimize(cfg, prm, model, g);
    REQUIRE(rep.status == SolveStatus::non_converged);
    CHECK_THROWS_WITH_AS(diagnose(rep, prm, model, G),
                         "diagnose requires a converged report", validation_error);
}

TEST_CASE("PGM slice encodes the mid-plane sign pattern") {
    Grid g = Grid::make(3, 9, 8.0);
    Field f = qsstest::twisted(g, 2, 3.0);
    const std::string path = "/tmp/qss_test_slice.pgm";
    write_pgm_slice(f, 1e-9, path);
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    is >> magic >> w >> h >> maxval;
    CHECK(magic == "P5");
    CHECK(w == 9);
    CHECK(h == 9);
    CHECK(maxval == 255);
    is.get();  // single whitespace after the header
    std::vector<unsigned char> px(81);
    is.read(reinterpret_cast<char*>(px.data()), 81);
    REQUIRE(is.gcount() == 81);
    // rows run y2 top-down; with f ~ y1*y2 the corners alternate sign
    auto at = [&](int col, int row) { return static_cast<int>(px[row * 9 + col]); };
    CHECK(at(7, 1) == 255);  // y1 > 0, y2 > 0
    CHECK(at(1, 1) == 0);    // y1 < 0, y2 > 0
    CHECK(at(1, 7) == 255);  // y1 < 0, y2 < 0
    CHECK(at(7, 7) == 0);
    CHECK(at(4, 4) == 128);  // the axis is inside the |f| <= eps band
    std::remove(path.c_str());
}

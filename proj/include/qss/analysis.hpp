#pragma once

#include <string>

#include "qss/solver.hpp"

namespace qss {

struct NodalReport {
    std::string component;
    double threshold = 0.0;
    int positive_domains = 0;
    int negative_domains = 0;
    int total = 0;
};

// Connected components of {f > eps} and {f < -eps} under face adjacency
// (2N neighbors), counted separately.
NodalReport nodal_domains(const Field& f, double eps, const std::string& component = "");

// ||grad_I(p)|| / (1 + ||p||), both in the h^N-weighted discrete L^2 norm;
// zero exactly at unconstrained critical points of the discrete energy.
double weak_residual(const Pair& p, const Params& prm, const PotentialModel& model);

struct DiagnoseCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double reference = 0.0;
    std::string note;
};

struct DiagnoseSummary {
    std::vector<DiagnoseCheck> checks;
    bool all_pass = true;
};

// Re-verifies a converged report against fresh evaluations on its final
// pair: m, constraint residual, Pohozaev residual, equivariance defect,
// nodal counts, J positivity.  Any stored-vs-recomputed mismatch beyond
// 1e-10 (relative where meaningful) fails the corresponding check.
// Non-converged reports are rejected with validation_error.
DiagnoseSummary diagnose(const SolveReport& report, const Params& prm,
                         const PotentialModel& model, const DihedralGroup& G,
                         bool paper_literal_G = false);

// Binary PGM (P5, maxval 255) of the sign pattern on the mid-plane slice
// through the last N-2 axes: 0 negative, 255 positive, 128 where |f| <= eps.
void write_pgm_slice(const Field& f, double eps, const std::string& path);

}  // namespace qss

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qss/fibering.hpp"
#include "qss/symmetry.hpp"

namespace qss {

struct SolverConfig {
    int s = 2;
    double step0 = 1e-2;
    double shrink = 0.5;
    double tol_dx = -1.0;  // < 0: derive 1e-6 * (1 + d_X(seed, 0)) at run time
    double tol_grad = 1e-5;
    int max_iter = 5000;
    double coupling_floor = 1e-10;
    double seed_width_u = 1.5;
    double seed_width_v = 1.2;
    std::string precond = "sobolev";  // or "none"
    bool paper_literal_G = false;

    void validate() const {
        if (s < 2) throw validation_error("s must be at least 2");
        if (!(step0 > 0.0)) throw validation_error("step0 must be positive");
        if (!(shrink > 0.0 && shrink < 1.0)) throw validation_error("shrink must lie in (0,1)");
        if (!(tol_dx > 0.0) && tol_dx != -1.0) throw validation_error("tol_dx must be positive");
        if (!(tol_grad > 0.0)) throw validation_error("tol_grad must be positive");
        if (max_iter < 1) throw validation_error("max_iter must be positive");
        if (!(coupling_floor > 0.0)) throw validation_error("coupling_floor must be positive");
        if (!(seed_width_u > 0.0 && seed_width_v > 0.0))
            throw validation_error("seed widths must be positive");
        if (precond != "sobolev" && precond != "none")
            throw validation_error("precond must be \"sobolev\" or \"none\"");
    }
};

enum class SolveStatus { converged, non_converged, coupling_collapse, fibering_failure };

const char* to_string(SolveStatus s);

struct TraceRow {
    int iter = 0;
    double I = 0.0;
    double G = 0.0;
    double gradnorm = 0.0;  // projected-gradient norm, the tol_grad quantity
    double dx = 0.0;        // d_X from the previous accepted iterate
};

struct SolveReport {
    Pair final_pair;
    SolveStatus status = SolveStatus::non_converged;
    std::string stop_reason;
    double m_estimate = 0.0;
    double constraint_residual = 0.0;  // |G(final)|
    double constraint_scale = 0.0;     // |a|+|b|+|c| at the final pair
    double pohozaev_residual = 0.0;    // relative
    double grad_norm = 0.0;            // projected-gradient norm at the end
    double equivariance_defect = 0.0;
    int nodal_count_u = 0;
    int nodal_count_v = 0;
    int iterations = 0;
    double tol_dx_used = 0.0;
    std::vector<TraceRow> trace;
};

// u0 = exp(-(|y|^2+|z|^2)/w_u^2) * sin(s*theta), theta = atan2(y2, y1);
// v0 the same with w_v.
Pair initial_seed(const SolverConfig& cfg, const Grid& g);

// Projected descent of I over the constraint manifold intersected with the
// equivariant subspace:
//   symmetrize -> project -> { gradient, tangent projection, Barzilai-
//   Borwein trial step, backtracking on decrease of I-after-reprojection }
// Stops on projected-gradient norm <= tol_grad, or step distance d_X <
// tol_dx, or max_iter.  Accepted iterates keep I non-increasing, |G| at
// roundoff, coupling above the floor, and the s=2 equivariance defect at
// machine zero.
SolveReport minimize(const SolverConfig& cfg, const Params& prm, const PotentialModel& model,
                     const Grid& g, const Pair* warm_start = nullptr);

// Multistart aggregate: the smallest m among converged runs plus spread.
struct MultistartSummary {
    double m_estimate = 0.0;
    double spread_rel = 0.0;  // (max-min)/min over converged runs
    int best_index = -1;
    int converged_runs = 0;
};
MultistartSummary estimate_m(const std::vector<SolveReport>& reports);

}  // namespace qss

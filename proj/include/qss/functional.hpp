#pragma once

#include "qss/field.hpp"
#include "qss/params.hpp"
#include "qss/potential.hpp"

namespace qss {

// Every integral the energy is built from, with the 1/2 weights already
// applied where the functional carries them:
//   kinetic     = 1/2 int |grad u|^2 + |grad v|^2
//   mass        = 1/2 int A u^2 + B v^2
//   quasilinear = 1/2 int u^2 |grad u|^2 + v^2 |grad v|^2
//   coupling    =     int |u|^alpha |v|^beta          (0^gamma := 0)
//   radial_term = 1/2 int (nabla A . x) u^2
//
// Gradient-carrying terms use the link-based discretization described in
// the README (per-link squared differences with half-weighted boundary
// links), which is what grad_I differentiates exactly.
struct EnergyBreakdown {
    double kinetic = 0.0;
    double mass = 0.0;
    double quasilinear = 0.0;
    double coupling = 0.0;
    double radial_term = 0.0;
};

EnergyBreakdown breakdown(const Pair& p, const Params& prm, const PotentialModel& model);

// I = kinetic + mass + quasilinear - (2/(alpha+beta)) * coupling
double energy_I(const EnergyBreakdown& b, const Params& prm);
double energy_I(const Pair& p, const Params& prm, const PotentialModel& model);

// G = N*kinetic + (N+2)*(mass + quasilinear) + radial_term
//     - (2(N+alpha+beta)/(alpha+beta)) * coupling
// The radial term makes G the exact t-derivative of I along the scaling
// family; `paper_literal` drops it (identical for constant A).
double constraint_G(const EnergyBreakdown& b, const Params& prm, bool paper_literal = false);
double constraint_G(const Pair& p, const Params& prm, const PotentialModel& model,
                    bool paper_literal = false);

// Magnitude scale for G residuals: |a| + |b| + |c| with a, b, c the raw
// fibering coefficients (unweighted integrals).
double constraint_scale(const EnergyBreakdown& b, const Params& prm);

// P = (N-2)*(kinetic + quasilinear) + N*mass + radial_term
//     - (2N/(alpha+beta)) * coupling; zero at solutions.
double pohozaev_P(const EnergyBreakdown& b, const Params& prm);
// |P| / (sum of absolute values of its terms)
double pohozaev_residual(const EnergyBreakdown& b, const Params& prm);

// Explicit coupling-free assembly of I - G/(N+alpha+beta); positive for
// nonzero pairs whenever (alpha+beta-2)A - nabla A.x >= 0.
double reduced_J(const Pair& p, const Params& prm, const PotentialModel& model);

double coupling(const Pair& p, const Params& prm);

// Exact gradient of the discrete I (differentiate-after-discretize), scaled
// so the directional derivative along (q1,q2) equals h^N * sum of nodewise
// products.
Pair grad_I(const Pair& p, const Params& prm, const PotentialModel& model);

// Same for G.
Pair grad_G(const Pair& p, const Params& prm, const PotentialModel& model,
            bool paper_literal = false);

// --- link-based building blocks (shared with the fibering module) --------

// sum over links of (delta/h)^2, boundary links against a zero ghost
double link_kinetic_sum(const Field& f);
// sum over links of (delta/h)^2 * average of f^2 at the link ends
double link_quasi_sum(const Field& f);

// Raw (unhalved) integrals needed by the fibering map:
//   a  = int |grad u|^2 + |grad v|^2      (link sums * h^N)
//   m  = int A u^2 + B v^2
//   q  = int u^2|grad u|^2 + v^2|grad v|^2
//   c  = int |u|^alpha |v|^beta
struct RawIntegrals {
    double a = 0.0, m = 0.0, q = 0.0, c = 0.0;
    double radial = 0.0;  // int (nabla A . x) u^2
};
RawIntegrals raw_integrals(const Pair& p, const Params& prm, const PotentialModel& model);

}  // namespace qss

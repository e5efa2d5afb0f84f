#pragma once

#include "qss/functional.hpp"

namespace qss {

// Coefficients of the scalar fibering polynomial for constant A:
//   h(t) = (a/2) t^N + (b/2) t^(N+2) - (2c/(alpha+beta)) t^(N+alpha+beta)
struct FiberCoefficients {
    double a = 0.0;  // int |grad u|^2 + |grad v|^2
    double b = 0.0;  // int A u^2 + B v^2 + u^2|grad u|^2 + v^2|grad v|^2
    double c = 0.0;  // int |u|^alpha |v|^beta
};

FiberCoefficients fiber_coefficients(const Pair& p, const Params& prm,
                                     const PotentialModel& model);

// Evaluator for h and h' with two paths:
//  * closed form from FiberCoefficients (constant A),
//  * re-evaluation that samples A(t x) fresh at every t (any A); for
//    constant A the two agree to roundoff.
class Fiber {
  public:
    Fiber(const Pair& p, const Params& prm, const PotentialModel& model,
          bool paper_literal = false);
    // coefficient-only instance (no pair attached); h and h' use the closed
    // form, which is all the scalar unimodality analysis needs
    Fiber(const FiberCoefficients& coef, const Params& prm);

    double h(double t) const;
    double h_prime(double t) const;

    // closed-form path, valid only when the model is constant
    double h_closed(double t) const;
    double h_prime_closed(double t) const;

    const FiberCoefficients& coefficients() const { return coef_; }
    double coupling() const { return c_; }

  private:
    double a_ = 0.0, bq_ = 0.0, c_ = 0.0;  // bq = int B v^2 + quasilinear part
    double au_const_ = 0.0;                // int A u^2 for the constant model
    FiberCoefficients coef_;
    const Pair* p_ = nullptr;
    Params prm_;
    const PotentialModel* model_ = nullptr;
    bool paper_literal_ = false;

    double a_term(double t) const;        // int A(t x) u^2
    double a_term_deriv(double t) const;  // int [(N+2)A(tx) + nablaA(tx).(tx)] u^2
};

struct fibering_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unique root of h' on (0, inf): exponential bracketing from t=1 inside
// [1e-6, 1e6], then bisection to relative width 1e-12.  Throws
// fibering_failure when the coupling vanishes or the bracket escapes the
// range.
double find_tbar(const Fiber& f);
double find_tbar(const Pair& p, const Params& prm, const PotentialModel& model);

// Iterated fibering rescale until |G| <= tol_rel * (|a|+|b|+|c|); pure
// scaling only, no amplitude adjustment.  Each pass rescales by the current
// tbar; iteration is needed because grid rescaling interpolates.
Pair project_to_M(const Pair& p, const Params& prm, const PotentialModel& model,
                  double tol_rel = 1e-7, int max_passes = 60, int* passes_out = nullptr,
                  bool paper_literal = false);

// Amplitude mu > 0 with G(mu u, mu v) = 0, from the current raw integrals:
// closed form for alpha+beta = 4, bisection otherwise.  Throws
// fibering_failure when no root exists (quartic term dominates).
double amplitude_root(const RawIntegrals& r, const Params& prm, bool paper_literal = false);

// Internal projection used by the solver: a few fibering passes followed by
// the exact amplitude root, so the returned pair satisfies G = 0 to
// roundoff.  Falls back to pure fibering when the amplitude root does not
// exist.
Pair project_exact(const Pair& p, const Params& prm, const PotentialModel& model,
                   bool paper_literal = false, int* passes_out = nullptr);

}  // namespace qss

#include "qss/fibering.hpp"

#include <cmath>

namespace qss {

FiberCoefficients fiber_coefficients(const Pair& p, const Params& prm,
                                     const PotentialModel& model) {
    const RawIntegrals r = raw_integrals(p, prm, model);
    return {r.a, r.m + r.q, r.c};
}

Fiber::Fiber(const Pair& p, const Params& prm, const PotentialModel& model, bool paper_literal)
    : p_(&p), prm_(prm), model_(&model), paper_literal_(paper_literal) {
    const RawIntegrals r = raw_integrals(p, prm, model);
    a_ = r.a;
    c_ = r.c;
    if (model.is_constant()) {
        au_const_ = 0.0;  // folded below; keep m split out of bq for the general path
        double u2 = 0.0;
        for (double u : p.u.v) u2 += u * u;
        double hN = 1.0;
        for (int a = 0; a < p.u.g->dims; ++a) hN *= p.u.g->spacing;
        au_const_ = model.A0 * hN * u2;
        bq_ = (r.m - au_const_) + r.q;  // B v^2 part + quasilinear part
    } else {
        double bv2 = 0.0;
        for (double v : p.v.v) bv2 += v * v;
        double hN = 1.0;
        for (int a = 0; a < p.u.g->dims; ++a) hN *= p.u.g->spacing;
        bq_ = prm.B * hN * bv2 + r.q;
    }
    coef_ = {r.a, r.m + r.q, r.c};
}

Fiber::Fiber(const FiberCoefficients& coef, const Params& prm) : prm_(prm) {
    a_ = coef.a;
    bq_ = coef.b;
    c_ = coef.c;
    coef_ = coef;
}

double Fiber::a_term(double t) const {
    if (model_->is_constant()) return au_const_;
    const Grid& g = *p_->u.g;
    int idx[8];
    double x[8];
    double s = 0.0;
    for (std::size_t k = 0; k < g.total; ++k) {
        g.unravel(k, idx);
        for (int a = 0; a < g.dims; ++a) x[a] = t * g.coord(static_cast<std::size_t>(idx[a]));
        const double u = p_->u.v[k];
        s += model_->eval(x, g.dims) * u * u;
    }
    double hN = 1.0;
    for (int a = 0; a < g.dims; ++a) hN *= g.spacing;
    return hN * s;
}

double Fiber::a_term_deriv(double t) const {
    const double N = prm_.N;
    if (model_->is_constant()) return (N + 2.0) * au_const_;
    const Grid& g = *p_->u.g;
    int idx[8];
    double x[8];
    double s = 0.0;
    for (std::size_t k = 0; k < g.total; ++k) {
        g.unravel(k, idx);
        for (int a = 0; a < g.dims; ++a) x[a] = t * g.coord(static_cast<std::size_t>(idx[a]));
        const double u = p_->u.v[k];
        double w = (N + 2.0) * model_->eval(x, g.dims);
        if (!paper_literal_) w += model_->radial_derivative(x, g.dims);
        s += w * u * u;
    }
    double hN = 1.0;
    for (int a = 0; a < g.dims; ++a) hN *= g.spacing;
    return hN * s;
}

double Fiber::h(double t) const {
    if (!(t > 0.0)) throw validation_error("fibering parameter t must be positive");
    if (model_ == nullptr) return h_closed(t);
    const double N = prm_.N, ab = prm_.ab();
    return 0.5 * a_ * std::pow(t, N) + 0.5 * (bq_ + a_term(t)) * std::pow(t, N + 2.0) -
           (2.0 / ab) * c_ * std::pow(t, N + ab);
}

double Fiber::h_prime(double t) const {
    if (!(t > 0.0)) throw validation_error("fibering parameter t must be positive");
    if (model_ == nullptr) return h_prime_closed(t);
    const double N = prm_.N, ab = prm_.ab();
    return 0.5 * N * a_ * std::pow(t, N - 1.0) +
           0.5 * (((N + 2.0) * bq_ + a_term_deriv(t))) * std::pow(t, N + 1.0) -
           (2.0 * (N + ab) / ab) * c_ * std::pow(t, N + ab - 1.0);
}

double Fiber::h_closed(double t) const {
    if (!(t > 0.0)) throw validation_error("fibering parameter t must be positive");
    const double N = prm_.N, ab = prm_.ab();
    return 0.5 * coef_.a * std::pow(t, N) + 0.5 * coef_.b * std::pow(t, N + 2.0) -
           (2.0 / ab) * coef_.c * std::pow(t, N + ab);
}

double Fiber::h_prime_closed(double t) const {
    if (!(t > 0.0)) throw validation_error("fibering parameter t must be positive");
    const double N = prm_.N, ab = prm_.ab();
    return 0.5 * N * coef_.a * std::pow(t, N - 1.0) +
           0.5 * (N + 2.0) * coef_.b * std::pow(t, N + 1.0) -
           (2.0 * (N + ab) / ab) * coef_.c * std::pow(t, N + ab - 1.0);
}

double find_tbar(const Fiber& f) {
    if (!(f.coupling() > 0.0))
        throw fibering_failure("fibering failure: coupling integral vanishes");
    constexpr double t_lo_limit = 1e-6, t_hi_limit = 1e6;
    double t = 1.0;
    double fp = f.h_prime(t);
    double lo, hi;
    if (fp == 0.0) return t;
    if (fp > 0.0) {
        while (fp > 0.0) {
            t *= 2.0;
            if (t > t_hi_limit)
                throw fibering_failure("fibering failure: no maximizer below t = 1e6");
            fp = f.h_prime(t);
        }
        lo = 0.5 * t;
        hi = t;
    } else {
        while (fp <= 0.0) {
            t *= 0.5;
            if (t < t_lo_limit)
                throw fibering_failure("fibering failure: no maximizer above t = 1e-6");
            fp = f.h_prime(t);
        }
        lo = t;
        hi = 2.0 * t;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f.h_prime(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * mid) break;
    }
    return 0.5 * (lo + hi);
}

double find_tbar(const Pair& p, const Params& prm, const PotentialModel& model) {
    return find_tbar(Fiber(p, prm, model));
}

namespace {
double tbar_of(const Pair& p, const Params& prm, const PotentialModel& model, bool paper_literal) {
    return find_tbar(Fiber(p, prm, model, paper_literal));
}
}  // namespace

Pair project_to_M(const Pair& p, const Params& prm, const PotentialModel& model, double tol_rel,
                  int max_passes, int* passes_out, bool paper_literal) {
    Pair cur = p;
    int done = 0;
    for (int pass = 0; pass < max_passes; ++pass) {
        const EnergyBreakdown b = breakdown(cur, prm, model);
        if (!(b.coupling > 0.0))
            throw fibering_failure("fibering failure: coupling integral vanishes");
        const double rel = std::fabs(constraint_G(b, prm, paper_literal)) / constraint_scale(b, prm);
        if (rel <= tol_rel) {
            if (passes_out) *passes_out = done;
            return cur;
        }
        const double t = tbar_of(cur, prm, model, paper_literal);
        if (std::fabs(t - 1.0) < 1e-14) {
            if (passes_out) *passes_out = done;
            return cur;  // at the fiber maximum; residual is pure roundoff
        }
        cur.u = scale_field(cur.u, t);
        cur.v = scale_field(cur.v, t);
        ++done;
    }
    throw fibering_failure("fibering failure: projection did not settle on the constraint");
}

double amplitude_root(const RawIntegrals& r, const Params& prm, bool paper_literal) {
    const double N = prm.N, ab = prm.ab();
    // G(mu u, mu v) = mu^2 P2 + mu^4 P4 - mu^(2+ab) PC with the quartic
    // terms collecting the quasilinear part
    const double P2 =
        0.5 * N * r.a + 0.5 * (N + 2.0) * r.m + (paper_literal ? 0.0 : 0.5 * r.radial);
    const double P4 = 0.5 * (N + 2.0) * r.q;
    const double PC = (2.0 * (N + ab) / ab) * r.c;
    if (!(PC > 0.0)) throw fibering_failure("fibering failure: coupling integral vanishes");
    if (std::fabs(ab - 4.0) < 1e-14) {
        const double den = PC - P4;
        if (den <= 0.0)
            throw fibering_failure("fibering failure: no amplitude root (quartic dominates)");
        return std::sqrt(P2 / den);
    }
    auto gmu = [&](double mu) {
        return P2 * mu * mu + P4 * std::pow(mu, 4.0) - PC * std::pow(mu, 2.0 + ab);
    };
    double lo = 1.0, hi = 1.0;
    int guard = 0;
    while (gmu(lo) <= 0.0) {
        lo *= 0.5;
        if (++guard > 400) throw fibering_failure("fibering failure: no amplitude root");
    }
    guard = 0;
    while (gmu(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 400) throw fibering_failure("fibering failure: no amplitude root");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (gmu(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * mid) break;
    }
    return 0.5 * (lo + hi);
}

Pair project_exact(const Pair& p, const Params& prm, const PotentialModel& model,
                   bool paper_literal, int* passes_out) {
    Pair cur = p;
    int done = 0;
    constexpr int kMaxPasses = 40;
    // a single long dilation pushes mass through the box wall and the
    // truncated integrals stop tracking the fibering model; walk the ray
    // in bounded steps instead
    constexpr double kStepCap = 2.5;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        const EnergyBreakdown b = breakdown(cur, prm, model);
        if (!(b.coupling > 0.0))
            throw fibering_failure("fibering failure: coupling integral vanishes");
        const double rel = std::fabs(constraint_G(b, prm, paper_literal)) / constraint_scale(b, prm);
        if (rel <= 1e-9) break;
        // take the amplitude root as soon as it exists: it lands the
        // constraint exactly and cuts the dilation ray short
        if (pass >= 1) {
            bool amp_ok = true;
            try {
                (void)amplitude_root(raw_integrals(cur, prm, model), prm, paper_literal);
            } catch (const fibering_failure&) {
                amp_ok = false;
            }
            if (amp_ok) break;
        }
        const double t = tbar_of(cur, prm, model, paper_literal);
        // once the maximizer is near 1 the amplitude polish below lands the
        // constraint exactly; more interpolation passes only lose accuracy
        if (pass >= 1 && std::fabs(t - 1.0) < 5e-2) break;
        if (std::fabs(t - 1.0) < 1e-14) break;
        const double step = std::clamp(t, 1.0 / kStepCap, kStepCap);
        cur.u = scale_field(cur.u, step);
        cur.v = scale_field(cur.v, step);
        ++done;
    }
    const RawIntegrals r = raw_integrals(cur, prm, model);
    double mu = 1.0;
    try {
        mu = amplitude_root(r, prm, paper_literal);
    } catch (const fibering_failure&) {
        // no amplitude root from here; fall back to pure fibering
        int extra = 0;
        Pair out = project_to_M(cur, prm, model, 1e-9, kMaxPasses, &extra, paper_literal);
        if (passes_out) *passes_out = done + extra;
        return out;
    }
    if (mu != 1.0) {
        for (double& x : cur.u.v) x *= mu;
        for (double& x : cur.v.v) x *= mu;
    }
    if (passes_out) *passes_out = done;
    return cur;
}

}  // namespace qss

#include "qss/solver.hpp"

#include <algorithm>
#include <cmath>

#include "qss/analysis.hpp"
#include "qss/dst.hpp"

namespace qss {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged:
            return "CONVERGED";
        case SolveStatus::non_converged:
            return "NON-CONVERGED";
        case SolveStatus::coupling_collapse:
            return "COUPLING-COLLAPSE";
        case SolveStatus::fibering_failure:
            return "FIBERING-FAILURE";
    }
    return "?";
}

Pair initial_seed(const SolverConfig& cfg, const Grid& g) {
    Pair p(g);
    int idx[8];
    const int N = g.dims;
    for (std::size_t k = 0; k < g.total; ++k) {
        g.unravel(k, idx);
        double r2 = 0.0;
        for (int a = 0; a < N; ++a) {
            const double x = g.coord(static_cast<std::size_t>(idx[a]));
            r2 += x * x;
        }
        const double y1 = g.coord(static_cast<std::size_t>(idx[0]));
        const double y2 = g.coord(static_cast<std::size_t>(idx[1]));
        const double ang = std::sin(cfg.s * std::atan2(y2, y1));
        p.u.v[k] = std::exp(-r2 / (cfg.seed_width_u * cfg.seed_width_u)) * ang;
        p.v.v[k] = std::exp(-r2 / (cfg.seed_width_v * cfg.seed_width_v)) * ang;
    }
    return p;
}

namespace {

double hN_of(const Grid& g) {
    double hN = 1.0;
    for (int a = 0; a < g.dims; ++a) hN *= g.spacing;
    return hN;
}

double dot(const Grid& g, const Pair& a, const Pair& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.total; ++k) s += a.u.v[k] * b.u.v[k] + a.v.v[k] * b.v.v[k];
    return hN_of(g) * s;
}

double norm(const Grid& g, const Pair& a) { return std::sqrt(dot(g, a, a)); }

Pair symmetrize_pair(const Pair& p, const DihedralGroup& G) {
    Pair out;
    out.u = symmetrize(p.u, G);
    out.v = symmetrize(p.v, G);
    return out;
}

}  // namespace

SolveReport minimize(const SolverConfig& cfg, const Params& prm, const PotentialModel& model,
                     const Grid& g, const Pair* warm_start) {
    cfg.validate();
    prm.validate();
    const bool lit = cfg.paper_literal_G;
    const DihedralGroup group = build_group(cfg.s);
    const bool use_precond = cfg.precond == "sobolev";
    std::unique_ptr<SobolevPrecond> M;
    if (use_precond) M = std::make_unique<SobolevPrecond>(g);

    SolveReport rep;
    auto finish = [&](Pair p, SolveStatus st, const std::string& why, int iters, double pgn,
                      std::vector<TraceRow> trace, double tol_dx) {
        const EnergyBreakdown b = breakdown(p, prm, model);
        rep.status = st;
        rep.stop_reason = why;
        rep.m_estimate = energy_I(b, prm);
        rep.constraint_residual = std::fabs(constraint_G(b, prm, lit));
        rep.constraint_scale = constraint_scale(b, prm);
        rep.pohozaev_residual = pohozaev_residual(b, prm);
        rep.grad_norm = pgn;
        rep.equivariance_defect = qss::equivariance_defect(p, group);
        const double eps_u = 1e-3 * max_abs(p.u);
        const double eps_v = 1e-3 * max_abs(p.v);
        rep.nodal_count_u = eps_u > 0.0 ? nodal_domains(p.u, eps_u, "u").total : 0;
        rep.nodal_count_v = eps_v > 0.0 ? nodal_domains(p.v, eps_v, "v").total : 0;
        rep.iterations = iters;
        rep.tol_dx_used = tol_dx;
        rep.trace = std::move(trace);
        rep.final_pair = std::move(p);
        return std::move(rep);
    };

    // seed
    Pair p = warm_start ? *warm_start : initial_seed(cfg, g);
    p = symmetrize_pair(p, group);
    if (!(coupling(p, prm) > cfg.coupling_floor))
        return finish(std::move(p), SolveStatus::coupling_collapse,
                      "coupling integral at or below the floor on the seed", 0, 0.0, {}, 0.0);

    const Pair zero(g);
    const double tol_dx = cfg.tol_dx > 0.0 ? cfg.tol_dx : 1e-6 * (1.0 + distance_X(p, zero));

    std::vector<TraceRow> trace;
    try {
        p = project_exact(p, prm, model, lit);
    } catch (const fibering_failure& e) {
        return finish(std::move(p), SolveStatus::fibering_failure, e.what(), 0, 0.0, {}, tol_dx);
    }

    EnergyBreakdown b = breakdown(p, prm, model);
    double Ei = energy_I(b, prm);
    trace.push_back({0, Ei, constraint_G(b, prm, lit), 0.0, 0.0});

    double step = cfg.step0;
    bool have_prev = false;
    Pair prev_p, prev_d;
    double pgn = 0.0;

    Pair gI, gG, pu, pn, d, trial;
    // projected-gradient norm: component of grad I tangent to {G = const},
    // normalized by 1 + ||p||
    auto measure_pgn = [&](const Pair& q) {
        gI = grad_I(q, prm, model);
        gG = grad_G(q, prm, model, lit);
        const double pn2 = norm(g, q);
        const double nn = dot(g, gG, gG);
        const double lam = nn > 0.0 ? dot(g, gG, gI) / nn : 0.0;
        double tgsq = 0.0;
        for (std::size_t k = 0; k < g.total; ++k) {
            const double tu = gI.u.v[k] - lam * gG.u.v[k];
            const double tv = gI.v.v[k] - lam * gG.v.v[k];
            tgsq += tu * tu + tv * tv;
        }
        return std::sqrt(hN_of(g) * tgsq) / (1.0 + pn2);
    };
    for (int it = 0; it < cfg.max_iter; ++it) {
        pgn = measure_pgn(p);
        trace.back().gradnorm = pgn;

        if (pgn <= cfg.tol_grad)
            return finish(std::move(p), SolveStatus::converged, "projected-gradient norm below tol_grad",
                          it, pgn, std::move(trace), tol_dx);

        // preconditioned tangent direction
        if (use_precond) {
            if (!pu.u.g) pu = Pair(g), pn = Pair(g);
            M->apply(gI.u, pu.u);
            M->apply(gI.v, pu.v);
            M->apply(gG.u, pn.u);
            M->apply(gG.v, pn.v);
        } else {
            pu = gI;
            pn = gG;
        }
        const double den = dot(g, gG, pn);
        const double theta = den != 0.0 ? dot(g, gG, pu) / den : 0.0;
        if (!d.u.g) d = Pair(g);
        for (std::size_t k = 0; k < g.total; ++k) {
            d.u.v[k] = pu.u.v[k] - theta * pn.u.v[k];
            d.v.v[k] = pu.v.v[k] - theta * pn.v.v[k];
        }

        // Barzilai-Borwein trial step from the previous accepted move
        if (have_prev) {
            double num = 0.0, dd = 0.0;
            for (std::size_t k = 0; k < g.total; ++k) {
                const double su = p.u.v[k] - prev_p.u.v[k];
                const double sv = p.v.v[k] - prev_p.v.v[k];
                const double yu = d.u.v[k] - prev_d.u.v[k];
                const double yv = d.v.v[k] - prev_d.v.v[k];
                num += su * yu + sv * yv;
                dd += yu * yu + yv * yv;
            }
            if (num > 0.0 && dd > 0.0) step = std::clamp(num / dd, 1e-3, 20.0);
        }
        prev_p = p;
        prev_d = d;
        have_prev = true;

        bool accepted = false;
        double s = step;
        for (int bt = 0; bt < 60; ++bt) {
            trial = Pair(g);
            for (std::size_t k = 0; k < g.total; ++k) {
                trial.u.v[k] = p.u.v[k] - s * d.u.v[k];
                trial.v.v[k] = p.v.v[k] - s * d.v.v[k];
            }
            trial = symmetrize_pair(trial, group);
            if (!(coupling(trial, prm) > cfg.coupling_floor))
                return finish(std::move(p), SolveStatus::coupling_collapse,
                              "coupling integral fell below the floor during the line search", it,
                              pgn, std::move(trace), tol_dx);
            try {
                trial = project_exact(trial, prm, model, lit);
            } catch (const fibering_failure&) {
                s *= cfg.shrink;
                continue;
            }
            const EnergyBreakdown tb = breakdown(trial, prm, model);
            const double Et = energy_I(tb, prm);
            if (Et < Ei) {
                const double dx = distance_X(trial, p);
                p = std::move(trial);
                b = tb;
                Ei = Et;
                accepted = true;
                trace.push_back({it + 1, Ei, constraint_G(b, prm, lit), 0.0, dx});
                if (dx < tol_dx) {
                    pgn = measure_pgn(p);
                    trace.back().gradnorm = pgn;
                    return finish(std::move(p), SolveStatus::converged,
                                  "step distance d_X below tol_dx", it + 1, pgn, std::move(trace),
                                  tol_dx);
                }
                break;
            }
            s *= cfg.shrink;
        }
        if (!accepted)
            return finish(std::move(p), SolveStatus::non_converged,
                          "line search exhausted without decreasing I", it, pgn, std::move(trace),
                          tol_dx);
    }
    pgn = measure_pgn(p);
    trace.back().gradnorm = pgn;
    return finish(std::move(p), SolveStatus::non_converged, "max_iter reached", cfg.max_iter, pgn,
                  std::move(trace), tol_dx);
}

MultistartSummary estimate_m(const std::vector<SolveReport>& reports) {
    MultistartSummary s;
    double mn = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (reports[i].status != SolveStatus::converged) continue;
        const double m = reports[i].m_estimate;
        if (s.converged_runs == 0 || m < mn) {
            mn = m;
            s.best_index = static_cast<int>(i);
        }
        if (s.converged_runs == 0 || m > mx) mx = m;
        ++s.converged_runs;
    }
    if (s.converged_runs > 0) {
        s.m_estimate = mn;
        s.spread_rel = mn != 0.0 ? (mx - mn) / std::fabs(mn) : 0.0;
    }
    return s;
}

}  // namespace qss

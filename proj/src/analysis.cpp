#include "qss/analysis.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <vector>

#include "qss/functional.hpp"

namespace qss {

namespace {

std::string strf(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double l2_norm_pair(const Grid& g, const Pair& p) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.total; ++k)
        s += p.u.v[k] * p.u.v[k] + p.v.v[k] * p.v.v[k];
    double hN = 1.0;
    for (int a = 0; a < g.dims; ++a) hN *= g.spacing;
    return std::sqrt(hN * s);
}

}  // namespace

NodalReport nodal_domains(const Field& f, double eps, const std::string& component) {
    if (!(eps > 0.0)) throw validation_error("nodal threshold eps must be positive");
    const Grid& g = *f.g;
    const int n = g.points_per_axis;

    // sign classification, then flood fill per sign class with face adjacency
    std::vector<signed char> cls(g.total);
    for (std::size_t k = 0; k < g.total; ++k) {
        const double x = f.v[k];
        cls[k] = x > eps ? 1 : (x < -eps ? -1 : 0);
    }

    NodalReport rep;
    rep.component = component;
    rep.threshold = eps;
    std::vector<char> seen(g.total, 0);
    std::vector<std::size_t> stack;
    std::vector<int> ci(g.dims);
    for (std::size_t k0 = 0; k0 < g.total; ++k0) {
        if (seen[k0] || cls[k0] == 0) continue;
        const signed char sg = cls[k0];
        seen[k0] = 1;
        stack.assign(1, k0);
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            std::size_t rem = k;
            for (int a = g.dims - 1; a >= 0; --a) {
                ci[a] = static_cast<int>(rem % n);
                rem /= n;
            }
            for (int a = 0; a < g.dims; ++a) {
                const std::size_t st = g.stride[a];
                if (ci[a] > 0) {
                    const std::size_t nb = k - st;
                    if (!seen[nb] && cls[nb] == sg) {
                        seen[nb] = 1;
                        stack.push_back(nb);
                    }
                }
                if (ci[a] < n - 1) {
                    const std::size_t nb = k + st;
                    if (!seen[nb] && cls[nb] == sg) {
                        seen[nb] = 1;
                        stack.push_back(nb);
                    }
                }
            }
        }
        if (sg > 0)
            ++rep.positive_domains;
        else
            ++rep.negative_domains;
    }
    rep.total = rep.positive_domains + rep.negative_domains;
    return rep;
}

double weak_residual(const Pair& p, const Params& prm, const PotentialModel& model) {
    const Grid& g = *p.u.g;
    Pair gi = grad_I(p, prm, model);
    double s = 0.0;
    for (std::size_t k = 0; k < g.total; ++k)
        s += gi.u.v[k] * gi.u.v[k] + gi.v.v[k] * gi.v.v[k];
    double hN = 1.0;
    for (int a = 0; a < g.dims; ++a) hN *= g.spacing;
    return std::sqrt(hN * s) / (1.0 + l2_norm_pair(g, p));
}

DiagnoseSummary diagnose(const SolveReport& report, const Params& prm,
                         const PotentialModel& model, const DihedralGroup& G,
                         bool paper_literal_G) {
    if (report.status != SolveStatus::converged)
        throw validation_error("diagnose requires a converged report");
    const Pair& p = report.final_pair;

    DiagnoseSummary out;
    auto push = [&](std::string name, bool pass, double value, double reference,
                    std::string note) {
        out.checks.push_back({std::move(name), pass, value, reference, std::move(note)});
        out.all_pass = out.all_pass && pass;
    };
    auto close_rel = [](double a, double b) { return std::abs(a - b) <= 1e-10 * (1.0 + std::abs(b)); };

    // every value below is a fresh evaluation on the stored pair, compared
    // against what the report claims
    const EnergyBreakdown b = breakdown(p, prm, model);
    const double m_fresh = energy_I(b, prm);
    push("m", m_fresh > 0.0 && close_rel(m_fresh, report.m_estimate), m_fresh, report.m_estimate,
         strf("I on final pair; stored m_estimate %.12g", report.m_estimate));

    const double scale = constraint_scale(b, prm);
    const double g_fresh = std::abs(constraint_G(b, prm, paper_literal_G));
    const double g_tol = 1e-6 * scale;
    push("constraint-residual", g_fresh <= g_tol && close_rel(g_fresh, report.constraint_residual),
         g_fresh, report.constraint_residual, strf("tolerance 1e-6*scale = %.6g", g_tol));

    const double p_fresh = pohozaev_residual(b, prm);
    push("pohozaev-residual", p_fresh <= 1e-2 && close_rel(p_fresh, report.pohozaev_residual),
         p_fresh, report.pohozaev_residual, "relative Pohozaev defect, tolerance 1e-2");

    const double d_fresh = equivariance_defect(p, G);
    push("equivariance-defect",
         d_fresh <= 1e-10 && std::abs(d_fresh - report.equivariance_defect) <= 1e-10, d_fresh,
         report.equivariance_defect, "sup-norm defect over the group, tolerance 1e-10");

    const double eps_u = 1e-3 * max_abs(p.u);
    const double eps_v = 1e-3 * max_abs(p.v);
    const NodalReport nu = nodal_domains(p.u, eps_u, "u");
    const NodalReport nv = nodal_domains(p.v, eps_v, "v");
    const NodalReport nu10 = nodal_domains(p.u, 10.0 * eps_u, "u");
    const NodalReport nv10 = nodal_domains(p.v, 10.0 * eps_v, "v");
    const int want = 2 * G.s;
    push("nodal",
         nu.total >= want && nv.total >= want && nu.total == report.nodal_count_u &&
             nv.total == report.nodal_count_v,
         static_cast<double>(std::min(nu.total, nv.total)), static_cast<double>(want),
         strf("u: %d (%d at 10x eps), v: %d (%d at 10x eps); need >= 2s = %d", nu.total,
              nu10.total, nv.total, nv10.total, want));

    const double j_fresh = reduced_J(p, prm, model);
    push("J-positivity", j_fresh > 0.0, j_fresh, 0.0,
         "reduced functional assembled from its nonnegative terms");

    return out;
}

void write_pgm_slice(const Field& f, double eps, const std::string& path) {
    if (!(eps > 0.0)) throw validation_error("nodal threshold eps must be positive");
    const Grid& g = *f.g;
    const int n = g.points_per_axis;
    const int mid = (n - 1) / 2;

    // mid-plane slice: axes 2..N-1 pinned at the center node, y2 up, y1 right
    std::size_t base = 0;
    for (int a = 2; a < g.dims; ++a) base += static_cast<std::size_t>(mid) * g.stride[a];

    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw io_error("cannot open PGM file for writing: " + path);
    std::fprintf(fp, "P5\n%d %d\n255\n", n, n);
    std::vector<unsigned char> row(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        const int i1 = n - 1 - r;
        for (int i0 = 0; i0 < n; ++i0) {
            const double x = f.v[base + static_cast<std::size_t>(i0) * g.stride[0] +
                                 static_cast<std::size_t>(i1) * g.stride[1]];
            row[static_cast<std::size_t>(i0)] =
                x > eps ? 255 : (x < -eps ? static_cast<unsigned char>(0) : 128);
        }
        if (std::fwrite(row.data(), 1, row.size(), fp) != row.size()) {
            std::fclose(fp);
            throw io_error("short write on PGM file: " + path);
        }
    }
    if (std::fclose(fp) != 0) throw io_error("close failed on PGM file: " + path);
}

}  // namespace qss

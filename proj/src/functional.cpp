#include "qss/functional.hpp"

#include <cmath>

namespace qss {

namespace {

double hN_of(const Grid& g) {
    double hN = 1.0;
    for (int a = 0; a < g.dims; ++a) hN *= g.spacing;
    return hN;
}

// |x|^gamma with the 0^gamma = 0 convention
inline double pow_abs(double x, double gamma) {
    const double ax = std::fabs(x);
    return ax == 0.0 ? 0.0 : std::pow(ax, gamma);
}

// d/dx |x|^gamma = gamma |x|^(gamma-2) x; zero at x = 0 for gamma > 1
inline double dpow_abs(double x, double gamma) {
    if (x == 0.0) return 0.0;
    return gamma * std::pow(std::fabs(x), gamma - 2.0) * x;
}

}  // namespace

double link_kinetic_sum(const Field& f) {
    const Grid& g = *f.g;
    const int n = g.points_per_axis;
    const double invh = 1.0 / g.spacing;
    double tot = 0.0;
    for (int axis = 0; axis < g.dims; ++axis) {
        const std::size_t st = g.stride[static_cast<std::size_t>(axis)];
        const std::size_t nlines = g.lines(axis);
        for (std::size_t line = 0; line < nlines; ++line) {
            const double* p = f.v.data() + g.line_base(axis, line);
            double prev = 0.0;  // ghost
            for (int i = 0; i < n; ++i) {
                const double cur = p[static_cast<std::size_t>(i) * st];
                const double d = (cur - prev) * invh;
                tot += d * d;
                prev = cur;
            }
            const double d = (0.0 - prev) * invh;  // ghost at the far face
            tot += d * d;
        }
    }
    return tot;
}

double link_quasi_sum(const Field& f) {
    const Grid& g = *f.g;
    const int n = g.points_per_axis;
    const double invh = 1.0 / g.spacing;
    double tot = 0.0;
    for (int axis = 0; axis < g.dims; ++axis) {
        const std::size_t st = g.stride[static_cast<std::size_t>(axis)];
        const std::size_t nlines = g.lines(axis);
        for (std::size_t line = 0; line < nlines; ++line) {
            const double* p = f.v.data() + g.line_base(axis, line);
            double prev = 0.0, prev2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double cur = p[static_cast<std::size_t>(i) * st];
                const double cur2 = cur * cur;
                const double d = (cur - prev) * invh;
                tot += d * d * 0.5 * (prev2 + cur2);
                prev = cur;
                prev2 = cur2;
            }
            const double d = (0.0 - prev) * invh;
            tot += d * d * 0.5 * prev2;
        }
    }
    return tot;
}

RawIntegrals raw_integrals(const Pair& p, const Params& prm, const PotentialModel& model) {
    const Grid& g = *p.u.g;
    const double hN = hN_of(g);
    RawIntegrals r;
    r.a = hN * (link_kinetic_sum(p.u) + link_kinetic_sum(p.v));
    r.q = hN * (link_quasi_sum(p.u) + link_quasi_sum(p.v));

    double mass = 0.0, coup = 0.0, radial = 0.0;
    if (model.is_constant()) {
        const double A0 = model.A0;
        for (std::size_t k = 0; k < g.total; ++k) {
            const double u = p.u.v[k], v = p.v.v[k];
            mass += A0 * u * u + prm.B * v * v;
            coup += pow_abs(u, prm.alpha) * pow_abs(v, prm.beta);
        }
    } else {
        int idx[8];
        double x[8];
        for (std::size_t k = 0; k < g.total; ++k) {
            g.unravel(k, idx);
            for (int a = 0; a < g.dims; ++a) x[a] = g.coord(static_cast<std::size_t>(idx[a]));
            const double u = p.u.v[k], v = p.v.v[k];
            mass += model.eval(x, g.dims) * u * u + prm.B * v * v;
            radial += model.radial_derivative(x, g.dims) * u * u;
            coup += pow_abs(u, prm.alpha) * pow_abs(v, prm.beta);
        }
    }
    r.m = hN * mass;
    r.c = hN * coup;
    r.radial = hN * radial;
    return r;
}

EnergyBreakdown breakdown(const Pair& p, const Params& prm, const PotentialModel& model) {
    const RawIntegrals r = raw_integrals(p, prm, model);
    EnergyBreakdown b;
    b.kinetic = 0.5 * r.a;
    b.mass = 0.5 * r.m;
    b.quasilinear = 0.5 * r.q;
    b.coupling = r.c;
    b.radial_term = 0.5 * r.radial;
    return b;
}

double energy_I(const EnergyBreakdown& b, const Params& prm) {
    return b.kinetic + b.mass + b.quasilinear - (2.0 / prm.ab()) * b.coupling;
}

double energy_I(const Pair& p, const Params& prm, const PotentialModel& model) {
    return energy_I(breakdown(p, prm, model), prm);
}

double constraint_G(const EnergyBreakdown& b, const Params& prm, bool paper_literal) {
    const double N = prm.N, ab = prm.ab();
    double gval = N * b.kinetic + (N + 2.0) * (b.mass + b.quasilinear) -
                  (2.0 * (N + ab) / ab) * b.coupling;
    if (!paper_literal) gval += b.radial_term;
    return gval;
}

double constraint_G(const Pair& p, const Params& prm, const PotentialModel& model,
                    bool paper_literal) {
    return constraint_G(breakdown(p, prm, model), prm, paper_literal);
}

double constraint_scale(const EnergyBreakdown& b, const Params& prm) {
    (void)prm;
    return std::fabs(2.0 * b.kinetic) + std::fabs(2.0 * (b.mass + b.quasilinear)) +
           std::fabs(b.coupling);
}

double pohozaev_P(const EnergyBreakdown& b, const Params& prm) {
    const double N = prm.N, ab = prm.ab();
    return (N - 2.0) * (b.kinetic + b.quasilinear) + N * b.mass + b.radial_term -
           (2.0 * N / ab) * b.coupling;
}

double pohozaev_residual(const EnergyBreakdown& b, const Params& prm) {
    const double N = prm.N, ab = prm.ab();
    const double t1 = (N - 2.0) * (b.kinetic + b.quasilinear);
    const double t2 = N * b.mass;
    const double t3 = b.radial_term;
    const double t4 = (2.0 * N / ab) * b.coupling;
    const double scale = std::fabs(t1) + std::fabs(t2) + std::fabs(t3) + std::fabs(t4);
    if (scale == 0.0) return 0.0;
    return std::fabs(t1 + t2 + t3 - t4) / scale;
}

double reduced_J(const Pair& p, const Params& prm, const PotentialModel& model) {
    const Grid& g = *p.u.g;
    const double hN = hN_of(g);
    const double N = prm.N, ab = prm.ab();
    const double denom = 2.0 * (N + ab);

    const double grads = hN * (link_kinetic_sum(p.u) + link_kinetic_sum(p.v));
    const double quasi = hN * (link_quasi_sum(p.u) + link_quasi_sum(p.v));

    double bv2 = 0.0;
    for (double v : p.v.v) bv2 += v * v;
    bv2 *= prm.B * hN;

    double uterm = 0.0;
    if (model.is_constant()) {
        double u2 = 0.0;
        for (double u : p.u.v) u2 += u * u;
        uterm = (ab - 2.0) * model.A0 * hN * u2;
    } else {
        int idx[8];
        double x[8];
        for (std::size_t k = 0; k < g.total; ++k) {
            g.unravel(k, idx);
            for (int a = 0; a < g.dims; ++a) x[a] = g.coord(static_cast<std::size_t>(idx[a]));
            const double u = p.u.v[k];
            uterm += ((ab - 2.0) * model.eval(x, g.dims) - model.radial_derivative(x, g.dims)) * u * u;
        }
        uterm *= hN;
    }

    return (ab / denom) * grads + ((ab - 2.0) / denom) * (bv2 + quasi) + (1.0 / denom) * uterm;
}

double coupling(const Pair& p, const Params& prm) {
    const Grid& g = *p.u.g;
    double c = 0.0;
    for (std::size_t k = 0; k < g.total; ++k)
        c += pow_abs(p.u.v[k], prm.alpha) * pow_abs(p.v.v[k], prm.beta);
    return hN_of(g) * c;
}

namespace {

// Accumulates into `out` the derivative of
//   (w_kin/2) * link_kinetic_sum + (w_quasi/2) * link_quasi_sum
// with respect to the node values of F.  Links run over every consecutive
// node pair per axis plus one ghost link (value 0) at each face; the quasi
// weight of a link is the average of F^2 at its ends.
void accumulate_link_grad(const Field& F, double w_kin, double w_quasi, Field& out) {
    const Grid& g = *F.g;
    const int n = g.points_per_axis;
    const double invh = 1.0 / g.spacing;
    for (int axis = 0; axis < g.dims; ++axis) {
        const std::size_t st = g.stride[static_cast<std::size_t>(axis)];
        const std::size_t nlines = g.lines(axis);
        for (std::size_t line = 0; line < nlines; ++line) {
            const std::size_t base = g.line_base(axis, line);
            const double* p = F.v.data() + base;
            double* o = out.v.data() + base;
            for (int i = 0; i < n; ++i) {
                const std::size_t k = static_cast<std::size_t>(i) * st;
                const double Fi = p[k];
                const double Fl = i > 0 ? p[k - st] : 0.0;
                const double Fr = i + 1 < n ? p[k + st] : 0.0;
                const double dl = (Fi - Fl) * invh;  // left link difference
                const double dr = (Fr - Fi) * invh;  // right link difference
                const double ml = 0.5 * (Fl * Fl + Fi * Fi);
                const double mr = 0.5 * (Fi * Fi + Fr * Fr);
                double gv = (w_kin + w_quasi * ml) * dl * invh - (w_kin + w_quasi * mr) * dr * invh;
                gv += 0.5 * w_quasi * (dl * dl + dr * dr) * Fi;
                o[k] += gv;
            }
        }
    }
}

}  // namespace

Pair grad_I(const Pair& p, const Params& prm, const PotentialModel& model) {
    const Grid& g = *p.u.g;
    Pair out(g);
    accumulate_link_grad(p.u, 1.0, 1.0, out.u);
    accumulate_link_grad(p.v, 1.0, 1.0, out.v);
    const double cw = 2.0 / prm.ab();
    if (model.is_constant()) {
        const double A0 = model.A0;
        for (std::size_t k = 0; k < g.total; ++k) {
            const double u = p.u.v[k], v = p.v.v[k];
            out.u.v[k] += A0 * u - cw * dpow_abs(u, prm.alpha) * pow_abs(v, prm.beta);
            out.v.v[k] += prm.B * v - cw * pow_abs(u, prm.alpha) * dpow_abs(v, prm.beta);
        }
    } else {
        int idx[8];
        double x[8];
        for (std::size_t k = 0; k < g.total; ++k) {
            g.unravel(k, idx);
            for (int a = 0; a < g.dims; ++a) x[a] = g.coord(static_cast<std::size_t>(idx[a]));
            const double u = p.u.v[k], v = p.v.v[k];
            out.u.v[k] += model.eval(x, g.dims) * u - cw * dpow_abs(u, prm.alpha) * pow_abs(v, prm.beta);
            out.v.v[k] += prm.B * v - cw * pow_abs(u, prm.alpha) * dpow_abs(v, prm.beta);
        }
    }
    return out;
}

Pair grad_G(const Pair& p, const Params& prm, const PotentialModel& model, bool paper_literal) {
    const Grid& g = *p.u.g;
    const double N = prm.N, ab = prm.ab();
    Pair out(g);
    accumulate_link_grad(p.u, N, N + 2.0, out.u);
    accumulate_link_grad(p.v, N, N + 2.0, out.v);
    const double cw = 2.0 * (N + ab) / ab;
    if (model.is_constant()) {
        const double A0 = model.A0;
        for (std::size_t k = 0; k < g.total; ++k) {
            const double u = p.u.v[k], v = p.v.v[k];
            out.u.v[k] += (N + 2.0) * A0 * u - cw * dpow_abs(u, prm.alpha) * pow_abs(v, prm.beta);
            out.v.v[k] += (N + 2.0) * prm.B * v - cw * pow_abs(u, prm.alpha) * dpow_abs(v, prm.beta);
        }
    } else {
        int idx[8];
        double x[8];
        for (std::size_t k = 0; k < g.total; ++k) {
            g.unravel(k, idx);
            for (int a = 0; a < g.dims; ++a) x[a] = g.coord(static_cast<std::size_t>(idx[a]));
            const double u = p.u.v[k], v = p.v.v[k];
            double au = (N + 2.0) * model.eval(x, g.dims);
            if (!paper_literal) au += model.radial_derivative(x, g.dims);
            out.u.v[k] += au * u - cw * dpow_abs(u, prm.alpha) * pow_abs(v, prm.beta);
            out.v.v[k] += (N + 2.0) * prm.B * v - cw * pow_abs(u, prm.alpha) * dpow_abs(v, prm.beta);
        }
    }
    return out;
}

}  // namespace qss

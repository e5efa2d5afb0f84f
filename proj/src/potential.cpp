#include "qss/potential.hpp"

#include <cmath>
#include <cstdio>

namespace qss {

PotentialModel PotentialModel::constant(double A0) {
    if (!(A0 > 0.0)) throw validation_error("A_0 must be positive");
    PotentialModel m;
    m.kind = Kind::constant;
    m.A0 = A0;
    m.Ainf = A0;
    return m;
}

PotentialModel PotentialModel::builtin(const std::string& name, double A0, double Ainf) {
    PotentialModel m;
    m.kind = Kind::builtin;
    m.name = name;
    m.A0 = A0;
    m.Ainf = Ainf;
    if (name == "well") {
        if (!(A0 > 0.0)) throw validation_error("A_0 must be positive");
        if (!(Ainf >= A0) || !std::isfinite(Ainf))
            throw validation_error("Ainf must satisfy A_0 <= Ainf < infinity");
    } else if (name == "harmonic") {
        if (!(A0 > 0.0)) throw validation_error("A_0 must be positive");
        m.Ainf = std::numeric_limits<double>::infinity();
    } else {
        throw validation_error("unknown builtin potential: " + name);
    }
    return m;
}

PotentialModel PotentialModel::tabulated(const Grid& g, std::vector<double> values,
                                         std::vector<std::vector<double>> gradients, double A0,
                                         double Ainf) {
    if (!(A0 > 0.0)) throw validation_error("A_0 must be positive");
    if (values.size() != g.total) throw validation_error("potential table size mismatch");
    PotentialModel m;
    m.kind = Kind::tabulated;
    m.A0 = A0;
    m.Ainf = Ainf;
    m.grid = &g;
    m.table = std::make_shared<const std::vector<double>>(std::move(values));
    if (!gradients.empty()) {
        if (gradients.size() != static_cast<std::size_t>(g.dims))
            throw validation_error("potential gradient tables must number N");
        for (std::size_t a = 0; a < gradients.size(); ++a) {
            if (gradients[a].size() != g.total)
                throw validation_error("potential table size mismatch");
            m.grad_tables[a] = std::make_shared<const std::vector<double>>(std::move(gradients[a]));
        }
        m.has_grad_tables = true;
    }
    return m;
}

void PotentialModel::validate() const {
    if (!(A0 > 0.0)) throw validation_error("A_0 must be positive");
}

namespace {

double r2_of(const double* x, int N) {
    double r2 = 0.0;
    for (int a = 0; a < N; ++a) r2 += x[a] * x[a];
    return r2;
}

double interp_table(const Grid& g, const std::vector<double>& tab, const double* x, int N,
                    double outside) {
    const int n = g.points_per_axis;
    int i0[8];
    double frac[8];
    for (int a = 0; a < N; ++a) {
        const double p = (x[a] + g.half_extent) / g.spacing;
        if (p < 0.0 || p > static_cast<double>(n - 1)) return outside;
        const double fl = std::floor(p);
        i0[a] = static_cast<int>(fl);
        frac[a] = p - fl;
    }
    double val = 0.0;
    const unsigned corners = 1u << N;
    for (unsigned c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t off = 0;
        bool ok = true;
        for (int a = 0; a < N; ++a) {
            const int bit = (c >> a) & 1u;
            const int idx = i0[a] + bit;
            w *= bit ? frac[a] : 1.0 - frac[a];
            if (idx >= n) {
                ok = false;
                break;
            }
            off += static_cast<std::size_t>(idx) * g.stride[static_cast<std::size_t>(a)];
        }
        if (ok && w != 0.0) val += w * tab[off];
    }
    return val;
}

// central difference of the table along one axis at a node, zero-gradient
// (clamped) at the faces
double table_diff(const Grid& g, const std::vector<double>& tab, const int* idx, int axis) {
    const int n = g.points_per_axis;
    std::size_t off = 0;
    for (int a = 0; a < g.dims; ++a)
        off += static_cast<std::size_t>(idx[a]) * g.stride[static_cast<std::size_t>(a)];
    const std::size_t st = g.stride[static_cast<std::size_t>(axis)];
    const int i = idx[axis];
    if (i == 0) return (tab[off + st] - tab[off]) / g.spacing;
    if (i == n - 1) return (tab[off] - tab[off - st]) / g.spacing;
    return (tab[off + st] - tab[off - st]) / (2.0 * g.spacing);
}

}  // namespace

double PotentialModel::eval(const double* x, int N) const {
    switch (kind) {
        case Kind::constant:
            return A0;
        case Kind::builtin: {
            const double r2 = r2_of(x, N);
            if (name == "well") return Ainf - (Ainf - A0) / (1.0 + r2);
            return A0 + r2;  // harmonic
        }
        case Kind::tabulated:
            return interp_table(*grid, *table, x, N, Ainf);
    }
    return A0;
}

double PotentialModel::radial_derivative(const double* x, int N) const {
    switch (kind) {
        case Kind::constant:
            return 0.0;
        case Kind::builtin: {
            const double r2 = r2_of(x, N);
            if (name == "well") {
                const double d = 1.0 + r2;
                return 2.0 * (Ainf - A0) * r2 / (d * d);
            }
            return 2.0 * r2;  // harmonic
        }
        case Kind::tabulated: {
            if (has_grad_tables) {
                double s = 0.0;
                for (int a = 0; a < N; ++a)
                    s += x[a] * interp_table(*grid, *grad_tables[static_cast<std::size_t>(a)], x, N, 0.0);
                return s;
            }
            // tables lack analytic gradients: central differences at the
            // nearest node (adequate for the sampled condition checks)
            int idx[8];
            for (int a = 0; a < N; ++a) {
                const double p = (x[a] + grid->half_extent) / grid->spacing;
                int i = static_cast<int>(std::lround(p));
                if (i < 0) i = 0;
                if (i >= grid->points_per_axis) i = grid->points_per_axis - 1;
                idx[a] = i;
            }
            double s = 0.0;
            for (int a = 0; a < N; ++a) s += x[a] * table_diff(*grid, *table, idx, a);
            return s;
        }
    }
    return 0.0;
}

double PotentialModel::sup_radial() const {
    switch (kind) {
        case Kind::constant:
            return 0.0;
        case Kind::builtin:
            if (name == "well") return 0.5 * (Ainf - A0);  // max of 2c r^2/(1+r^2)^2 at r=1
            return std::numeric_limits<double>::infinity();  // harmonic
        case Kind::tabulated:
            return std::numeric_limits<double>::quiet_NaN();  // unknown; sampled bound only
    }
    return 0.0;
}

ConditionReport check_conditions(const PotentialModel& model, const Params& p, const Grid& g) {
    ConditionReport rep;
    for (int k = 0; k < 4; ++k) rep.entries[static_cast<std::size_t>(k)].id = "A" + std::to_string(k + 1);

    const int N = g.dims;
    // deterministic sample sub-lattice: every k-th node per axis, at most 9
    // samples per axis
    const int n = g.points_per_axis;
    const int step = std::max(1, (n - 1) / 8);
    std::vector<double> axis_vals;
    for (int i = 0; i < n; i += step) axis_vals.push_back(g.coord(static_cast<std::size_t>(i)));
    if (axis_vals.back() != g.coord(static_cast<std::size_t>(n - 1)))
        axis_vals.push_back(g.coord(static_cast<std::size_t>(n - 1)));
    const std::size_t per_axis = axis_vals.size();
    std::size_t nsamples = 1;
    for (int a = 0; a < N; ++a) nsamples *= per_axis;

    auto sample_point = [&](std::size_t k, double* x) {
        for (int a = N - 1; a >= 0; --a) {
            x[a] = axis_vals[k % per_axis];
            k /= per_axis;
        }
    };
    auto describe = [&](const double* x) {
        std::string s = "(";
        char buf[32];
        for (int a = 0; a < N; ++a) {
            std::snprintf(buf, sizeof buf, "%g", x[a]);
            s += buf;
            if (a + 1 < N) s += ", ";
        }
        return s + ")";
    };

    // A1: 0 < A0 <= A <= Ainf < inf
    {
        auto& e = rep.entries[0];
        e.pass = model.A0 > 0.0 && std::isfinite(model.Ainf);
        e.margin = std::numeric_limits<double>::infinity();
        if (!std::isfinite(model.Ainf)) {
            e.detail = "Ainf is not finite";
            e.margin = -std::numeric_limits<double>::infinity();
        }
        double x[8];
        for (std::size_t k = 0; k < nsamples && e.pass; ++k) {
            sample_point(k, x);
            const double A = model.eval(x, N);
            const double lower = A - model.A0;
            const double upper = model.Ainf - A;
            const double m = std::min(lower, upper);
            if (m < e.margin) e.margin = m;
            if (m < -1e-12 * std::max(1.0, std::fabs(model.Ainf))) {
                e.pass = false;
                e.detail = "bound violated at x = " + describe(x);
            }
        }
        if (e.pass && e.detail.empty()) e.detail = "worst bound margin over samples";
    }

    // A2: |nabla A . x| bounded and (ab-2) A - nabla A . x >= 0
    {
        auto& e = rep.entries[1];
        e.pass = true;
        const double sup = model.sup_radial();
        double max_rad = 0.0;
        double worst = std::numeric_limits<double>::infinity();
        double x[8];
        for (std::size_t k = 0; k < nsamples; ++k) {
            sample_point(k, x);
            const double rd = model.radial_derivative(x, N);
            max_rad = std::max(max_rad, std::fabs(rd));
            const double sign = (p.ab() - 2.0) * model.eval(x, N) - rd;
            if (sign < worst) worst = sign;
            if (sign < -1e-12 && e.pass) {
                e.pass = false;
                e.detail = "sign condition violated at x = " + describe(x);
            }
        }
        if (std::isinf(sup)) {
            e.pass = false;
            if (e.detail.empty()) e.detail = "radial derivative is unbounded";
        }
        e.margin = worst;
        if (e.pass && e.detail.empty()) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "max |nabla A . x| over samples = %.6g", max_rad);
            e.detail = buf;
        }
    }

    // A3: concavity of sigma -> sigma^((N+2)/(N+ab)) A(sigma^(1/(N+ab)) x)
    {
        auto& e = rep.entries[2];
        e.pass = true;
        const double expo = (N + 2.0) / (N + p.ab());
        const double iexp = 1.0 / (N + p.ab());
        double worst = -std::numeric_limits<double>::infinity();
        double x[8], xs[8];
        auto kval = [&](double sigma, const double* xx) {
            const double t = std::pow(sigma, iexp);
            for (int a = 0; a < N; ++a) xs[a] = t * xx[a];
            return std::pow(sigma, expo) * model.eval(xs, N);
        };
        // thinned spatial samples (the sigma sweep multiplies the cost)
        const std::size_t thin = std::max<std::size_t>(1, nsamples / 64);
        for (std::size_t k = 0; k < nsamples && e.pass; k += thin) {
            sample_point(k, x);
            for (int j = 0; j <= 24; ++j) {
                const double sigma = std::pow(10.0, -3.0 + 6.0 * j / 24.0);
                const double d = 1e-3 * sigma;
                const double v0 = kval(sigma, x);
                const double dd = kval(sigma - d, x) - 2.0 * v0 + kval(sigma + d, x);
                const double norm = dd / std::max(1.0, std::fabs(v0));
                if (norm > worst) worst = norm;
                if (norm > 1e-10) {
                    e.pass = false;
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "convexity at sigma = %.4g, x = ", sigma);
                    e.detail = buf + describe(x);
                    break;
                }
            }
        }
        e.margin = -worst;  // positive margin == concave
        if (e.pass) e.detail = "worst normalized second difference over samples";
    }

    // A4: rotation invariance in the (y1,y2) plane
    {
        auto& e = rep.entries[3];
        e.pass = true;
        double worst = 0.0;
        const double golden = 2.399963229728653;  // spreads test angles irrationally
        double x[8], xr[8];
        for (std::size_t k = 0; k < nsamples && e.pass; ++k) {
            sample_point(k, x);
            for (int j = 1; j <= 6; ++j) {
                const double phi = golden * j;
                const double c = std::cos(phi), sn = std::sin(phi);
                xr[0] = c * x[0] - sn * x[1];
                xr[1] = sn * x[0] + c * x[1];
                for (int a = 2; a < N; ++a) xr[a] = x[a];
                const double d = std::fabs(model.eval(xr, N) - model.eval(x, N));
                if (d > worst) worst = d;
                if (d > 1e-10) {
                    e.pass = false;
                    e.detail = "rotation variance at x = " + describe(x);
                    break;
                }
            }
        }
        e.margin = worst;
        if (e.pass) e.detail = "worst |A(R x) - A(x)| over samples";
    }

    return rep;
}

}  // namespace qss

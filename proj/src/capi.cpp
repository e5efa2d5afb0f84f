#include "qss.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <array>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qss/analysis.hpp"
#include "qss/solver.hpp"

using ordered_json = nlohmann::ordered_json;

struct qss_ctx {
    qss::Params prm;
    qss::Grid grid;
    qss::PotentialModel model;
    qss::DihedralGroup group;
    qss::SolverConfig cfg;
    std::vector<std::array<double, 2>> multistart;
    int workers = 1;
    ordered_json resolved;
};

struct qss_pair {
    qss::Pair p;
    const qss_ctx* owner;
    explicit qss_pair(const qss_ctx* c) : p(c->grid), owner(c) {}
};

namespace {

thread_local std::string g_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

qss_status fail(qss_status st, const std::string& msg) {
    g_error = msg;
    return st;
}

template <class F>
qss_status guard(F&& body) {
    try {
        g_error.clear();
        return body();
    } catch (const qss::validation_error& e) {
        return fail(QSS_ERR_VALIDATION, e.what());
    } catch (const qss::fibering_failure& e) {
        return fail(QSS_ERR_NONCONVERGED, e.what());
    } catch (const qss::io_error& e) {
        return fail(QSS_ERR_IO, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(QSS_ERR_VALIDATION, std::string("config error: ") + e.what());
    } catch (const std::exception& e) {
        return fail(QSS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(QSS_ERR_INTERNAL, "unknown error");
    }
}

// ---- config parsing -----------------------------------------------------

void reject_unknown(const ordered_json& o, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = o.begin(); it != o.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw qss::validation_error("unknown config key \"" + it.key() + "\" in " + where);
    }
}

const ordered_json& need(const ordered_json& o, const char* key, const std::string& where) {
    auto it = o.find(key);
    if (it == o.end())
        throw qss::validation_error("missing config key \"" + std::string(key) + "\" in " + where);
    return *it;
}

double as_num(const ordered_json& j, const std::string& what) {
    if (!j.is_number()) throw qss::validation_error(what + " must be a number");
    return j.get<double>();
}

int as_int(const ordered_json& j, const std::string& what) {
    if (!j.is_number_integer()) throw qss::validation_error(what + " must be an integer");
    return j.get<int>();
}

std::string as_str(const ordered_json& j, const std::string& what) {
    if (!j.is_string()) throw qss::validation_error(what + " must be a string");
    return j.get<std::string>();
}

bool as_bool(const ordered_json& j, const std::string& what) {
    if (!j.is_boolean()) throw qss::validation_error(what + " must be a boolean");
    return j.get<bool>();
}

std::unique_ptr<qss_ctx> build_ctx(const char* text) {
    ordered_json doc = ordered_json::parse(text);
    if (!doc.is_object()) throw qss::validation_error("config root must be a JSON object");
    reject_unknown(doc, {"params", "potential", "grid", "symmetry", "solver", "workers"},
                   "config root");

    auto c = std::make_unique<qss_ctx>();

    const ordered_json& jp = need(doc, "params", "config");
    reject_unknown(jp, {"N", "alpha", "beta", "B"}, "params");
    c->prm.N = as_int(need(jp, "N", "params"), "N");
    c->prm.alpha = as_num(need(jp, "alpha", "params"), "alpha");
    c->prm.beta = as_num(need(jp, "beta", "params"), "beta");
    c->prm.B = as_num(need(jp, "B", "params"), "B");
    c->prm.validate();

    const ordered_json& jg = need(doc, "grid", "config");
    reject_unknown(jg, {"L", "n"}, "grid");
    c->grid = qss::Grid::make(c->prm.N, as_int(need(jg, "n", "grid"), "n"),
                              as_num(need(jg, "L", "grid"), "L"));

    const ordered_json& jsym = need(doc, "symmetry", "config");
    reject_unknown(jsym, {"s"}, "symmetry");
    c->cfg.s = as_int(need(jsym, "s", "symmetry"), "s");

    const ordered_json& jpot = need(doc, "potential", "config");
    const std::string kind = as_str(need(jpot, "kind", "potential"), "potential.kind");
    ordered_json rpot;
    rpot["kind"] = kind;
    if (kind == "constant") {
        reject_unknown(jpot, {"kind", "A0"}, "potential");
        const double A0 = as_num(need(jpot, "A0", "potential"), "A0");
        c->model = qss::PotentialModel::constant(A0);
        rpot["A0"] = A0;
    } else if (kind == "builtin") {
        reject_unknown(jpot, {"kind", "name", "A0", "Ainf"}, "potential");
        const std::string name = as_str(need(jpot, "name", "potential"), "potential.name");
        const double A0 = as_num(need(jpot, "A0", "potential"), "A0");
        double Ainf = A0;
        if (jpot.contains("Ainf")) Ainf = as_num(jpot["Ainf"], "Ainf");
        c->model = qss::PotentialModel::builtin(name, A0, Ainf);
        rpot["name"] = name;
        rpot["A0"] = A0;
        if (std::isfinite(c->model.Ainf)) rpot["Ainf"] = c->model.Ainf;
    } else if (kind == "tabulated") {
        reject_unknown(jpot, {"kind", "path", "grad_paths", "A0", "Ainf"}, "potential");
        const std::string path = as_str(need(jpot, "path", "potential"), "potential.path");
        const double A0 = as_num(need(jpot, "A0", "potential"), "A0");
        const double Ainf = as_num(need(jpot, "Ainf", "potential"), "Ainf");
        qss::Field table = qss::load_field_resampled(c->grid, path);
        std::vector<std::vector<double>> grads;
        ordered_json rgp = ordered_json::array();
        if (jpot.contains("grad_paths")) {
            const ordered_json& gp = jpot["grad_paths"];
            if (!gp.is_array() || static_cast<int>(gp.size()) != c->prm.N)
                throw qss::validation_error("grad_paths must list one dump per axis");
            for (const auto& e : gp) {
                const std::string p = as_str(e, "grad_paths entry");
                grads.push_back(qss::load_field_resampled(c->grid, p).v);
                rgp.push_back(p);
            }
        }
        c->model =
            qss::PotentialModel::tabulated(c->grid, std::move(table.v), std::move(grads), A0, Ainf);
        rpot["path"] = path;
        rpot["A0"] = A0;
        rpot["Ainf"] = Ainf;
        if (!rgp.empty()) rpot["grad_paths"] = rgp;
    } else {
        throw qss::validation_error(
            "potential kind must be \"constant\", \"builtin\", or \"tabulated\"");
    }
    c->model.validate();

    if (doc.contains("solver")) {
        const ordered_json& js = doc["solver"];
        reject_unknown(js,
                       {"step0", "shrink", "tol_dx", "tol_grad", "max_iter", "coupling_floor",
                        "seed_widths", "precond", "paper_literal_G", "multistart"},
                       "solver");
        if (js.contains("step0")) c->cfg.step0 = as_num(js["step0"], "step0");
        if (js.contains("shrink")) c->cfg.shrink = as_num(js["shrink"], "shrink");
        if (js.contains("tol_dx")) c->cfg.tol_dx = as_num(js["tol_dx"], "tol_dx");
        if (js.contains("tol_grad")) c->cfg.tol_grad = as_num(js["tol_grad"], "tol_grad");
        if (js.contains("max_iter")) c->cfg.max_iter = as_int(js["max_iter"], "max_iter");
        if (js.contains("coupling_floor"))
            c->cfg.coupling_floor = as_num(js["coupling_floor"], "coupling_floor");
        if (js.contains("seed_widths")) {
            const ordered_json& sw = js["seed_widths"];
            reject_unknown(sw, {"u", "v"}, "solver.seed_widths");
            c->cfg.seed_width_u = as_num(need(sw, "u", "seed_widths"), "seed width u");
            c->cfg.seed_width_v = as_num(need(sw, "v", "seed_widths"), "seed width v");
        }
        if (js.contains("precond")) c->cfg.precond = as_str(js["precond"], "precond");
        if (js.contains("paper_literal_G"))
            c->cfg.paper_literal_G = as_bool(js["paper_literal_G"], "paper_literal_G");
        if (js.contains("multistart")) {
            const ordered_json& ms = js["multistart"];
            if (!ms.is_array()) throw qss::validation_error("multistart must be an array");
            for (const auto& e : ms) {
                if (!e.is_array() || e.size() != 2)
                    throw qss::validation_error("multistart entries must be [width_u, width_v]");
                const double wu = as_num(e[0], "multistart width");
                const double wv = as_num(e[1], "multistart width");
                if (!(wu > 0.0 && wv > 0.0))
                    throw qss::validation_error("seed widths must be positive");
                c->multistart.push_back({wu, wv});
            }
        }
    }
    c->cfg.validate();
    c->group = qss::build_group(c->cfg.s);

    if (doc.contains("workers")) {
        c->workers = as_int(doc["workers"], "workers");
        if (c->workers < 1) throw qss::validation_error("workers must be at least 1");
    }

    ordered_json r;
    ordered_json rp;
    rp["N"] = c->prm.N;
    rp["alpha"] = c->prm.alpha;
    rp["beta"] = c->prm.beta;
    rp["B"] = c->prm.B;
    r["params"] = rp;
    r["potential"] = rpot;
    ordered_json rg;
    rg["L"] = c->grid.half_extent;
    rg["n"] = c->grid.points_per_axis;
    r["grid"] = rg;
    ordered_json rs;
    rs["s"] = c->cfg.s;
    r["symmetry"] = rs;
    ordered_json rsol;
    rsol["step0"] = c->cfg.step0;
    rsol["shrink"] = c->cfg.shrink;
    rsol["tol_dx"] = c->cfg.tol_dx;
    rsol["tol_grad"] = c->cfg.tol_grad;
    rsol["max_iter"] = c->cfg.max_iter;
    rsol["coupling_floor"] = c->cfg.coupling_floor;
    ordered_json rw;
    rw["u"] = c->cfg.seed_width_u;
    rw["v"] = c->cfg.seed_width_v;
    rsol["seed_widths"] = rw;
    rsol["precond"] = c->cfg.precond;
    rsol["paper_literal_G"] = c->cfg.paper_literal_G;
    if (!c->multistart.empty()) {
        ordered_json ms = ordered_json::array();
        for (const auto& w : c->multistart) ms.push_back({w[0], w[1]});
        rsol["multistart"] = ms;
    }
    r["solver"] = rsol;
    r["workers"] = c->workers;
    c->resolved = std::move(r);
    return c;
}

qss::Field& component_of(qss_pair* p, int component) {
    if (component == 0) return p->p.u;
    if (component == 1) return p->p.v;
    throw qss::validation_error("component must be 0 (u) or 1 (v)");
}

const qss::Field& component_of(const qss_pair* p, int component) {
    return component_of(const_cast<qss_pair*>(p), component);
}

const char* component_name(int component) { return component == 0 ? "u" : "v"; }

void require(bool ok, const char* what) {
    if (!ok) throw qss::validation_error(what);
}

ordered_json nodal_json(const qss::NodalReport& r) {
    ordered_json j;
    j["component"] = r.component;
    j["threshold"] = r.threshold;
    j["positive_domains"] = r.positive_domains;
    j["negative_domains"] = r.negative_domains;
    j["total"] = r.total;
    return j;
}

double default_eps(const qss::Field& f) {
    const double m = qss::max_abs(f);
    if (!(m > 0.0)) throw qss::validation_error("field is identically zero");
    return 1e-3 * m;
}

}  // namespace

extern "C" {

const char* qss_version(void) { return "0.1.0"; }

const char* qss_last_error(void) { return g_error.c_str(); }

void qss_string_free(char* s) { std::free(s); }

qss_status qss_ctx_create(const char* config_json, qss_ctx** out) {
    return guard([&]() -> qss_status {
        require(config_json != nullptr, "config_json is null");
        require(out != nullptr, "out is null");
        *out = build_ctx(config_json).release();
        return QSS_OK;
    });
}

qss_status qss_ctx_describe(const qss_ctx* ctx, char** resolved_json) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(resolved_json != nullptr, "resolved_json is null");
        *resolved_json = dup_string(ctx->resolved.dump(2));
        return QSS_OK;
    });
}

void qss_ctx_destroy(qss_ctx* ctx) { delete ctx; }

qss_status qss_pair_create(const qss_ctx* ctx, qss_pair** out) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(out != nullptr, "out is null");
        *out = new qss_pair(ctx);
        return QSS_OK;
    });
}

qss_status qss_pair_clone(const qss_pair* src, qss_pair** out) {
    return guard([&]() -> qss_status {
        require(src != nullptr, "null pair handle");
        require(out != nullptr, "out is null");
        auto* h = new qss_pair(src->owner);
        h->p = src->p;
        *out = h;
        return QSS_OK;
    });
}

void qss_pair_destroy(qss_pair* p) { delete p; }

qss_status qss_pair_nodes(const qss_ctx* ctx, size_t* nodes_per_component) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(nodes_per_component != nullptr, "out is null");
        *nodes_per_component = ctx->grid.total;
        return QSS_OK;
    });
}

qss_status qss_pair_get(const qss_pair* p, int component, double* buf, size_t len) {
    return guard([&]() -> qss_status {
        require(p != nullptr, "null pair handle");
        require(buf != nullptr, "buffer is null");
        const qss::Field& f = component_of(p, component);
        require(len == f.v.size(), "buffer length does not match the grid");
        std::memcpy(buf, f.v.data(), len * sizeof(double));
        return QSS_OK;
    });
}

qss_status qss_pair_set(qss_pair* p, int component, const double* buf, size_t len) {
    return guard([&]() -> qss_status {
        require(p != nullptr, "null pair handle");
        require(buf != nullptr, "buffer is null");
        qss::Field& f = component_of(p, component);
        require(len == f.v.size(), "buffer length does not match the grid");
        std::memcpy(f.v.data(), buf, len * sizeof(double));
        return QSS_OK;
    });
}

qss_status qss_seed(const qss_ctx* ctx, qss_pair* p) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(p != nullptr, "null pair handle");
        p->p = qss::initial_seed(ctx->cfg, ctx->grid);
        return QSS_OK;
    });
}

qss_status qss_symmetrize(const qss_ctx* ctx, qss_pair* p) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(p != nullptr, "null pair handle");
        p->p.u = qss::symmetrize(p->p.u, ctx->group);
        p->p.v = qss::symmetrize(p->p.v, ctx->group);
        return QSS_OK;
    });
}

qss_status qss_project(const qss_ctx* ctx, qss_pair* p) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(p != nullptr, "null pair handle");
        p->p = qss::project_exact(p->p, ctx->prm, ctx->model, ctx->cfg.paper_literal_G);
        return QSS_OK;
    });
}

qss_status qss_breakdown_json(const qss_ctx* ctx, const qss_pair* p, char** json) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(p != nullptr, "null pair handle");
        require(json != nullptr, "json is null");
        const qss::EnergyBreakdown b = qss::breakdown(p->p, ctx->prm, ctx->model);
        ordered_json j;
        j["kinetic"] = b.kinetic;
        j["mass"] = b.mass;
        j["quasilinear"] = b.quasilinear;
        j["coupling"] = b.coupling;
        j["radial_term"] = b.radial_term;
        j["I"] = qss::energy_I(b, ctx->prm);
        j["G"] = qss::constraint_G(b, ctx->prm, ctx->cfg.paper_literal_G);
        j["constraint_scale"] = qss::constraint_scale(b, ctx->prm);
        j["P"] = qss::pohozaev_P(b, ctx->prm);
        j["pohozaev_residual"] = qss::pohozaev_residual(b, ctx->prm);
        j["J"] = qss::reduced_J(p->p, ctx->prm, ctx->model);
        *json = dup_string(j.dump(2));
        return QSS_OK;
    });
}

qss_status qss_solve(const qss_ctx* ctx, const qss_pair* warm, qss_pair** out_pair,
                     char** report_json, char** trace_csv) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        // the standing hypotheses gate every solve
        const qss::ConditionReport cond = qss::check_conditions(ctx->model, ctx->prm, ctx->grid);
        for (const auto& e : cond.entries)
            if (!e.pass)
                throw qss::validation_error("potential hypothesis (" + e.id +
                                            ") fails: " + e.detail);

        std::vector<std::array<double, 2>> widths;
        if (warm != nullptr || ctx->multistart.empty())
            widths.push_back({ctx->cfg.seed_width_u, ctx->cfg.seed_width_v});
        else
            widths = ctx->multistart;

        std::vector<qss::SolveReport> runs;
        runs.reserve(widths.size());
        for (const auto& w : widths) {
            qss::SolverConfig cfg = ctx->cfg;
            cfg.seed_width_u = w[0];
            cfg.seed_width_v = w[1];
            runs.push_back(
                qss::minimize(cfg, ctx->prm, ctx->model, ctx->grid, warm ? &warm->p : nullptr));
        }

        const qss::MultistartSummary ms = qss::estimate_m(runs);
        int best = ms.best_index;
        if (best < 0) {
            best = 0;
            for (std::size_t i = 1; i < runs.size(); ++i)
                if (runs[i].m_estimate < runs[static_cast<std::size_t>(best)].m_estimate)
                    best = static_cast<int>(i);
        }
        qss::SolveReport& rep = runs[static_cast<std::size_t>(best)];

        if (report_json) {
            ordered_json out;
            out["config"] = ctx->resolved;
            out["status"] = qss::to_string(rep.status);
            out["stop_reason"] = rep.stop_reason;
            out["m_estimate"] = rep.m_estimate;
            out["constraint_residual"] = rep.constraint_residual;
            out["constraint_scale"] = rep.constraint_scale;
            out["pohozaev_residual"] = rep.pohozaev_residual;
            out["grad_norm"] = rep.grad_norm;
            out["equivariance_defect"] = rep.equivariance_defect;
            out["nodal_count_u"] = rep.nodal_count_u;
            out["nodal_count_v"] = rep.nodal_count_v;
            out["iterations"] = rep.iterations;
            out["tol_dx_used"] = rep.tol_dx_used;
            if (widths.size() > 1) {
                ordered_json runs_j = ordered_json::array();
                for (std::size_t i = 0; i < runs.size(); ++i) {
                    ordered_json rj;
                    rj["seed_widths"] = {widths[i][0], widths[i][1]};
                    rj["status"] = qss::to_string(runs[i].status);
                    rj["m_estimate"] = runs[i].m_estimate;
                    rj["iterations"] = runs[i].iterations;
                    runs_j.push_back(rj);
                }
                ordered_json msj;
                msj["runs"] = runs_j;
                msj["m_estimate"] = ms.m_estimate;
                msj["spread_rel"] = ms.spread_rel;
                msj["best_index"] = ms.best_index;
                msj["converged_runs"] = ms.converged_runs;
                out["multistart"] = msj;
            }
            *report_json = dup_string(out.dump(2));
        }
        if (trace_csv) {
            std::string csv = "iter,I,G,gradnorm,dx\n";
            char line[192];
            for (const auto& t : rep.trace) {
                std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g\n", t.iter, t.I, t.G,
                              t.gradnorm, t.dx);
                csv += line;
            }
            *trace_csv = dup_string(csv);
        }
        if (out_pair) {
            auto* h = new qss_pair(ctx);
            h->p = std::move(rep.final_pair);
            *out_pair = h;
        }
        if (rep.status != qss::SolveStatus::converged)
            return fail(QSS_ERR_NONCONVERGED, rep.stop_reason);
        return QSS_OK;
    });
}

qss_status qss_fiber_scan(const qss_ctx* ctx, const qss_pair* p, double t_min, double t_max,
                          int samples, char** csv) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(p != nullptr, "null pair handle");
        require(csv != nullptr, "csv is null");
        require(t_min > 0.0, "t_min must be positive");
        require(t_max > t_min, "t_max must exceed t_min");
        require(samples >= 2, "samples must be at least 2");
        const qss::Fiber fib(p->p, ctx->prm, ctx->model, ctx->cfg.paper_literal_G);
        std::string out = "t,h,hprime,G\n";
        char line[160];
        const double ratio = t_max / t_min;
        for (int i = 0; i < samples; ++i) {
            const double t =
                t_min * std::pow(ratio, static_cast<double>(i) / static_cast<double>(samples - 1));
            const double h = fib.h(t);
            const double hp = fib.h_prime(t);
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", t, h, hp, t * hp);
            out += line;
        }
        *csv = dup_string(out);
        return QSS_OK;
    });
}

qss_status qss_check_potential(const qss_ctx* ctx, char** json) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(json != nullptr, "json is null");
        const qss::ConditionReport rep = qss::check_conditions(ctx->model, ctx->prm, ctx->grid);
        ordered_json j;
        ordered_json arr = ordered_json::array();
        for (const auto& e : rep.entries) {
            ordered_json ej;
            ej["id"] = e.id;
            ej["pass"] = e.pass;
            ej["margin"] = e.margin;
            ej["detail"] = e.detail;
            arr.push_back(ej);
        }
        j["conditions"] = arr;
        j["all_pass"] = rep.all_pass();
        *json = dup_string(j.dump(2));
        return QSS_OK;
    });
}

qss_status qss_gradcheck(const qss_ctx* ctx, unsigned seed, int trials, char** json) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(json != nullptr, "json is null");
        require(trials >= 1, "trials must be positive");
        const qss::Grid& g = ctx->grid;
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);

        // random smooth fields: sums of off-center Gaussian bumps
        auto bump_field = [&](int nbumps) {
            qss::Field f(g);
            std::vector<int> idx(static_cast<std::size_t>(g.dims));
            for (int b = 0; b < nbumps; ++b) {
                const double amp = (0.3 + 0.7 * uni(rng)) * (uni(rng) < 0.5 ? -1.0 : 1.0);
                const double w = 0.8 + 1.2 * uni(rng);
                std::vector<double> ctr(static_cast<std::size_t>(g.dims));
                for (auto& ci : ctr) ci = (uni(rng) - 0.5) * g.half_extent;
                for (std::size_t k = 0; k < g.total; ++k) {
                    g.unravel(k, idx.data());
                    double r2 = 0.0;
                    for (int a = 0; a < g.dims; ++a) {
                        const double d =
                            g.coord(static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])) -
                            ctr[static_cast<std::size_t>(a)];
                        r2 += d * d;
                    }
                    f.v[k] += amp * std::exp(-r2 / (w * w));
                }
            }
            return f;
        };

        double hN = 1.0;
        for (int a = 0; a < g.dims; ++a) hN *= g.spacing;
        const double delta = 1e-4;
        const bool lit = ctx->cfg.paper_literal_G;

        ordered_json rows = ordered_json::array();
        double max_rel = 0.0;
        qss::Pair shifted(g);
        for (int t = 0; t < trials; ++t) {
            qss::Pair p(g);
            p.u = bump_field(2);
            p.v = bump_field(2);
            qss::Pair dir(g);
            dir.u = bump_field(1);
            dir.v = bump_field(1);

            auto eval_shift = [&](double sgn, bool constraint) {
                for (std::size_t k = 0; k < g.total; ++k) {
                    shifted.u.v[k] = p.u.v[k] + sgn * delta * dir.u.v[k];
                    shifted.v.v[k] = p.v.v[k] + sgn * delta * dir.v.v[k];
                }
                return constraint ? qss::constraint_G(shifted, ctx->prm, ctx->model, lit)
                                  : qss::energy_I(shifted, ctx->prm, ctx->model);
            };

            for (int which = 0; which < 2; ++which) {
                const bool constraint = which == 1;
                const double fd =
                    (eval_shift(1.0, constraint) - eval_shift(-1.0, constraint)) / (2.0 * delta);
                const qss::Pair gr = constraint ? qss::grad_G(p, ctx->prm, ctx->model, lit)
                                                : qss::grad_I(p, ctx->prm, ctx->model);
                double an = 0.0;
                for (std::size_t k = 0; k < g.total; ++k)
                    an += gr.u.v[k] * dir.u.v[k] + gr.v.v[k] * dir.v.v[k];
                an *= hN;
                const double rel =
                    std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-30});
                max_rel = std::max(max_rel, rel);
                ordered_json rj;
                rj["trial"] = t;
                rj["functional"] = constraint ? "G" : "I";
                rj["fd"] = fd;
                rj["analytic"] = an;
                rj["rel_err"] = rel;
                rows.push_back(rj);
            }
        }
        ordered_json j;
        j["seed"] = seed;
        j["trials"] = trials;
        j["delta"] = delta;
        j["rows"] = rows;
        j["max_rel_err"] = max_rel;
        *json = dup_string(j.dump(2));
        return QSS_OK;
    });
}

qss_status qss_nodal(const qss_ctx* ctx, const qss_pair* p, int component, double eps,
                     char** json) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(p != nullptr, "null pair handle");
        require(json != nullptr, "json is null");
        const qss::Field& f = component_of(p, component);
        const double e = eps > 0.0 ? eps : default_eps(f);
        const qss::NodalReport rep = qss::nodal_domains(f, e, component_name(component));
        *json = dup_string(nodal_json(rep).dump(2));
        return QSS_OK;
    });
}

qss_status qss_diagnose(const qss_ctx* ctx, const char* report_json, const qss_pair* p,
                        char** json) {
    return guard([&]() -> qss_status {
        require(ctx != nullptr, "null context handle");
        require(report_json != nullptr, "report_json is null");
        require(p != nullptr, "null pair handle");
        require(json != nullptr, "json is null");
        const ordered_json r = ordered_json::parse(report_json);

        qss::SolveReport rep;
        const std::string st = r.at("status").get<std::string>();
        if (st == "CONVERGED")
            rep.status = qss::SolveStatus::converged;
        else if (st == "NON-CONVERGED")
            rep.status = qss::SolveStatus::non_converged;
        else if (st == "COUPLING-COLLAPSE")
            rep.status = qss::SolveStatus::coupling_collapse;
        else if (st == "FIBERING-FAILURE")
            rep.status = qss::SolveStatus::fibering_failure;
        else
            throw qss::validation_error("unrecognized report status \"" + st + "\"");
        rep.m_estimate = r.at("m_estimate").get<double>();
        rep.constraint_residual = r.at("constraint_residual").get<double>();
        rep.pohozaev_residual = r.at("pohozaev_residual").get<double>();
        rep.equivariance_defect = r.at("equivariance_defect").get<double>();
        rep.nodal_count_u = r.at("nodal_count_u").get<int>();
        rep.nodal_count_v = r.at("nodal_count_v").get<int>();
        rep.final_pair = p->p;

        const qss::DiagnoseSummary sum =
            qss::diagnose(rep, ctx->prm, ctx->model, ctx->group, ctx->cfg.paper_literal_G);
        ordered_json j;
        ordered_json arr = ordered_json::array();
        for (const auto& ch : sum.checks) {
            ordered_json cj;
            cj["name"] = ch.name;
            cj["pass"] = ch.pass;
            cj["value"] = ch.value;
            cj["reference"] = ch.reference;
            cj["note"] = ch.note;
            arr.push_back(cj);
        }
        j["checks"] = arr;
        j["all_pass"] = sum.all_pass;
        *json = dup_string(j.dump(2));
        return QSS_OK;
    });
}

qss_status qss_field_save_text(const qss_pair* p, int component, const char* path) {
    return guard([&]() -> qss_status {
        require(p != nullptr, "null pair handle");
        require(path != nullptr, "path is null");
        qss::save_field_text(component_of(p, component), component_name(component), path);
        return QSS_OK;
    });
}

qss_status qss_field_save_raw(const qss_pair* p, int component, const char* path) {
    return guard([&]() -> qss_status {
        require(p != nullptr, "null pair handle");
        require(path != nullptr, "path is null");
        qss::save_field_raw(component_of(p, component), component_name(component), path);
        return QSS_OK;
    });
}

qss_status qss_field_load(qss_pair* p, int component, const char* path) {
    return guard([&]() -> qss_status {
        require(p != nullptr, "null pair handle");
        require(path != nullptr, "path is null");
        qss::Field& f = component_of(p, component);
        f = qss::load_field_resampled(*f.g, path);
        return QSS_OK;
    });
}

qss_status qss_pgm_slice(const qss_pair* p, int component, double eps, const char* path) {
    return guard([&]() -> qss_status {
        require(p != nullptr, "null pair handle");
        require(path != nullptr, "path is null");
        const qss::Field& f = component_of(p, component);
        qss::write_pgm_slice(f, eps > 0.0 ? eps : default_eps(f), path);
        return QSS_OK;
    });
}

}  // extern "C"

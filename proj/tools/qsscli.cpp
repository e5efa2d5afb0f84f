// Command-line front end.  Everything numerical happens behind the C API in
// qss.h; this file only parses arguments, shuttles JSON/CSV strings, and
// writes artifacts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qss.h"

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Options {
    std::string config;
    std::string out;
    std::string in_dir;
    std::string warm_dir;
    std::string field;
    std::string component = "u";
    bool paper_literal = false;
    int workers = 0;  // 0: leave the config value alone
    double eps = 0.0;
    double t_min = 0.25;
    double t_max = 4.0;
    int samples = 33;
    int trials = 20;
    unsigned seed = 12345;
};

int io_fail(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return QSS_ERR_IO;
}

int api_fail(qss_status st) {
    std::fprintf(stderr, "error: %s\n", qss_last_error());
    return static_cast<int>(st);
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return !in.bad();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    out.flush();
    return out.good();
}

// owned C-string that frees itself
struct apistr {
    char* s = nullptr;
    ~apistr() { qss_string_free(s); }
    std::string str() const { return s ? s : ""; }
};

struct ctx_handle {
    qss_ctx* c = nullptr;
    ~ctx_handle() { qss_ctx_destroy(c); }
};

struct pair_handle {
    qss_pair* p = nullptr;
    ~pair_handle() { qss_pair_destroy(p); }
};

// Load the config file and apply the command-line overrides that are part
// of the config schema.
int make_ctx(const Options& opt, ctx_handle& ctx) {
    std::string text;
    if (!read_file(opt.config, text)) return io_fail("cannot read config file: " + opt.config);
    if (opt.paper_literal || opt.workers > 0) {
        ordered_json doc;
        try {
            doc = ordered_json::parse(text);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: config error: %s\n", e.what());
            return QSS_ERR_VALIDATION;
        }
        if (opt.paper_literal) doc["solver"]["paper_literal_G"] = true;
        if (opt.workers > 0) doc["workers"] = opt.workers;
        text = doc.dump(2);
    }
    const qss_status st = qss_ctx_create(text.c_str(), &ctx.c);
    if (st != QSS_OK) return api_fail(st);
    return QSS_OK;
}

int ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) return io_fail("cannot create output directory " + dir + ": " + ec.message());
    return QSS_OK;
}

int load_pair_dumps(const ctx_handle& ctx, const std::string& dir, pair_handle& pair) {
    qss_status st = qss_pair_create(ctx.c, &pair.p);
    if (st != QSS_OK) return api_fail(st);
    st = qss_field_load(pair.p, 0, (fs::path(dir) / "u.qss").string().c_str());
    if (st != QSS_OK) return api_fail(st);
    st = qss_field_load(pair.p, 1, (fs::path(dir) / "v.qss").string().c_str());
    if (st != QSS_OK) return api_fail(st);
    return QSS_OK;
}

int component_index(const std::string& name) {
    if (name == "u") return 0;
    if (name == "v") return 1;
    return -1;
}

int emit(const std::string& text, const std::string& out_dir, const std::string& filename) {
    std::fputs(text.c_str(), stdout);
    if (!text.empty() && text.back() != '\n') std::fputc('\n', stdout);
    if (!out_dir.empty()) {
        int rc = ensure_out_dir(out_dir);
        if (rc != QSS_OK) return rc;
        const std::string path = (fs::path(out_dir) / filename).string();
        if (!write_file(path, text)) return io_fail("cannot write " + path);
    }
    return QSS_OK;
}

int cmd_solve(const Options& opt) {
    ctx_handle ctx;
    int rc = make_ctx(opt, ctx);
    if (rc != QSS_OK) return rc;

    pair_handle warm;
    if (!opt.warm_dir.empty()) {
        rc = load_pair_dumps(ctx, opt.warm_dir, warm);
        if (rc != QSS_OK) return rc;
    }

    const std::string out_dir = opt.out.empty() ? "out" : opt.out;
    rc = ensure_out_dir(out_dir);
    if (rc != QSS_OK) return rc;

    pair_handle sol;
    apistr report, trace;
    const qss_status st = qss_solve(ctx.c, warm.p, &sol.p, &report.s, &trace.s);
    if (st != QSS_OK && report.s == nullptr) return api_fail(st);
    if (st != QSS_OK) std::fprintf(stderr, "solver: %s\n", qss_last_error());

    const fs::path base(out_dir);
    if (!write_file((base / "report.json").string(), report.str()))
        return io_fail("cannot write report.json");
    if (!write_file((base / "trace.csv").string(), trace.str()))
        return io_fail("cannot write trace.csv");
    if (sol.p) {
        struct {
            int comp;
            const char* text;
            const char* raw;
            const char* pgm;
        } files[2] = {{0, "u.qss", "u.raw", "u.pgm"}, {1, "v.qss", "v.raw", "v.pgm"}};
        for (const auto& f : files) {
            qss_status w = qss_field_save_text(sol.p, f.comp, (base / f.text).string().c_str());
            if (w != QSS_OK) return api_fail(w);
            w = qss_field_save_raw(sol.p, f.comp, (base / f.raw).string().c_str());
            if (w != QSS_OK) return api_fail(w);
            w = qss_pgm_slice(sol.p, f.comp, 0.0, (base / f.pgm).string().c_str());
            if (w != QSS_OK) return api_fail(w);
        }
    }
    std::fputs(report.str().c_str(), stdout);
    std::fputc('\n', stdout);
    return static_cast<int>(st);
}

int cmd_fiber_scan(const Options& opt) {
    ctx_handle ctx;
    int rc = make_ctx(opt, ctx);
    if (rc != QSS_OK) return rc;

    pair_handle pair;
    if (!opt.in_dir.empty()) {
        rc = load_pair_dumps(ctx, opt.in_dir, pair);
        if (rc != QSS_OK) return rc;
    } else {
        qss_status st = qss_pair_create(ctx.c, &pair.p);
        if (st != QSS_OK) return api_fail(st);
        st = qss_seed(ctx.c, pair.p);
        if (st != QSS_OK) return api_fail(st);
        st = qss_symmetrize(ctx.c, pair.p);
        if (st != QSS_OK) return api_fail(st);
    }
    apistr csv;
    const qss_status st =
        qss_fiber_scan(ctx.c, pair.p, opt.t_min, opt.t_max, opt.samples, &csv.s);
    if (st != QSS_OK) return api_fail(st);
    return emit(csv.str(), opt.out, "fiber_scan.csv");
}

int cmd_check_potential(const Options& opt) {
    ctx_handle ctx;
    int rc = make_ctx(opt, ctx);
    if (rc != QSS_OK) return rc;
    apistr json;
    const qss_status st = qss_check_potential(ctx.c, &json.s);
    if (st != QSS_OK) return api_fail(st);
    rc = emit(json.str(), opt.out, "check_potential.json");
    if (rc != QSS_OK) return rc;
    const ordered_json j = ordered_json::parse(json.str());
    if (!j.at("all_pass").get<bool>()) {
        for (const auto& e : j.at("conditions"))
            if (!e.at("pass").get<bool>()) {
                std::fprintf(stderr, "error: potential hypothesis (%s) fails: %s\n",
                             e.at("id").get<std::string>().c_str(),
                             e.at("detail").get<std::string>().c_str());
                break;
            }
        return QSS_ERR_VALIDATION;
    }
    return QSS_OK;
}

int cmd_nodal_count(const Options& opt) {
    ctx_handle ctx;
    int rc = make_ctx(opt, ctx);
    if (rc != QSS_OK) return rc;
    const int comp = component_index(opt.component);
    if (comp < 0) {
        std::fprintf(stderr, "error: component must be \"u\" or \"v\"\n");
        return QSS_ERR_VALIDATION;
    }
    pair_handle pair;
    qss_status st = qss_pair_create(ctx.c, &pair.p);
    if (st != QSS_OK) return api_fail(st);
    st = qss_field_load(pair.p, comp, opt.field.c_str());
    if (st != QSS_OK) return api_fail(st);
    apistr json;
    st = qss_nodal(ctx.c, pair.p, comp, opt.eps, &json.s);
    if (st != QSS_OK) return api_fail(st);
    return emit(json.str(), opt.out, "nodal.json");
}

int cmd_gradcheck(const Options& opt) {
    ctx_handle ctx;
    int rc = make_ctx(opt, ctx);
    if (rc != QSS_OK) return rc;
    apistr json;
    const qss_status st = qss_gradcheck(ctx.c, opt.seed, opt.trials, &json.s);
    if (st != QSS_OK) return api_fail(st);
    return emit(json.str(), opt.out, "gradcheck.json");
}

int cmd_diagnose(const Options& opt) {
    ctx_handle ctx;
    int rc = make_ctx(opt, ctx);
    if (rc != QSS_OK) return rc;
    std::string report_text;
    const std::string report_path = (fs::path(opt.in_dir) / "report.json").string();
    if (!read_file(report_path, report_text)) return io_fail("cannot read " + report_path);
    pair_handle pair;
    rc = load_pair_dumps(ctx, opt.in_dir, pair);
    if (rc != QSS_OK) return rc;
    apistr json;
    const qss_status st = qss_diagnose(ctx.c, report_text.c_str(), pair.p, &json.s);
    if (st != QSS_OK) return api_fail(st);
    rc = emit(json.str(), opt.out, "diagnose.json");
    if (rc != QSS_OK) return rc;
    const ordered_json j = ordered_json::parse(json.str());
    if (!j.at("all_pass").get<bool>()) {
        std::fprintf(stderr, "error: diagnose found mismatches; see the checks table\n");
        return QSS_ERR_VALIDATION;
    }
    return QSS_OK;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sign-changing solution pairs of a coupled quasilinear Schrodinger system\n"
                 "by constrained energy minimization over a dihedral-equivariant subspace"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON run configuration")->required();
        sub->add_option("--out", opt.out, "output directory for artifacts");
        sub->add_flag("--paper-literal-G", opt.paper_literal,
                      "drop the radial potential term from the constraint");
        sub->add_option("--workers", opt.workers,
                        "multistart fan-out hint (runs execute sequentially)");
    };

    CLI::App* solve = app.add_subcommand(
        "solve", "minimize the energy over the constraint manifold; writes report.json, "
                 "trace.csv, field dumps, and sign-pattern slices");
    add_common(solve);
    solve->add_option("--warm", opt.warm_dir, "directory with u.qss/v.qss to start from");

    CLI::App* fiber = app.add_subcommand("fiber-scan",
                                         "tabulate the fibering map t -> h(t) along the scaling "
                                         "ray of the (symmetrized) seed or a dumped pair");
    add_common(fiber);
    fiber->add_option("--in", opt.in_dir, "directory with u.qss/v.qss to scan");
    fiber->add_option("--t-min", opt.t_min, "lower end of the scan range");
    fiber->add_option("--t-max", opt.t_max, "upper end of the scan range");
    fiber->add_option("--samples", opt.samples, "number of log-spaced samples");

    CLI::App* checkpot =
        app.add_subcommand("check-potential", "verify the standing hypotheses (A1)-(A4) on A(x)");
    add_common(checkpot);

    CLI::App* nodal = app.add_subcommand("nodal-count",
                                         "count sign domains of a dumped field by flood fill");
    add_common(nodal);
    nodal->add_option("--field", opt.field, "field dump to analyze")->required();
    nodal->add_option("--component", opt.component, "slot to load the dump into: u or v");
    nodal->add_option("--eps", opt.eps, "sign threshold (default 1e-3 * max|f|)");

    CLI::App* gradcheck = app.add_subcommand(
        "gradcheck", "finite-difference audit of the energy and constraint gradients");
    add_common(gradcheck);
    gradcheck->add_option("--trials", opt.trials, "number of random pairs");
    gradcheck->add_option("--seed", opt.seed, "RNG seed for the random pairs");

    CLI::App* diagnose = app.add_subcommand(
        "diagnose", "re-verify a solve report against its dumped fields");
    add_common(diagnose);
    diagnose->add_option("--in", opt.in_dir, "directory with report.json and field dumps")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return QSS_ERR_VALIDATION;
    }

    if (solve->parsed()) return cmd_solve(opt);
    if (fiber->parsed()) return cmd_fiber_scan(opt);
    if (checkpot->parsed()) return cmd_check_potential(opt);
    if (nodal->parsed()) return cmd_nodal_count(opt);
    if (gradcheck->parsed()) return cmd_gradcheck(opt);
    if (diagnose->parsed()) return cmd_diagnose(opt);
    return QSS_ERR_VALIDATION;
}

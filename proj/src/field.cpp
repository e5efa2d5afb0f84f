#include "qss/field.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qss {

double integrate(const Grid& g, const std::vector<double>& values) {
    double s = 0.0;
    for (double x : values) s += x;
    double hN = 1.0;
    for (int a = 0; a < g.dims; ++a) hN *= g.spacing;
    return hN * s;
}

void grad_axis(const Field& f, int axis, Field& out) {
    const Grid& g = *f.g;
    const int n = g.points_per_axis;
    const std::size_t st = g.stride[static_cast<std::size_t>(axis)];
    const double inv2h = 1.0 / (2.0 * g.spacing);
    const std::size_t nlines = g.lines(axis);
    for (std::size_t line = 0; line < nlines; ++line) {
        const std::size_t base = g.line_base(axis, line);
        const double* src = f.v.data() + base;
        double* dst = out.v.data() + base;
        // ghost value 0 outside either end
        dst[0] = src[st] * inv2h;
        for (int i = 1; i < n - 1; ++i) {
            const std::size_t k = static_cast<std::size_t>(i) * st;
            dst[k] = (src[k + st] - src[k - st]) * inv2h;
        }
        dst[static_cast<std::size_t>(n - 1) * st] =
            -src[static_cast<std::size_t>(n - 2) * st] * inv2h;
    }
}

std::vector<Field> grad(const Field& f) {
    std::vector<Field> out;
    out.reserve(static_cast<std::size_t>(f.g->dims));
    for (int a = 0; a < f.g->dims; ++a) {
        out.emplace_back(*f.g);
        grad_axis(f, a, out.back());
    }
    return out;
}

namespace {

// multilinear interpolation of `src` at fractional index coordinates
double interp_at(const Grid& g, const std::vector<double>& src, const double* pos) {
    const int N = g.dims;
    const int n = g.points_per_axis;
    int i0[8];
    double frac[8];
    for (int a = 0; a < N; ++a) {
        const double fl = std::floor(pos[a]);
        i0[a] = static_cast<int>(fl);
        frac[a] = pos[a] - fl;
    }
    double val = 0.0;
    const unsigned corners = 1u << N;
    for (unsigned c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t off = 0;
        bool inside = true;
        for (int a = 0; a < N; ++a) {
            const int bit = (c >> a) & 1u;
            const int idx = i0[a] + bit;
            w *= bit ? frac[a] : 1.0 - frac[a];
            if (idx < 0 || idx >= n) {
                inside = false;
                break;
            }
            off += static_cast<std::size_t>(idx) * g.stride[static_cast<std::size_t>(a)];
        }
        if (inside && w != 0.0) val += w * src[off];
    }
    return val;
}

}  // namespace

Field scale_field(const Field& f, double t) {
    if (!(t > 0.0)) throw validation_error("scale factor t must be positive");
    if (t == 1.0) return f;
    const Grid& g = *f.g;
    const int N = g.dims;
    Field out(g);
    int idx[8];
    double pos[8];
    const double invt = 1.0 / t;
    for (std::size_t k = 0; k < g.total; ++k) {
        g.unravel(k, idx);
        for (int a = 0; a < N; ++a) {
            const double x = g.coord(static_cast<std::size_t>(idx[a])) * invt;
            pos[a] = (x + g.half_extent) / g.spacing;
        }
        out.v[k] = t * interp_at(g, f.v, pos);
    }
    return out;
}

Field resample(const Grid& target, const Field& src) {
    const Grid& gs = *src.g;
    if (target.dims != gs.dims || target.half_extent != gs.half_extent)
        throw validation_error("resample requires matching N and L");
    if (target.points_per_axis == gs.points_per_axis) {
        Field out(target);
        out.v = src.v;
        return out;
    }
    Field out(target);
    int idx[8];
    double pos[8];
    for (std::size_t k = 0; k < target.total; ++k) {
        target.unravel(k, idx);
        for (int a = 0; a < target.dims; ++a) {
            const double x = target.coord(static_cast<std::size_t>(idx[a]));
            pos[a] = (x + gs.half_extent) / gs.spacing;
        }
        out.v[k] = interp_at(gs, src.v, pos);
    }
    return out;
}

double distance_H(const Field& f, const Field& g) {
    const Grid& gr = *f.g;
    Field diff(gr), work(gr);
    for (std::size_t i = 0; i < gr.total; ++i) diff.v[i] = f.v[i] - g.v[i];
    double l2 = 0.0;
    for (double d : diff.v) l2 += d * d;
    double gradsq = 0.0;
    for (int a = 0; a < gr.dims; ++a) {
        grad_axis(diff, a, work);
        for (double d : work.v) gradsq += d * d;
    }
    double hN = 1.0;
    for (int a = 0; a < gr.dims; ++a) hN *= gr.spacing;
    const double h1 = std::sqrt(hN * (l2 + gradsq));

    for (std::size_t i = 0; i < gr.total; ++i) diff.v[i] = f.v[i] * f.v[i] - g.v[i] * g.v[i];
    double sqgrad = 0.0;
    for (int a = 0; a < gr.dims; ++a) {
        grad_axis(diff, a, work);
        for (double d : work.v) sqgrad += d * d;
    }
    return h1 + std::sqrt(hN * sqgrad);
}

double distance_X(const Pair& p, const Pair& q) {
    return distance_H(p.u, q.u) + distance_H(p.v, q.v);
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::fabs(x));
    return m;
}

// --- dumps ---------------------------------------------------------------

namespace {

std::string header_line(const Grid& g, const std::string& component) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "QSSFIELD v1 %d %d %.17g %s", g.dims, g.points_per_axis,
                  g.half_extent, component.c_str());
    return buf;
}

struct Header {
    int N = 0, n = 0;
    double L = 0.0;
    std::string component;
};

Header parse_header(const std::string& line, const std::string& path) {
    std::istringstream is(line);
    std::string magic, ver;
    Header h;
    if (!(is >> magic >> ver >> h.N >> h.n >> h.L >> h.component) || magic != "QSSFIELD" ||
        ver != "v1")
        throw io_error("not a QSSFIELD v1 dump: " + path);
    return h;
}

void check_header(const Header& h, const Grid& g, const std::string& path) {
    if (h.N != g.dims || h.n != g.points_per_axis ||
        std::fabs(h.L - g.half_extent) > 1e-12 * std::max(1.0, std::fabs(g.half_extent)))
        throw io_error("dump geometry does not match the grid: " + path);
}

}  // namespace

void save_field_text(const Field& f, const std::string& component, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw io_error("cannot open for writing: " + path);
    std::fprintf(fp, "%s\n", header_line(*f.g, component).c_str());
    for (double x : f.v) std::fprintf(fp, "%.17g\n", x);
    if (std::fclose(fp) != 0) throw io_error("write failed: " + path);
}

Field load_field_text(const Grid& g, const std::string& path, std::string* component) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line)) throw io_error("empty dump: " + path);
    const Header h = parse_header(line, path);
    check_header(h, g, path);
    if (component) *component = h.component;
    Field f(g);
    for (std::size_t i = 0; i < g.total; ++i)
        if (!(is >> f.v[i])) throw io_error("truncated dump: " + path);
    return f;
}

void save_field_raw(const Field& f, const std::string& component, const std::string& path) {
    {
        std::ofstream hs(path + ".hdr");
        if (!hs) throw io_error("cannot open for writing: " + path + ".hdr");
        hs << header_line(*f.g, component) << "\n";
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    static_assert(sizeof(double) == 8);
    // byte order: values are stored little-endian
    for (double x : f.v) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        unsigned char b[8];
        for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xffu);
        os.write(reinterpret_cast<const char*>(b), 8);
    }
    if (!os) throw io_error("write failed: " + path);
}

Field load_field_raw(const Grid& g, const std::string& path, std::string* component) {
    std::ifstream hs(path + ".hdr");
    if (!hs) throw io_error("cannot open: " + path + ".hdr");
    std::string line;
    if (!std::getline(hs, line)) throw io_error("empty header: " + path + ".hdr");
    const Header h = parse_header(line, path);
    check_header(h, g, path);
    if (component) *component = h.component;
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    Field f(g);
    for (std::size_t i = 0; i < g.total; ++i) {
        unsigned char b[8];
        if (!is.read(reinterpret_cast<char*>(b), 8)) throw io_error("truncated dump: " + path);
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
        double x;
        std::memcpy(&x, &bits, 8);
        f.v[i] = x;
    }
    return f;
}

Field load_field_resampled(const Grid& g, const std::string& path) {
    // sniff: text dumps start with the magic; raw dumps rely on the sidecar
    Header h;
    bool text = false;
    {
        std::ifstream is(path);
        std::string line;
        if (is && std::getline(is, line) && line.rfind("QSSFIELD", 0) == 0) {
            h = parse_header(line, path);
            text = true;
        }
    }
    if (!text) {
        std::ifstream hs(path + ".hdr");
        std::string line;
        if (!hs || !std::getline(hs, line)) throw io_error("not a QSSFIELD v1 dump: " + path);
        h = parse_header(line, path);
    }
    if (h.N != g.dims ||
        std::fabs(h.L - g.half_extent) > 1e-12 * std::max(1.0, std::fabs(g.half_extent)))
        throw io_error("dump geometry does not match the grid: " + path);
    const Grid src = Grid::make(h.N, h.n, g.half_extent);
    const Field f = text ? load_field_text(src, path) : load_field_raw(src, path);
    return resample(g, f);
}

}  // namespace qss

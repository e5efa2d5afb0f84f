#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qss/grid.hpp"

namespace qss {

struct Field {
    const Grid* g = nullptr;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& grid) : g(&grid), v(grid.total, 0.0) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

struct Pair {
    Field u, v;
    Pair() = default;
    explicit Pair(const Grid& grid) : u(grid), v(grid) {}
};

// h^N-weighted node sum; the sole quadrature rule of the artifact.
double integrate(const Grid& g, const std::vector<double>& values);

inline double integrate(const Field& f) { return integrate(*f.g, f.v); }

// Central differences at interior nodes; boundary stencils read a zero
// ghost value outside the box (Dirichlet convention), so the edge formula
// degenerates to the one-sided (f[1]-0)/(2h).
std::vector<Field> grad(const Field& f);

// One component of grad, written into `out`.
void grad_axis(const Field& f, int axis, Field& out);

// g(x) = t*f(x/t) with multilinear interpolation and zero extension.
// t = 1 is an exact copy (nodes map to nodes).
Field scale_field(const Field& f, double t);

// Resample values from a source grid (same N and L) onto this field's grid
// by multilinear interpolation at the target nodes.  Nested refinements
// (n -> 2n-1) reproduce shared nodes exactly.
Field resample(const Grid& target, const Field& src);

// d_H(f,g) = ||f-g||_{H^1} + ||grad(f^2) - grad(g^2)||_{L^2}
double distance_H(const Field& f, const Field& g);

// d_X(p,q) = d_H(p.u,q.u) + d_H(p.v,q.v)
double distance_X(const Pair& p, const Pair& q);

double max_abs(const Field& f);

// --- dump format ---------------------------------------------------------
// Text: header "QSSFIELD v1 N n L component" then n^N whitespace-separated
// decimal reals, lexicographic node order.  Raw: the same values as
// little-endian binary64 in a .raw file, header in a sidecar text file
// (same header line) at path + ".hdr".

void save_field_text(const Field& f, const std::string& component, const std::string& path);
Field load_field_text(const Grid& g, const std::string& path, std::string* component = nullptr);
void save_field_raw(const Field& f, const std::string& component, const std::string& path);
Field load_field_raw(const Grid& g, const std::string& path, std::string* component = nullptr);

// Load a dump whose n may differ from g's (same N and L required) and
// resample it onto g.  Accepts text or raw by sniffing the header.
Field load_field_resampled(const Grid& g, const std::string& path);

}  // namespace qss

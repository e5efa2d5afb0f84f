#pragma once

#include <cmath>
#include <random>

#include "qss/field.hpp"

namespace qsstest {

inline void node_coords(const qss::Grid& g, std::size_t idx, double* x) {
    int iv[8];
    g.unravel(idx, iv);
    for (int a = 0; a < g.dims; ++a) x[a] = g.coord(static_cast<std::size_t>(iv[a]));
}

// isotropic Gaussian exp(-r^2/w^2)
inline qss::Field gaussian(const qss::Grid& g, double w, double amp = 1.0) {
    qss::Field f(g);
    for (std::size_t i = 0; i < g.total; ++i) {
        double x[8];
        node_coords(g, i, x);
        double r2 = 0.0;
        for (int a = 0; a < g.dims; ++a) r2 += x[a] * x[a];
        f.v[i] = amp * std::exp(-r2 / (w * w));
    }
    return f;
}

// Im((y1+i y2)^s) * exp(-r^2/w^2): smooth, and in the continuum exactly
// equivariant for the order-s dihedral action (rotation-invariant, odd
// across every mirror line of the group)
inline qss::Field twisted(const qss::Grid& g, int s, double w) {
    qss::Field f(g);
    for (std::size_t i = 0; i < g.total; ++i) {
        double x[8];
        node_coords(g, i, x);
        double r2 = 0.0;
        for (int a = 0; a < g.dims; ++a) r2 += x[a] * x[a];
        double rho = std::hypot(x[0], x[1]);
        double th = std::atan2(x[1], x[0]);
        f.v[i] = std::pow(rho, s) * std::sin(s * th) * std::exp(-r2 / (w * w));
    }
    return f;
}

// wide anisotropic bump used where a generic smooth decaying field is needed
inline qss::Field smoothwide(const qss::Grid& g, double w, double phase) {
    qss::Field f(g);
    for (std::size_t i = 0; i < g.total; ++i) {
        double x[8];
        node_coords(g, i, x);
        double r2 = 0.0;
        for (int a = 0; a < g.dims; ++a) r2 += x[a] * x[a];
        f.v[i] = (0.8 + 0.3 * std::sin(x[0] + phase) * std::cos(x[1])) * std::exp(-r2 / (w * w));
    }
    return f;
}

// sum of a few random Gaussian bumps, reproducible from the engine state
inline qss::Field random_bumps(const qss::Grid& g, std::mt19937& rng, int nbumps = 3) {
    std::uniform_real_distribution<double> amp(0.3, 1.0);
    std::uniform_real_distribution<double> width(0.8, 2.0);
    std::uniform_real_distribution<double> ctr(-0.5 * g.half_extent, 0.5 * g.half_extent);
    std::bernoulli_distribution flip(0.5);
    qss::Field f(g);
    for (int b = 0; b < nbumps; ++b) {
        double a = flip(rng) ? amp(rng) : -amp(rng);
        double w = width(rng);
        double c[8];
        for (int d = 0; d < g.dims; ++d) c[d] = ctr(rng);
        for (std::size_t i = 0; i < g.total; ++i) {
            double x[8];
            node_coords(g, i, x);
            double r2 = 0.0;
            for (int d = 0; d < g.dims; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
            f.v[i] += a * std::exp(-r2 / (w * w));
        }
    }
    return f;
}

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

}  // namespace qsstest

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qss {

// Thrown for inputs that violate a documented precondition; the CLI maps
// these to exit code 2 with the message verbatim.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Node-centered lattice on [-L,L]^N with an odd number of points per axis,
// so the origin is a node and coordinate negations map nodes to nodes.
struct Grid {
    int dims = 0;               // N
    int points_per_axis = 0;    // n, odd
    double half_extent = 0.0;   // L
    double spacing = 0.0;       // h = 2L/(n-1)
    std::size_t total = 0;      // n^N
    std::vector<std::size_t> stride;  // lexicographic, last axis fastest

    static Grid make(int dims, int points_per_axis, double half_extent) {
        if (dims < 3) throw validation_error("N must be at least 3");
        if (points_per_axis < 3 || points_per_axis % 2 == 0)
            throw validation_error("n must be odd and at least 3");
        if (!(half_extent > 0.0)) throw validation_error("L must be positive");
        Grid g;
        g.dims = dims;
        g.points_per_axis = points_per_axis;
        g.half_extent = half_extent;
        g.spacing = 2.0 * half_extent / (points_per_axis - 1);
        g.stride.assign(static_cast<std::size_t>(dims), 1);
        g.total = 1;
        for (int a = dims - 1; a >= 0; --a) {
            g.stride[static_cast<std::size_t>(a)] = g.total;
            g.total *= static_cast<std::size_t>(points_per_axis);
        }
        return g;
    }

    double coord(std::size_t i) const { return -half_extent + spacing * static_cast<double>(i); }

    void unravel(std::size_t flat, int* idx) const {
        for (int a = dims - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % static_cast<std::size_t>(points_per_axis));
            flat /= static_cast<std::size_t>(points_per_axis);
        }
    }

    std::size_t lines(int axis) const {
        (void)axis;
        return total / static_cast<std::size_t>(points_per_axis);
    }

    // Base offset of the `line`-th 1-D line running along `axis`.
    std::size_t line_base(int axis, std::size_t line) const {
        std::size_t off = 0;
        for (int a = dims - 1; a >= 0; --a) {
            if (a == axis) continue;
            off += (line % static_cast<std::size_t>(points_per_axis)) * stride[static_cast<std::size_t>(a)];
            line /= static_cast<std::size_t>(points_per_axis);
        }
        return off;
    }

    bool same_geometry(const Grid& o) const {
        return dims == o.dims && points_per_axis == o.points_per_axis &&
               half_extent == o.half_extent;
    }
};

}  // namespace qss

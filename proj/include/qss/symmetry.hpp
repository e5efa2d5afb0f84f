#pragma once

#include <array>
#include <vector>

#include "qss/field.hpp"

namespace qss {

// Orthogonal map of the (y1,y2) plane; the remaining N-2 coordinates are
// always fixed.
struct GroupElement {
    std::array<double, 4> m{1, 0, 0, 1};  // row-major 2x2
    int det_sign = 1;                     // +1 rotation, -1 reflection

    bool lattice_exact() const;  // all entries in {0,+1,-1}
};

struct DihedralGroup {
    int s = 0;
    std::vector<GroupElement> elements;  // size 2s, identity first
};

// Closure of {rotation by 2pi/s, reflection across y1=0 for s=2, otherwise
// across the line y2 = tan(pi/s)*y1}; asserts the order is exactly 2s.
DihedralGroup build_group(int s);

GroupElement compose(const GroupElement& a, const GroupElement& b);

// x -> det(g) * f(g^{-1} x).  Node permutation when the matrix is exact on
// the lattice (all entries 0 or +-1, e.g. every element for s=2 and the
// quarter-turn rotations for s=4); bilinear interpolation in the (y1,y2)
// plane otherwise, reading zero outside the box.
Field act(const GroupElement& g, const Field& f);

// (1/2s) * sum_g act(g, f): projection onto the det-twisted fixed space.
Field symmetrize(const Field& f, const DihedralGroup& G);

// max over group elements, nodes, and both components of
// |f(gx) - det(g) f(x)|.
double equivariance_defect(const Pair& p, const DihedralGroup& G);
double equivariance_defect(const Field& f, const DihedralGroup& G);

}  // namespace qss

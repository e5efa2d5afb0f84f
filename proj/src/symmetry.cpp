#include "qss/symmetry.hpp"

#include <cmath>
#include <cstring>

namespace qss {

namespace {

constexpr double kMatchTol = 1e-9;

bool near_entry(double a, double b) { return std::fabs(a - b) < kMatchTol; }

bool same_element(const GroupElement& a, const GroupElement& b) {
    for (int k = 0; k < 4; ++k)
        if (!near_entry(a.m[k], b.m[k])) return false;
    return true;
}

int detect_det(const std::array<double, 4>& m) {
    const double d = m[0] * m[3] - m[1] * m[2];
    if (std::fabs(d - 1.0) < 1e-9) return 1;
    if (std::fabs(d + 1.0) < 1e-9) return -1;
    throw validation_error("group element is not orthogonal");
}

}  // namespace

bool GroupElement::lattice_exact() const {
    for (double e : m) {
        const double r = std::round(e);
        if (std::fabs(e - r) > 1e-13 || std::fabs(r) > 1.0) return false;
    }
    return true;
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
    GroupElement c;
    c.m[0] = a.m[0] * b.m[0] + a.m[1] * b.m[2];
    c.m[1] = a.m[0] * b.m[1] + a.m[1] * b.m[3];
    c.m[2] = a.m[2] * b.m[0] + a.m[3] * b.m[2];
    c.m[3] = a.m[2] * b.m[1] + a.m[3] * b.m[3];
    c.det_sign = a.det_sign * b.det_sign;
    return c;
}

DihedralGroup build_group(int s) {
    if (s < 2) throw validation_error("s must be at least 2");
    const double two_pi = 8.0 * std::atan(1.0);
    GroupElement rot;
    {
        const double c = std::cos(two_pi / s), sn = std::sin(two_pi / s);
        rot.m = {c, -sn, sn, c};
        rot.det_sign = 1;
    }
    // reflection across the line at angle phi = pi/s to the y1-axis
    // (for s=2 this is phi = pi/2, i.e. the line y1 = 0)
    GroupElement refl;
    {
        const double phi = two_pi / (2.0 * s);
        const double c = std::cos(2.0 * phi), sn = std::sin(2.0 * phi);
        refl.m = {c, sn, sn, -c};
        refl.det_sign = -1;
    }
    // snap near-integer entries so s=2 and quarter-turn elements are exact
    auto snap = [](GroupElement& e) {
        for (double& x : e.m) {
            const double r = std::round(x);
            if (std::fabs(x - r) < 1e-15 * 8 + 1e-16) x = r;
        }
    };
    snap(rot);
    snap(refl);

    DihedralGroup G;
    G.s = s;
    G.elements.push_back(GroupElement{});  // identity
    std::vector<GroupElement> frontier = {rot, refl};
    while (!frontier.empty()) {
        std::vector<GroupElement> next;
        for (const auto& e : frontier) {
            bool known = false;
            for (const auto& k : G.elements)
                if (same_element(e, k)) {
                    known = true;
                    break;
                }
            if (known) continue;
            G.elements.push_back(e);
            next.push_back(compose(e, rot));
            next.push_back(compose(e, refl));
        }
        frontier = std::move(next);
        if (G.elements.size() > 4u * static_cast<unsigned>(s))
            throw validation_error("dihedral closure exceeded 2s elements");
    }
    if (G.elements.size() != 2u * static_cast<unsigned>(s))
        throw validation_error("dihedral group order is not 2s");
    int rotations = 0;
    for (auto& e : G.elements) {
        snap(e);
        e.det_sign = detect_det(e.m);
        if (e.det_sign == 1) ++rotations;
        // orthogonality invariant
        const double g00 = e.m[0] * e.m[0] + e.m[2] * e.m[2];
        const double g11 = e.m[1] * e.m[1] + e.m[3] * e.m[3];
        const double g01 = e.m[0] * e.m[1] + e.m[2] * e.m[3];
        if (std::fabs(g00 - 1) > 1e-12 || std::fabs(g11 - 1) > 1e-12 || std::fabs(g01) > 1e-12)
            throw validation_error("group element is not orthogonal");
    }
    if (rotations != s) throw validation_error("dihedral group must contain s rotations");
    return G;
}

namespace {

// map a coordinate value +-coord(k) to its node index under an entry of
// {0, +1, -1}; sign < 0 flips the index across the center
inline int mapped_index(int entry_sign, int idx, int n) {
    return entry_sign > 0 ? idx : n - 1 - idx;
}

}  // namespace

Field act(const GroupElement& g, const Field& f) {
    const Grid& gr = *f.g;
    const int n = gr.points_per_axis;
    const std::size_t s0 = gr.stride[0], s1 = gr.stride[1];
    const std::size_t block = s1;  // trailing axes are contiguous after axis 1
    const double det = static_cast<double>(g.det_sign);
    Field out(gr);

    // inverse = transpose for orthogonal matrices
    const double i00 = g.m[0], i01 = g.m[2], i10 = g.m[1], i11 = g.m[3];

    if (g.lattice_exact()) {
        // source index along y1 comes from whichever coordinate the inverse
        // row selects; entries are exactly 0 or +-1 here
        const int r00 = static_cast<int>(std::lround(i00));
        const int r01 = static_cast<int>(std::lround(i01));
        const int r10 = static_cast<int>(std::lround(i10));
        const int r11 = static_cast<int>(std::lround(i11));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const int si = r00 != 0 ? mapped_index(r00, i, n) : mapped_index(r01, j, n);
                const int sj = r10 != 0 ? mapped_index(r10, i, n) : mapped_index(r11, j, n);
                const double* src =
                    f.v.data() + static_cast<std::size_t>(si) * s0 + static_cast<std::size_t>(sj) * s1;
                double* dst =
                    out.v.data() + static_cast<std::size_t>(i) * s0 + static_cast<std::size_t>(j) * s1;
                for (std::size_t k = 0; k < block; ++k) dst[k] = det * src[k];
            }
        }
        return out;
    }

    const double L = gr.half_extent, h = gr.spacing;
    for (int i = 0; i < n; ++i) {
        const double y1 = gr.coord(static_cast<std::size_t>(i));
        for (int j = 0; j < n; ++j) {
            const double y2 = gr.coord(static_cast<std::size_t>(j));
            const double sx = i00 * y1 + i01 * y2;
            const double sy = i10 * y1 + i11 * y2;
            const double px = (sx + L) / h, py = (sy + L) / h;
            const int ax = static_cast<int>(std::floor(px));
            const int ay = static_cast<int>(std::floor(py));
            const double fx = px - ax, fy = py - ay;
            double* dst =
                out.v.data() + static_cast<std::size_t>(i) * s0 + static_cast<std::size_t>(j) * s1;
            for (int da = 0; da < 2; ++da) {
                const int ii = ax + da;
                if (ii < 0 || ii >= n) continue;
                const double wx = da ? fx : 1.0 - fx;
                for (int db = 0; db < 2; ++db) {
                    const int jj = ay + db;
                    if (jj < 0 || jj >= n) continue;
                    const double w = det * wx * (db ? fy : 1.0 - fy);
                    if (w == 0.0) continue;
                    const double* src = f.v.data() + static_cast<std::size_t>(ii) * s0 +
                                        static_cast<std::size_t>(jj) * s1;
                    for (std::size_t k = 0; k < block; ++k) dst[k] += w * src[k];
                }
            }
        }
    }
    return out;
}

Field symmetrize(const Field& f, const DihedralGroup& G) {
    const Grid& gr = *f.g;
    Field acc(gr);
    for (const auto& g : G.elements) {
        const Field t = act(g, f);
        for (std::size_t k = 0; k < gr.total; ++k) acc.v[k] += t.v[k];
    }
    const double w = 1.0 / static_cast<double>(G.elements.size());
    for (double& x : acc.v) x *= w;
    return acc;
}

double equivariance_defect(const Field& f, const DihedralGroup& G) {
    double worst = 0.0;
    for (const auto& g : G.elements) {
        const Field t = act(g, f);
        for (std::size_t k = 0; k < f.size(); ++k)
            worst = std::max(worst, std::fabs(t.v[k] - f.v[k]));
    }
    return worst;
}

double equivariance_defect(const Pair& p, const DihedralGroup& G) {
    return std::max(equivariance_defect(p.u, G), equivariance_defect(p.v, G));
}

}  // namespace qss

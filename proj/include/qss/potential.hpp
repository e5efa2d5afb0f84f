#pragma once

#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qss/field.hpp"
#include "qss/params.hpp"

namespace qss {

// Coefficient A(x) of the u-equation.  Three kinds:
//   constant   A(x) = A0
//   builtin    named analytic families:
//                "well"      A(x) = Ainf - (Ainf-A0)/(1+|x|^2)   (bounded, passes all checks)
//                "harmonic"  A(x) = A0 + |x|^2                    (unbounded, fails boundedness)
//   tabulated  node table in the field dump format, optional gradient
//              tables; evaluated off-node by multilinear interpolation,
//              Ainf outside the box.
struct PotentialModel {
    enum class Kind { constant, builtin, tabulated };

    Kind kind = Kind::constant;
    std::string name;           // builtin family member
    double A0 = 1.0;            // lower bound / value at the minimum
    double Ainf = 1.0;          // limit at infinity (may be +inf)

    // tabulated state
    const Grid* grid = nullptr;
    std::shared_ptr<const std::vector<double>> table;
    std::array<std::shared_ptr<const std::vector<double>>, 8> grad_tables{};  // up to N components
    bool has_grad_tables = false;

    static PotentialModel constant(double A0);
    static PotentialModel builtin(const std::string& name, double A0, double Ainf);
    static PotentialModel tabulated(const Grid& g, std::vector<double> values,
                                    std::vector<std::vector<double>> gradients,
                                    double A0, double Ainf);

    bool is_constant() const { return kind == Kind::constant; }

    double eval(const double* x, int N) const;
    // nabla A(x) . x
    double radial_derivative(const double* x, int N) const;
    // analytic sup of |nabla A . x| when known; +inf marks unbounded
    double sup_radial() const;

    void validate() const;
};

struct ConditionEntry {
    std::string id;       // "A1".."A4"
    bool pass = false;
    double margin = 0.0;  // worst margin; sign convention documented per check
    std::string detail;   // first violating sample, or summary
};

struct ConditionReport {
    std::array<ConditionEntry, 4> entries;
    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

// Sampled verification of the standing hypotheses on A:
//   A1: 0 < A0 <= A(x) <= Ainf < inf at all samples
//   A2: |nabla A . x| bounded, and (alpha+beta-2)A(x) - nabla A(x).x >= 0
//   A3: sigma -> sigma^((N+2)/(N+ab)) A(sigma^(1/(N+ab)) x) concave in sigma
//       (symmetric second differences <= 1e-10 * max(1,|value|))
//   A4: invariance under rotations of the (y1,y2) plane to 1e-10
// Samples: a deterministic sub-lattice of `g` plus a log grid of sigma.
ConditionReport check_conditions(const PotentialModel& model, const Params& p, const Grid& g);

}  // namespace qss

#pragma once

#include "qss/grid.hpp"

namespace qss {

struct Params {
    int N = 3;
    double alpha = 2.0;
    double beta = 2.0;
    double B = 1.0;

    double ab() const { return alpha + beta; }

    void validate() const {
        if (N < 3) throw validation_error("N must be at least 3");
        if (!(alpha > 1.0)) throw validation_error("alpha must exceed 1");
        if (!(beta > 1.0)) throw validation_error("beta must exceed 1");
        const double sum = alpha + beta;
        const double crit = 4.0 * N / (N - 2.0);
        if (!(sum > 2.0 && sum < crit))
            throw validation_error("alpha+beta must lie in (2, 4N/(N-2))");
        if (!(B > 0.0)) throw validation_error("B must be positive");
    }
};

}  // namespace qss

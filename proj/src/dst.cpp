#include "qss/dst.hpp"

#include <fftw3.h>

#include <cmath>

namespace qss {

struct SobolevPrecond::Impl {
    const Grid* g;
    std::vector<double> work;
    std::vector<double> invden;  // 1 / ((1 + sum lambda) * dst normalization)
    fftw_plan plan = nullptr;

    explicit Impl(const Grid& grid) : g(&grid), work(grid.total) {
        const int N = grid.dims;
        const int n = grid.points_per_axis;
        std::vector<int> dims(static_cast<std::size_t>(N), n);
        std::vector<fftw_r2r_kind> kinds(static_cast<std::size_t>(N), FFTW_RODFT00);
        plan = fftw_plan_r2r(N, dims.data(), work.data(), work.data(), kinds.data(),
                             FFTW_ESTIMATE);

        // eigenvalues of the Dirichlet 1-D Laplacian: (2 - 2 cos(pi k/(n+1)))/h^2
        const double pi = 4.0 * std::atan(1.0);
        std::vector<double> lam(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k)
            lam[static_cast<std::size_t>(k)] =
                (2.0 - 2.0 * std::cos(pi * (k + 1) / (n + 1))) / (grid.spacing * grid.spacing);

        double norm = 1.0;
        for (int a = 0; a < N; ++a) norm *= 2.0 * (n + 1);

        invden.resize(grid.total);
        int idx[8];
        for (std::size_t j = 0; j < grid.total; ++j) {
            grid.unravel(j, idx);
            double s = 1.0;
            for (int a = 0; a < N; ++a) s += lam[static_cast<std::size_t>(idx[a])];
            invden[j] = 1.0 / (s * norm);
        }
    }

    ~Impl() {
        if (plan) fftw_destroy_plan(plan);
    }
};

SobolevPrecond::SobolevPrecond(const Grid& g) : impl_(std::make_unique<Impl>(g)) {}
SobolevPrecond::~SobolevPrecond() = default;

void SobolevPrecond::apply(const Field& in, Field& out) {
    auto& im = *impl_;
    im.work = in.v;
    fftw_execute_r2r(im.plan, im.work.data(), im.work.data());
    for (std::size_t j = 0; j < im.work.size(); ++j) im.work[j] *= im.invden[j];
    fftw_execute_r2r(im.plan, im.work.data(), im.work.data());
    out.v = im.work;
    if (!out.g) out.g = in.g;
}

}  // namespace qss

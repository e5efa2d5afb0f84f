#pragma once

#include <memory>
#include <vector>

#include "qss/field.hpp"

namespace qss {

// (1 - Delta_h)^{-1} smoother on the Dirichlet lattice, applied via the
// type-I discrete sine transform (the eigenbasis of the standard 2N+1-point
// Laplacian with zero ghosts).  Used only to precondition descent
// directions; plans are created once per grid with FFTW_ESTIMATE so runs
// are deterministic.
class SobolevPrecond {
  public:
    explicit SobolevPrecond(const Grid& g);
    ~SobolevPrecond();

    SobolevPrecond(const SobolevPrecond&) = delete;
    SobolevPrecond& operator=(const SobolevPrecond&) = delete;

    void apply(const Field& in, Field& out);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace qss

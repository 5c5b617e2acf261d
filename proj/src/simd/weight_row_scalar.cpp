// Reference weight-row kernels. Compiled with -ffp-contract=off so the
// per-element operation sequence matches the AVX2 TU exactly (see CMake).

#include <cmath>

#include "ssdm/simd/weight_row.hpp"

namespace ssdm::simd {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

} // namespace

void weight_row_scalar(KernelFamily family, const double* u, const double* v,
                       std::size_t n, double u0, double v0, double h, double* w) {
    const double inv_h2 = 1.0 / (h * h);
    switch (family) {
    case KernelFamily::Epanechnikov: {
        const double scale = 0.75 * inv_h2;
        for (std::size_t i = 0; i < n; ++i) {
            const double du = u[i] - u0;
            const double dv = v[i] - v0;
            const double t2 = (du * du + dv * dv) * inv_h2;
            w[i] = t2 < 1.0 ? scale * (1.0 - t2) : 0.0;
        }
        break;
    }
    case KernelFamily::Quartic: {
        const double scale = 0.9375 * inv_h2;
        for (std::size_t i = 0; i < n; ++i) {
            const double du = u[i] - u0;
            const double dv = v[i] - v0;
            const double t2 = (du * du + dv * dv) * inv_h2;
            const double one_m = 1.0 - t2;
            w[i] = t2 < 1.0 ? scale * (one_m * one_m) : 0.0;
        }
        break;
    }
    case KernelFamily::Gaussian: {
        const double scale = kInvSqrt2Pi * inv_h2;
        for (std::size_t i = 0; i < n; ++i) {
            const double du = u[i] - u0;
            const double dv = v[i] - v0;
            const double t2 = (du * du + dv * dv) * inv_h2;
            w[i] = t2 <= 16.0 ? scale * std::exp(-0.5 * t2) : 0.0;
        }
        break;
    }
    }
}

} // namespace ssdm::simd

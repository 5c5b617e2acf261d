#pragma once

#include <cstddef>
#include <string>

#include "ssdm/kernels.hpp"

namespace ssdm::simd {

enum class Backend {
    Scalar,
    Avx2,
};

// Backend chosen for this process: Avx2 when the binary carries the AVX2
// translation unit and the CPU reports the feature, Scalar otherwise.
Backend detected_backend();

// Backend currently in use (detected, unless overridden).
Backend active_backend();

// Test hook: pin the backend. Throws NumericError if it is unavailable.
void force_backend(Backend backend);
void clear_forced_backend();

bool backend_available(Backend backend);
std::string backend_name(Backend backend);

// One row of kernel weights against a common target location:
//   w[i] = K(d_i / h) / h^2,  d_i = |(u[i], v[i]) - (u0, v0)|.
// Compact-support families dispatch to the active backend; the Gaussian
// family always runs the scalar path (no vector exp). Both backends are
// compiled with FP contraction off and perform the identical per-element
// operation sequence, so their outputs are bitwise equal.
void weight_row(KernelFamily family, const double* u, const double* v,
                std::size_t n, double u0, double v0, double h, double* w);

// Reference implementation, always scalar; used by the equivalence tests.
void weight_row_scalar(KernelFamily family, const double* u, const double* v,
                       std::size_t n, double u0, double v0, double h, double* w);

} // namespace ssdm::simd

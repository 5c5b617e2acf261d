#include <atomic>
#include <optional>

#include "ssdm/errors.hpp"
#include "ssdm/simd/weight_row.hpp"

namespace ssdm::simd {

#if defined(SSDM_HAVE_AVX2_TU)
void weight_row_avx2(KernelFamily family, const double* u, const double* v,
                     std::size_t n, double u0, double v0, double h, double* w);
#endif

namespace {

std::optional<Backend>& forced() {
    static std::optional<Backend> value;
    return value;
}

} // namespace

bool backend_available(Backend backend) {
    switch (backend) {
    case Backend::Scalar:
        return true;
    case Backend::Avx2:
#if defined(SSDM_HAVE_AVX2_TU)
        return __builtin_cpu_supports("avx2") != 0;
#else
        return false;
#endif
    }
    return false;
}

Backend detected_backend() {
    static const Backend detected =
        backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
    return detected;
}

Backend active_backend() {
    return forced().value_or(detected_backend());
}

void force_backend(Backend backend) {
    if (!backend_available(backend)) {
        throw NumericError("simd backend '" + backend_name(backend) +
                           "' is not available on this machine/build");
    }
    forced() = backend;
}

void clear_forced_backend() { forced().reset(); }

std::string backend_name(Backend backend) {
    switch (backend) {
    case Backend::Scalar:
        return "scalar";
    case Backend::Avx2:
        return "avx2";
    }
    return "unknown";
}

void weight_row(KernelFamily family, const double* u, const double* v,
                std::size_t n, double u0, double v0, double h, double* w) {
#if defined(SSDM_HAVE_AVX2_TU)
    if (active_backend() == Backend::Avx2) {
        weight_row_avx2(family, u, v, n, u0, v0, h, w);
        return;
    }
#endif
    weight_row_scalar(family, u, v, n, u0, v0, h, w);
}

} // namespace ssdm::simd

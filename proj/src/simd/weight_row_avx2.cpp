// AVX2 weight-row kernels for the compact-support families. Compiled with
// -mavx2 -ffp-contract=off; the per-element operation sequence (sub, sub,
// mul, mul+add, mul, blend) is identical to the scalar TU, so results are
// bitwise equal lane for lane. The Gaussian family needs exp and stays on
// the scalar path.

#include <immintrin.h>

#include "ssdm/simd/weight_row.hpp"

namespace ssdm::simd {

void weight_row_avx2(KernelFamily family, const double* u, const double* v,
                     std::size_t n, double u0, double v0, double h, double* w);

namespace {

constexpr std::size_t kLanes = 4;

template <bool Quartic>
void compact_row(const double* u, const double* v, std::size_t n, double u0,
                 double v0, double h, double* w) {
    const double inv_h2 = 1.0 / (h * h);
    const double scale = (Quartic ? 0.9375 : 0.75) * inv_h2;

    const __m256d vu0 = _mm256_set1_pd(u0);
    const __m256d vv0 = _mm256_set1_pd(v0);
    const __m256d vinv = _mm256_set1_pd(inv_h2);
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m256d vone = _mm256_set1_pd(1.0);

    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d du = _mm256_sub_pd(_mm256_loadu_pd(u + i), vu0);
        const __m256d dv = _mm256_sub_pd(_mm256_loadu_pd(v + i), vv0);
        const __m256d d2 =
            _mm256_add_pd(_mm256_mul_pd(du, du), _mm256_mul_pd(dv, dv));
        const __m256d t2 = _mm256_mul_pd(d2, vinv);
        const __m256d one_m = _mm256_sub_pd(vone, t2);
        __m256d val;
        if constexpr (Quartic) {
            val = _mm256_mul_pd(vscale, _mm256_mul_pd(one_m, one_m));
        } else {
            val = _mm256_mul_pd(vscale, one_m);
        }
        const __m256d inside = _mm256_cmp_pd(t2, vone, _CMP_LT_OQ);
        _mm256_storeu_pd(w + i, _mm256_and_pd(val, inside));
    }
    for (; i < n; ++i) {
        const double du = u[i] - u0;
        const double dv = v[i] - v0;
        const double t2 = (du * du + dv * dv) * inv_h2;
        if constexpr (Quartic) {
            const double one_m = 1.0 - t2;
            w[i] = t2 < 1.0 ? scale * (one_m * one_m) : 0.0;
        } else {
            w[i] = t2 < 1.0 ? scale * (1.0 - t2) : 0.0;
        }
    }
}

} // namespace

void weight_row_avx2(KernelFamily family, const double* u, const double* v,
                     std::size_t n, double u0, double v0, double h, double* w) {
    switch (family) {
    case KernelFamily::Epanechnikov:
        compact_row<false>(u, v, n, u0, v0, h, w);
        break;
    case KernelFamily::Quartic:
        compact_row<true>(u, v, n, u0, v0, h, w);
        break;
    case KernelFamily::Gaussian:
        weight_row_scalar(family, u, v, n, u0, v0, h, w);
        break;
    }
}

} // namespace ssdm::simd

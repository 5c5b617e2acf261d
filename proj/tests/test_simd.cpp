#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "ssdm/errors.hpp"
#include "ssdm/kernels.hpp"
#include "ssdm/simd/weight_row.hpp"

namespace {

struct Row {
    std::vector<double> u, v;
};

Row make_row(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Row row;
    row.u.resize(n);
    row.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        row.u[i] = unif(gen);
        row.v[i] = unif(gen);
    }
    return row;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

constexpr double kU0 = 0.37;
constexpr double kV0 = 0.72;
constexpr double kH = 0.3;

} // namespace

TEST_CASE("dispatch matches the scalar reference bitwise") {
    for (const ssdm::KernelFamily family :
         {ssdm::KernelFamily::Epanechnikov, ssdm::KernelFamily::Quartic,
          ssdm::KernelFamily::Gaussian}) {
        // Sizes straddling every vector-width remainder case.
        for (std::size_t n = 1; n <= 67; ++n) {
            const Row row = make_row(n, static_cast<unsigned>(n) * 7u + 1u);
            std::vector<double> got(n, -1.0), ref(n, -2.0);
            ssdm::simd::weight_row(family, row.u.data(), row.v.data(), n, kU0,
                                   kV0, kH, got.data());
            ssdm::simd::weight_row_scalar(family, row.u.data(), row.v.data(),
                                          n, kU0, kV0, kH, ref.data());
            if (!bitwise_equal(got, ref)) {
                CAPTURE(ssdm::kernel_family_name(family));
                CAPTURE(n);
                FAIL_CHECK("dispatched weight_row differs from the scalar "
                           "reference");
            }
        }
    }
}

TEST_CASE("weights agree with the scaled kernel") {
    const std::size_t n = 41;
    const Row row = make_row(n, 99u);
    for (const ssdm::KernelFamily family :
         {ssdm::KernelFamily::Epanechnikov, ssdm::KernelFamily::Quartic,
          ssdm::KernelFamily::Gaussian}) {
        const ssdm::KernelSpec spec{family};
        std::vector<double> got(n);
        ssdm::simd::weight_row(family, row.u.data(), row.v.data(), n, kU0,
                               kV0, kH, got.data());
        for (std::size_t i = 0; i < n; ++i) {
            const double d =
                std::hypot(row.u[i] - kU0, row.v[i] - kV0);
            const double expected = ssdm::scaled_kernel(spec, d, kH);
            CHECK(std::abs(got[i] - expected) <=
                  1e-12 * std::max(1.0, std::abs(expected)));
        }
    }
}

TEST_CASE("forcing the scalar backend is always possible") {
    REQUIRE(ssdm::simd::backend_available(ssdm::simd::Backend::Scalar));
    ssdm::simd::force_backend(ssdm::simd::Backend::Scalar);
    CHECK(ssdm::simd::active_backend() == ssdm::simd::Backend::Scalar);

    const std::size_t n = 23;
    const Row row = make_row(n, 5u);
    std::vector<double> forced(n), ref(n);
    ssdm::simd::weight_row(ssdm::KernelFamily::Epanechnikov, row.u.data(),
                           row.v.data(), n, kU0, kV0, kH, forced.data());
    ssdm::simd::weight_row_scalar(ssdm::KernelFamily::Epanechnikov,
                                  row.u.data(), row.v.data(), n, kU0, kV0, kH,
                                  ref.data());
    CHECK(bitwise_equal(forced, ref));

    ssdm::simd::clear_forced_backend();
    CHECK(ssdm::simd::active_backend() == ssdm::simd::detected_backend());
}

TEST_CASE("forcing the avx2 backend either works or throws") {
    if (ssdm::simd::backend_available(ssdm::simd::Backend::Avx2)) {
        ssdm::simd::force_backend(ssdm::simd::Backend::Avx2);
        CHECK(ssdm::simd::active_backend() == ssdm::simd::Backend::Avx2);
        const std::size_t n = 37;
        const Row row = make_row(n, 11u);
        std::vector<double> forced(n), ref(n);
        ssdm::simd::weight_row(ssdm::KernelFamily::Quartic, row.u.data(),
                               row.v.data(), n, kU0, kV0, kH, forced.data());
        ssdm::simd::weight_row_scalar(ssdm::KernelFamily::Quartic,
                                      row.u.data(), row.v.data(), n, kU0, kV0,
                                      kH, ref.data());
        CHECK(bitwise_equal(forced, ref));
        ssdm::simd::clear_forced_backend();
    } else {
        CHECK_THROWS_AS(
            ssdm::simd::force_backend(ssdm::simd::Backend::Avx2),
            ssdm::NumericError);
        // A failed force must not change the active backend.
        CHECK(ssdm::simd::active_backend() ==
              ssdm::simd::detected_backend());
    }
}

TEST_CASE("backend names") {
    CHECK(ssdm::simd::backend_name(ssdm::simd::Backend::Scalar) == "scalar");
    CHECK(ssdm::simd::backend_name(ssdm::simd::Backend::Avx2) == "avx2");
}

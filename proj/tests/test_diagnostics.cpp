#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "ssdm/diagnostics.hpp"
#include "ssdm/errors.hpp"
#include "ssdm/rng.hpp"

namespace {

Eigen::VectorXd frozen_series() {
    Eigen::VectorXd x(12);
    x << 1.2, -0.4, 0.8, 2.1, -1.3, 0.5, 0.9, -0.2, 1.7, -0.8, 0.3, 1.1;
    return x;
}

} // namespace

TEST_CASE("normal quantiles against reference values") {
    CHECK(ssdm::normal_quantile(0.5) == 0.0);
    CHECK(std::abs(ssdm::normal_quantile(0.975) - 1.959963984540054) < 1e-10);
    CHECK(std::abs(ssdm::normal_quantile(0.025) + 1.959963984540054) < 1e-10);
    CHECK(std::abs(ssdm::normal_quantile(0.001) + 3.090232306167813) < 1e-10);
    CHECK(std::abs(ssdm::normal_quantile(0.1) + 1.2815515655446004) < 1e-10);
    CHECK(std::abs(ssdm::normal_quantile(0.75) - 0.6744897501960817) < 1e-10);

    // Symmetry across the median.
    for (const double p : {0.0001, 0.01, 0.2, 0.35, 0.49}) {
        CHECK(std::abs(ssdm::normal_quantile(p) +
                       ssdm::normal_quantile(1.0 - p)) < 1e-12);
    }

    CHECK_THROWS_AS(ssdm::normal_quantile(0.0), ssdm::DataError);
    CHECK_THROWS_AS(ssdm::normal_quantile(1.0), ssdm::DataError);
    CHECK_THROWS_AS(ssdm::normal_quantile(-0.2), ssdm::DataError);
}

TEST_CASE("acf and pacf of a frozen series") {
    const ssdm::DiagnosticsReport report =
        ssdm::residual_diagnostics(frozen_series());
    // Default lag count is min(40, n / 4) = 3.
    REQUIRE(report.lags == 3);
    REQUIRE(report.acf.size() == 3);
    REQUIRE(report.pacf.size() == 3);

    // Frozen from an independent biased (1/n) mean-corrected computation
    // with Durbin-Levinson partials.
    CHECK(std::abs(report.acf(0) - (-0.5147022893303036)) < 1e-12);
    CHECK(std::abs(report.acf(1) - (-0.1867013608932542)) < 1e-12);
    CHECK(std::abs(report.acf(2) - 0.4385215861614014) < 1e-12);
    CHECK(std::abs(report.pacf(0) - (-0.5147022893303036)) < 1e-12);
    CHECK(std::abs(report.pacf(1) - (-0.6143805479431923)) < 1e-12);
    CHECK(std::abs(report.pacf(2) - (-0.07175546124541465)) < 1e-12);

    // First partial equals the first autocorrelation by construction.
    CHECK(report.pacf(0) == report.acf(0));
    CHECK(std::abs(report.band - 1.96 / std::sqrt(12.0)) < 1e-15);
    CHECK_FALSE(report.ordering_note.empty());
}

TEST_CASE("qq vectors are consistent") {
    const Eigen::VectorXd x = frozen_series();
    const ssdm::DiagnosticsReport report = ssdm::residual_diagnostics(x);
    const Eigen::Index n = x.size();
    REQUIRE(report.qq_theoretical.size() == n);
    REQUIRE(report.qq_sample.size() == n);

    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i) + 0.5) /
                         static_cast<double>(n);
        CHECK(std::abs(report.qq_theoretical(i) -
                       ssdm::normal_quantile(p)) < 1e-14);
        if (i > 0) {
            CHECK(report.qq_theoretical(i) > report.qq_theoretical(i - 1));
            CHECK(report.qq_sample(i) >= report.qq_sample(i - 1));
        }
    }

    // Standardized by the same biased variance the ACF uses: mean zero,
    // mean square one.
    CHECK(std::abs(report.qq_sample.mean()) < 1e-12);
    CHECK(std::abs(report.qq_sample.squaredNorm() /
                       static_cast<double>(n) - 1.0) < 1e-12);

    // Residuals are echoed untouched in file order.
    CHECK((report.residuals - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("an autoregressive series shows its signature") {
    ssdm::Rng rng(21, 0);
    const int n = 4000;
    Eigen::VectorXd x(n);
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        prev = 0.8 * prev + rng.next_normal();
        x(i) = prev;
    }
    const ssdm::DiagnosticsReport report = ssdm::residual_diagnostics(x, 10);
    CHECK(report.lags == 10);
    CHECK(report.acf(0) > 0.75);
    CHECK(report.acf(0) < 0.85);
    CHECK(report.pacf(0) == report.acf(0));
    // Partials beyond lag one vanish for an AR(1).
    for (int k = 1; k < 10; ++k) CHECK(std::abs(report.pacf(k)) < 0.1);
    // Autocorrelations decay geometrically.
    CHECK(report.acf(4) < report.acf(0));
}

TEST_CASE("lag count validation") {
    const Eigen::VectorXd x = frozen_series();
    CHECK_THROWS_AS(ssdm::residual_diagnostics(x, 12), ssdm::DataError);
    CHECK_THROWS_AS(ssdm::residual_diagnostics(x, 40), ssdm::DataError);
    const ssdm::DiagnosticsReport ok = ssdm::residual_diagnostics(x, 11);
    CHECK(ok.lags == 11);

    // A long series caps the default at 40 lags.
    ssdm::Rng rng(2, 2);
    Eigen::VectorXd longer(400);
    for (Eigen::Index i = 0; i < 400; ++i) longer(i) = rng.next_normal();
    CHECK(ssdm::residual_diagnostics(longer).lags == 40);
}

TEST_CASE("degenerate residuals are rejected") {
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(20, 3.25);
    CHECK_THROWS_AS(ssdm::residual_diagnostics(flat), ssdm::DataError);
    Eigen::VectorXd with_nan = frozen_series();
    with_nan(4) = std::nan("");
    CHECK_THROWS_AS(ssdm::residual_diagnostics(with_nan), ssdm::DataError);
}

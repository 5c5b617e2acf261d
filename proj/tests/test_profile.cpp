#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ssdm/dataset.hpp"
#include "ssdm/errors.hpp"
#include "ssdm/kernels.hpp"
#include "ssdm/locallinear.hpp"
#include "ssdm/profile.hpp"
#include "ssdm/rng.hpp"
#include "ssdm/selection.hpp"
#include "ssdm/weights.hpp"

namespace {

const ssdm::KernelSpec kEpan{ssdm::KernelFamily::Epanechnikov};

ssdm::SpatialDataset random_locations_x(Eigen::Index n, Eigen::Index p,
                                        std::uint64_t seed) {
    ssdm::Rng rng(seed, 0);
    ssdm::SpatialDataset data;
    data.locations.resize(n, 2);
    data.x.resize(n, p);
    data.y = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        data.locations(i, 0) = rng.next_uniform();
        data.locations(i, 1) = rng.next_uniform();
        for (Eigen::Index j = 0; j < p; ++j) data.x(i, j) = rng.next_normal();
    }
    return data;
}

// Spatial-autoregressive response y = (I - alpha W)^-1 (m + eps) with a
// smooth location-varying signal m.
ssdm::SpatialDataset sar_data(Eigen::Index n, double alpha,
                              const ssdm::WeightMatrix*& w_out,
                              std::uint64_t seed) {
    static std::vector<ssdm::WeightMatrix> keep; // owns the weight matrices
    ssdm::SpatialDataset data = random_locations_x(n, 2, seed);
    keep.push_back(ssdm::build_exp_decay_weights(data.locations));
    const ssdm::WeightMatrix& w = keep.back();

    ssdm::Rng rng(seed, 1);
    Eigen::VectorXd m(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = data.locations(i, 0);
        const double v = data.locations(i, 1);
        const double r2 = u * u + v * v;
        m(i) = data.x(i, 0) * std::sin(M_PI * r2) +
               data.x(i, 1) * std::cos(M_PI * r2);
    }
    Eigen::VectorXd eps(n);
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = rng.next_normal();

    const Eigen::MatrixXd a =
        Eigen::MatrixXd::Identity(n, n) - alpha * w.entries();
    data.y = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(m + eps);
    w_out = &w;
    return data;
}

Eigen::MatrixXd fixed4x4() {
    Eigen::MatrixXd w(4, 4);
    w << 0.00, 0.30, 0.20, 0.10, //
        0.25, 0.00, 0.15, 0.05,  //
        0.10, 0.20, 0.00, 0.30,  //
        0.05, 0.10, 0.40, 0.00;
    return w;
}

} // namespace

TEST_CASE("log-determinant via the spectrum matches LU factorization") {
    for (int instance = 0; instance < 20; ++instance) {
        const ssdm::SpatialDataset data =
            random_locations_x(12, 1, 100 + static_cast<std::uint64_t>(instance));
        const ssdm::WeightMatrix w =
            ssdm::build_exp_decay_weights(data.locations);
        ssdm::Rng rng(7, static_cast<std::uint64_t>(instance));
        const auto [lo, hi] = w.alpha_interval();
        for (int k = 0; k < 5; ++k) {
            const double alpha = lo + (hi - lo) * rng.next_uniform();
            const double via_spectrum = ssdm::logdet_a(alpha, w.spectrum());
            const double via_lu = ssdm::logdet_a_lu(alpha, w.entries());
            CHECK(std::abs(via_spectrum - via_lu) < 1e-8);
        }
    }
}

TEST_CASE("log-determinant of a fixed instance") {
    const ssdm::WeightMatrix w = ssdm::load_weights(fixed4x4());
    // Frozen from an independent slogdet computation of I - 0.37 W.
    CHECK(std::abs(ssdm::logdet_a(0.37, w.spectrum()) -
                   (-0.03719787058520911)) < 1e-13);
    CHECK(std::abs(ssdm::logdet_a_lu(0.37, w.entries()) -
                   (-0.03719787058520911)) < 1e-13);
}

TEST_CASE("profile maximizer beats a fine grid scan") {
    const ssdm::WeightMatrix* w = nullptr;
    const ssdm::SpatialDataset data = sar_data(120, 0.5, w, 2024);
    const ssdm::SmootherCache cache =
        ssdm::build_smoother_cache(data, *w, 0.5, kEpan);
    const auto interval = w->alpha_interval();

    const ssdm::AlphaMax am =
        ssdm::maximize_alpha(cache, w->spectrum(), interval);
    CHECK_FALSE(am.at_boundary);
    CHECK(std::abs(ssdm::concentrated_loglik(am.alpha, cache, w->spectrum()) -
                   am.value) < 1e-10);

    double best = -1e300;
    for (int k = 0; k <= 20000; ++k) {
        const double alpha =
            interval.first +
            (interval.second - interval.first) * (k / 20000.0);
        best = std::max(best,
                        ssdm::concentrated_loglik(alpha, cache, w->spectrum()));
    }
    CHECK(am.value >= best - 1e-9);
    // The estimate should land near the generating value at this sample size.
    CHECK(std::abs(am.alpha - 0.5) < 0.2);
}

TEST_CASE("a narrow admissible interval flags the boundary") {
    const ssdm::WeightMatrix* w = nullptr;
    const ssdm::SpatialDataset data = sar_data(100, 0.5, w, 31);
    const ssdm::SmootherCache cache =
        ssdm::build_smoother_cache(data, *w, 0.5, kEpan);
    const ssdm::AlphaMax am =
        ssdm::maximize_alpha(cache, w->spectrum(), {-0.05, 0.05});
    CHECK(am.at_boundary);
    CHECK(std::abs(am.alpha - 0.05) < 1e-9);
}

TEST_CASE("zero weights give alpha = 0 exactly") {
    ssdm::SpatialDataset data = random_locations_x(80, 2, 5);
    ssdm::Rng rng(5, 9);
    for (Eigen::Index i = 0; i < data.n(); ++i) data.y(i) = rng.next_normal();
    const ssdm::WeightMatrix w =
        ssdm::load_weights(Eigen::MatrixXd::Zero(80, 80));

    ssdm::BandwidthPolicy bw;
    bw.h = 0.5;
    bw.h1 = 0.75;
    const ssdm::FitResult fit = ssdm::estimate(data, w, bw, {}, kEpan);
    CHECK(fit.alpha_hat == 0.0);
    CHECK(fit.logdet_a == 0.0);
}

TEST_CASE("all-constant model with zero weights degenerates to least squares") {
    const Eigen::Index n = 90, p = 2;
    ssdm::SpatialDataset data = random_locations_x(n, p, 12);

    // Noise orthogonal to the span of [X, X.u, X.v]: at a bandwidth far
    // beyond the location range every local fit becomes this global
    // regression, so the orthogonality makes the degeneration exact.
    Eigen::MatrixXd design(n, 3 * p);
    for (Eigen::Index j = 0; j < p; ++j) {
        design.col(3 * j + 0) = data.x.col(j);
        design.col(3 * j + 1) =
            data.x.col(j).cwiseProduct(data.locations.col(0));
        design.col(3 * j + 2) =
            data.x.col(j).cwiseProduct(data.locations.col(1));
    }
    ssdm::Rng rng(12, 4);
    Eigen::VectorXd eps(n);
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = rng.next_normal();
    const Eigen::VectorXd fitted =
        design * design.colPivHouseholderQr().solve(eps);
    eps -= fitted;
    eps *= 0.5 / eps.norm() * std::sqrt(static_cast<double>(n));

    Eigen::VectorXd beta_true(p);
    beta_true << 2.0, -1.0;
    data.y = data.x * beta_true + eps;

    const ssdm::WeightMatrix w =
        ssdm::load_weights(Eigen::MatrixXd::Zero(n, n));
    ssdm::BandwidthPolicy bw;
    bw.h = 1.0e4;
    bw.h1 = 2.0e4;
    ssdm::ModelSpec all_const;
    all_const.constant_indices = {1, 2};
    const ssdm::FitResult fit =
        ssdm::estimate(data, w, bw, all_const, kEpan);

    CHECK(fit.alpha_hat == 0.0);
    const Eigen::VectorXd ols =
        data.x.colPivHouseholderQr().solve(data.y);
    CHECK(std::abs(fit.beta_const.at(1) - ols(0)) < 1e-6);
    CHECK(std::abs(fit.beta_const.at(2) - ols(1)) < 1e-6);
    const double rss_ols = (data.y - data.x * ols).squaredNorm();
    CHECK(std::abs(fit.sigma2_hat - rss_ols / static_cast<double>(n)) < 1e-6);
    // Constant columns of the surface are filled with the common value.
    for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(fit.beta_surface(i, 0) == fit.beta_const.at(1));
        CHECK(fit.beta_surface(i, 1) == fit.beta_const.at(2));
    }
}

TEST_CASE("response scaling leaves alpha invariant and scales the rest") {
    const ssdm::WeightMatrix* w = nullptr;
    ssdm::SpatialDataset data = sar_data(100, 0.4, w, 88);
    ssdm::BandwidthPolicy bw;
    bw.h = 0.45;
    bw.h1 = 0.65;
    const ssdm::FitResult base = ssdm::estimate(data, *w, bw, {}, kEpan);

    ssdm::SpatialDataset scaled = data;
    scaled.y *= 3.0;
    const ssdm::FitResult thrice = ssdm::estimate(scaled, *w, bw, {}, kEpan);

    CHECK(std::abs(base.alpha_hat - thrice.alpha_hat) < 1e-9);
    CHECK(std::abs(thrice.sigma2_hat - 9.0 * base.sigma2_hat) <=
          1e-9 * base.sigma2_hat * 9.0);
    CHECK((thrice.beta_surface - 3.0 * base.beta_surface)
              .cwiseAbs()
              .maxCoeff() < 1e-8);
    CHECK((thrice.residuals - 3.0 * base.residuals).cwiseAbs().maxCoeff() <
          1e-8);
}

TEST_CASE("relabeling observations permutes the fit") {
    const ssdm::WeightMatrix* w = nullptr;
    ssdm::SpatialDataset data = sar_data(70, 0.4, w, 64);
    ssdm::BandwidthPolicy bw;
    bw.h = 0.5;
    bw.h1 = 0.75;
    const ssdm::FitResult base = ssdm::estimate(data, *w, bw, {}, kEpan);

    const Eigen::Index n = data.n();
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    // Deterministic shuffle.
    ssdm::Rng rng(3, 3);
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(
            rng.next_uniform() * static_cast<double>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(j)]);
    }

    ssdm::SpatialDataset shuffled;
    shuffled.locations.resize(n, 2);
    shuffled.x.resize(n, data.p());
    shuffled.y.resize(n);
    Eigen::MatrixXd wperm(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        shuffled.locations.row(i) = data.locations.row(perm[i]);
        shuffled.x.row(i) = data.x.row(perm[i]);
        shuffled.y(i) = data.y(perm[i]);
        for (Eigen::Index j = 0; j < n; ++j) {
            wperm(i, j) = w->entries()(perm[i], perm[j]);
        }
    }
    const ssdm::WeightMatrix w2 = ssdm::load_weights(std::move(wperm));
    const ssdm::FitResult moved = ssdm::estimate(shuffled, w2, bw, {}, kEpan);

    CHECK(std::abs(base.alpha_hat - moved.alpha_hat) < 1e-8);
    CHECK(std::abs(base.sigma2_hat - moved.sigma2_hat) <=
          1e-8 * base.sigma2_hat);
    for (Eigen::Index i = 0; i < n; ++i) {
        CHECK((moved.beta_surface.row(i) - base.beta_surface.row(perm[i]))
                  .cwiseAbs()
                  .maxCoeff() < 1e-7);
    }
}

TEST_CASE("normal-theory standard errors are produced") {
    const ssdm::WeightMatrix* w = nullptr;
    const ssdm::SpatialDataset data = sar_data(100, 0.5, w, 404);
    ssdm::BandwidthPolicy bw;
    bw.h = 0.45;
    bw.h1 = 0.65;
    const ssdm::FitResult fit =
        ssdm::estimate(data, *w, bw, {}, kEpan, ssdm::SeMode::Normal);
    REQUIRE(fit.se_alpha.has_value());
    CHECK(*fit.se_alpha > 0.0);
    CHECK(*fit.se_alpha < 1.0);
    REQUIRE(fit.se_sigma2.has_value());
    CHECK(*fit.se_sigma2 > 0.0);
    REQUIRE(fit.beta_se_surface.has_value());
    CHECK(fit.beta_se_surface->rows() == data.n());
    CHECK(fit.beta_se_surface->cols() == data.p());
    CHECK(fit.beta_se_surface->minCoeff() > 0.0);

    // The sandwich variant also runs and produces positive spreads.
    const ssdm::FitResult sw =
        ssdm::estimate(data, *w, bw, {}, kEpan, ssdm::SeMode::Sandwich);
    REQUIRE(sw.se_sigma2.has_value());
    CHECK(*sw.se_sigma2 > 0.0);
}

TEST_CASE("zero weights suppress the alpha standard error") {
    ssdm::SpatialDataset data = random_locations_x(80, 2, 6);
    ssdm::Rng rng(6, 2);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        data.y(i) = data.x(i, 0) + rng.next_normal();
    }
    const ssdm::WeightMatrix w =
        ssdm::load_weights(Eigen::MatrixXd::Zero(80, 80));
    ssdm::BandwidthPolicy bw;
    bw.h = 0.5;
    bw.h1 = 0.75;
    const ssdm::FitResult fit =
        ssdm::estimate(data, w, bw, {}, kEpan, ssdm::SeMode::Normal);
    CHECK_FALSE(fit.se_alpha.has_value());
    REQUIRE(fit.se_sigma2.has_value());
    CHECK(std::abs(*fit.se_sigma2 -
                   fit.sigma2_hat * std::sqrt(2.0 / 80.0)) < 1e-12);
    bool warned = false;
    for (const std::string& msg : fit.warnings) {
        if (msg.find("se_alpha is unavailable") != std::string::npos) {
            warned = true;
        }
    }
    CHECK(warned);
}

TEST_CASE("estimate validates its inputs") {
    const ssdm::WeightMatrix* w = nullptr;
    const ssdm::SpatialDataset data = sar_data(60, 0.3, w, 9);

    ssdm::BandwidthPolicy inverted;
    inverted.h = 0.6;
    inverted.h1 = 0.4; // must exceed h
    CHECK_THROWS_AS(ssdm::estimate(data, *w, inverted, {}, kEpan),
                    ssdm::DataError);

    ssdm::BandwidthPolicy unset; // h missing entirely
    CHECK_THROWS_AS(ssdm::estimate(data, *w, unset, {}, kEpan),
                    ssdm::DataError);

    ssdm::BandwidthPolicy bw;
    bw.h = 0.5;
    bw.h1 = 0.75;
    ssdm::ModelSpec out_of_range;
    out_of_range.constant_indices = {7};
    CHECK_THROWS_AS(ssdm::estimate(data, *w, bw, out_of_range, kEpan),
                    ssdm::DataError);

    const ssdm::WeightMatrix small =
        ssdm::load_weights(Eigen::MatrixXd::Zero(10, 10));
    CHECK_THROWS_AS(ssdm::estimate(data, small, bw, {}, kEpan),
                    ssdm::DataError);
}

TEST_CASE("fit carries its provenance") {
    const ssdm::WeightMatrix* w = nullptr;
    const ssdm::SpatialDataset data = sar_data(80, 0.4, w, 314);
    ssdm::BandwidthPolicy bw;
    bw.h = 0.5; // h1 defaults to 1.5 h
    const ssdm::FitResult fit = ssdm::estimate(data, *w, bw, {}, kEpan);
    CHECK(fit.n == 80);
    CHECK(fit.p == 2);
    CHECK(fit.h == 0.5);
    CHECK(fit.h1 == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(fit.kernel == ssdm::KernelFamily::Epanechnikov);
    CHECK(fit.alpha_interval == w->alpha_interval());
    CHECK(fit.n_effective_params ==
          ssdm::effective_params(2, 0, kEpan, fit.h));
    // sigma~^2 at the estimated alpha matches the cache quadratic.
    const ssdm::SmootherCache cache =
        ssdm::build_smoother_cache(data, *w, fit.h, kEpan);
    CHECK(std::abs(fit.sigma2_hat -
                   ssdm::sigma_tilde2(cache, fit.alpha_hat)) <=
          1e-10 * fit.sigma2_hat);
}

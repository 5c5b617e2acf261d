#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "ssdm/errors.hpp"
#include "ssdm/weights.hpp"

namespace {

Eigen::MatrixXd fixed4x4() {
    Eigen::MatrixXd w(4, 4);
    w << 0.00, 0.30, 0.20, 0.10, //
        0.25, 0.00, 0.15, 0.05,  //
        0.10, 0.20, 0.00, 0.30,  //
        0.05, 0.10, 0.40, 0.00;
    return w;
}

} // namespace

TEST_CASE("two points weight each other fully") {
    Eigen::MatrixXd loc(2, 2);
    loc << 0.0, 0.0, 0.3, 0.4;
    const ssdm::WeightMatrix w = ssdm::build_exp_decay_weights(loc);
    CHECK(w.n() == 2);
    CHECK(w.entries()(0, 0) == 0.0);
    CHECK(w.entries()(1, 1) == 0.0);
    CHECK(w.entries()(0, 1) == 1.0);
    CHECK(w.entries()(1, 0) == 1.0);
    CHECK(w.row_stochastic());
    CHECK_FALSE(w.is_zero());

    // Eigenvalues of [[0,1],[1,0]] are -1 and 1.
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < 2; ++i) {
        CHECK(std::abs(w.spectrum()(i).imag()) < 1e-14);
        ev.push_back(w.spectrum()(i).real());
    }
    std::sort(ev.begin(), ev.end());
    CHECK(std::abs(ev[0] + 1.0) < 1e-14);
    CHECK(std::abs(ev[1] - 1.0) < 1e-14);
    CHECK(std::abs(w.spectral_radius() - 1.0) < 1e-14);

    const auto [lo, hi] = w.alpha_interval();
    CHECK(lo == doctest::Approx(-0.999).epsilon(1e-12));
    CHECK(hi == doctest::Approx(0.999).epsilon(1e-12));
}

TEST_CASE("equidistant points share weight equally") {
    Eigen::MatrixXd loc(3, 2);
    loc << 0.0, 0.0, 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0;
    const ssdm::WeightMatrix w = ssdm::build_exp_decay_weights(loc);
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
            if (i == j) {
                CHECK(w.entries()(i, j) == 0.0);
            } else {
                CHECK(std::abs(w.entries()(i, j) - 0.5) < 1e-14);
            }
        }
    }
}

TEST_CASE("exponential decay favors the nearer point") {
    // Collinear points at 0, 1, 2: from the first point the neighbors sit at
    // distances 1 and 2, so its row is (e^-1, e^-2) normalized.
    Eigen::MatrixXd loc(3, 2);
    loc << 0.0, 0.0, 1.0, 0.0, 2.0, 0.0;
    const ssdm::WeightMatrix w = ssdm::build_exp_decay_weights(loc);
    CHECK(std::abs(w.entries()(0, 1) - 0.7310585786300049) < 1e-14);
    CHECK(std::abs(w.entries()(0, 2) - 0.2689414213699951) < 1e-14);
    // The middle point is equidistant from both ends.
    CHECK(std::abs(w.entries()(1, 0) - 0.5) < 1e-14);
    CHECK(std::abs(w.entries()(1, 2) - 0.5) < 1e-14);
    // Rows normalize to one.
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(std::abs(w.entries().row(i).sum() - 1.0) < 1e-14);
    }
    CHECK(w.row_stochastic());
}

TEST_CASE("exp-decay construction guards") {
    CHECK_THROWS_AS(ssdm::build_exp_decay_weights(Eigen::MatrixXd::Zero(1, 2)),
                    ssdm::DataError);
    CHECK_THROWS_AS(ssdm::build_exp_decay_weights(Eigen::MatrixXd::Zero(5, 3)),
                    ssdm::DataError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(4, 2);
    bad(2, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(ssdm::build_exp_decay_weights(bad), ssdm::DataError);
}

TEST_CASE("load_weights guards") {
    CHECK_THROWS_AS(ssdm::load_weights(Eigen::MatrixXd::Zero(3, 4)),
                    ssdm::DataError);

    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(3, 3);
    diag(1, 1) = 0.2;
    CHECK_THROWS_AS(ssdm::load_weights(diag), ssdm::DataError);

    Eigen::MatrixXd inf = Eigen::MatrixXd::Zero(3, 3);
    inf(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(ssdm::load_weights(inf), ssdm::DataError);
}

TEST_CASE("dense size guard rejects oversized matrices unless allowed") {
    const Eigen::Index n = 4097; // one past the guard
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n, n);
    CHECK_THROWS_AS(ssdm::load_weights(big), ssdm::DataError);
    const ssdm::WeightMatrix w = ssdm::load_weights(std::move(big), true);
    CHECK(w.n() == n);
}

TEST_CASE("zero matrix is flagged and spans a wide interval") {
    const ssdm::WeightMatrix w =
        ssdm::load_weights(Eigen::MatrixXd::Zero(5, 5));
    CHECK(w.is_zero());
    const auto [lo, hi] = w.alpha_interval();
    CHECK(lo == -10.0);
    CHECK(hi == 10.0);
}

TEST_CASE("spectral radius and interval of a fixed matrix") {
    const ssdm::WeightMatrix w = ssdm::load_weights(fixed4x4());
    CHECK_FALSE(w.row_stochastic());
    // Frozen from an independent eigenvalue computation.
    CHECK(std::abs(w.spectral_radius() - 0.5491259694054371) < 1e-12);
    const auto [lo, hi] = w.alpha_interval();
    const double bound = 1.8192546986653377; // (1 - 1e-3) / radius
    CHECK(std::abs(hi - bound) < 1e-12);
    CHECK(std::abs(lo + bound) < 1e-12);
}

TEST_CASE("spectrum is computed once and cached") {
    const ssdm::WeightMatrix w = ssdm::load_weights(fixed4x4());
    const Eigen::VectorXcd* first = &w.spectrum();
    const Eigen::VectorXcd* second = &w.spectrum();
    CHECK(first == second);
}

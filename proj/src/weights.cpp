#include "ssdm/weights.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ssdm/errors.hpp"

namespace ssdm {

namespace {

void check_dense_size(Eigen::Index n, bool allow_large) {
    if (n > kMaxDenseWeights && !allow_large) {
        throw DataError("weights: dense weight matrix of size n=" +
                        std::to_string(n) + " exceeds the n<=" +
                        std::to_string(kMaxDenseWeights) +
                        " guard; pass --dense-ok to override");
    }
}

bool detect_row_stochastic(const Eigen::MatrixXd& w) {
    if ((w.array() < -1e-12).any()) return false;
    const Eigen::VectorXd row_sums = w.rowwise().sum();
    return (row_sums.array() - 1.0).abs().maxCoeff() <= 1e-8;
}

} // namespace

WeightMatrix::WeightMatrix(Eigen::MatrixXd entries, bool row_stochastic)
    : entries_(std::move(entries)),
      row_stochastic_(row_stochastic),
      zero_(entries_.size() == 0 || entries_.cwiseAbs().maxCoeff() == 0.0),
      cache_(std::make_shared<SpectrumCache>()) {}

const Eigen::VectorXcd& WeightMatrix::spectrum() const {
    std::call_once(cache_->once, [this] {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(entries_, false);
        if (solver.info() != Eigen::Success) {
            throw NumericError(
                "weights: eigensolver failed to converge on W; the profile "
                "can still run via the LU log-determinant path");
        }
        cache_->values = solver.eigenvalues();
    });
    return *cache_->values;
}

double WeightMatrix::spectral_radius() const {
    if (zero_) return 0.0;
    return spectrum().cwiseAbs().maxCoeff();
}

std::pair<double, double> WeightMatrix::alpha_interval(double delta) const {
    constexpr double kClamp = 10.0;
    if (zero_) return {-kClamp, kClamp};
    if (row_stochastic_) return {-1.0 + delta, 1.0 - delta};
    const double rho = spectral_radius();
    if (rho == 0.0) return {-kClamp, kClamp};
    const double bound = std::min((1.0 - delta) / rho, kClamp);
    return {-bound, bound};
}

WeightMatrix build_exp_decay_weights(const Eigen::MatrixXd& locations,
                                     bool allow_large) {
    const Eigen::Index n = locations.rows();
    if (locations.cols() != 2) {
        throw DataError("weights: locations must have exactly 2 columns");
    }
    if (n < 2) {
        throw DataError("weights: exponential-decay weights need n >= 2 "
                        "(row normalizer is empty at n=1)");
    }
    if (!locations.allFinite()) {
        throw DataError("weights: locations contain non-finite values");
    }
    check_dense_size(n, allow_large);

    Eigen::MatrixXd w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                w(i, j) = 0.0;
                continue;
            }
            const double du = locations(i, 0) - locations(j, 0);
            const double dv = locations(i, 1) - locations(j, 1);
            w(i, j) = std::exp(-std::sqrt(du * du + dv * dv));
        }
        w.row(i) /= w.row(i).sum();
    }
    return WeightMatrix(std::move(w), /*row_stochastic=*/true);
}

WeightMatrix load_weights(Eigen::MatrixXd entries, bool allow_large) {
    if (entries.rows() != entries.cols()) {
        throw DataError("weights: matrix is not square (" +
                        std::to_string(entries.rows()) + "x" +
                        std::to_string(entries.cols()) + ")");
    }
    if (!entries.allFinite()) {
        throw DataError("weights: matrix contains non-finite values");
    }
    check_dense_size(entries.rows(), allow_large);
    for (Eigen::Index i = 0; i < entries.rows(); ++i) {
        if (entries(i, i) != 0.0) {
            throw DataError("weights: nonzero diagonal entry w_" +
                            std::to_string(i + 1) + "," + std::to_string(i + 1) +
                            " (self-neighboring is not allowed)");
        }
    }
    const bool rs = detect_row_stochastic(entries);
    return WeightMatrix(std::move(entries), rs);
}

} // namespace ssdm

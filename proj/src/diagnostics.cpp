#include "ssdm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ssdm/errors.hpp"

namespace ssdm {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;

} // namespace

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) {
        throw DataError("normal quantile requires a probability in (0, 1)");
    }
    // Acklam's rational approximation in three regimes.
    static constexpr double a[] = {-3.969683028665376e+01,
                                   2.209460984245205e+02,
                                   -2.759285104469687e+02,
                                   1.383577518672690e+02,
                                   -3.066479806614716e+01,
                                   2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01,
                                   1.615858368580409e+02,
                                   -1.556989798598866e+02,
                                   6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03,
                                   -3.223964580411365e-01,
                                   -2.400758277161838e+00,
                                   -2.549732539343734e+00,
                                   4.374664141464968e+00,
                                   2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03,
                                   3.224671290700398e-01,
                                   2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (prob < p_low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - p_low) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
             a[5]) *
            q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r +
             1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
              c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the exact CDF brings the result to full
    // double precision.
    const double e = 0.5 * std::erfc(-x / kSqrt2) - prob;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

DiagnosticsReport residual_diagnostics(const Eigen::VectorXd& residuals,
                                       int lags) {
    const Eigen::Index n = residuals.size();
    if (n < 8) {
        throw DataError("residual diagnostics need at least 8 observations");
    }
    if (!residuals.allFinite()) {
        throw DataError("residuals contain non-finite values");
    }
    if (lags <= 0) {
        lags = static_cast<int>(std::min<Eigen::Index>(40, n / 4));
    }
    if (lags >= n) {
        throw DataError("lag count must be smaller than the sample size");
    }

    const double nd = static_cast<double>(n);
    const double mean = residuals.mean();
    const Eigen::VectorXd centered = residuals.array() - mean;
    const double gamma0 = centered.squaredNorm() / nd;
    if (!(gamma0 > 0.0)) {
        throw DataError("residuals are constant; diagnostics are undefined");
    }

    DiagnosticsReport report;
    report.residuals = residuals;
    report.lags = lags;
    report.band = 1.96 / std::sqrt(nd);
    report.ordering_note =
        "acf/pacf follow the dataset row order; for spatial data this "
        "sequencing is heuristic";

    report.acf.resize(lags);
    for (int k = 1; k <= lags; ++k) {
        const double gk =
            (centered.head(n - k).array() * centered.tail(n - k).array())
                .sum() /
            nd;
        report.acf(k - 1) = gk / gamma0;
    }

    // Durbin-Levinson: phi[k][k] from the autocorrelations.
    report.pacf.resize(lags);
    std::vector<double> phi_prev(static_cast<std::size_t>(lags) + 1, 0.0);
    std::vector<double> phi_cur(static_cast<std::size_t>(lags) + 1, 0.0);
    report.pacf(0) = report.acf(0);
    phi_prev[1] = report.acf(0);
    for (int k = 2; k <= lags; ++k) {
        double num = report.acf(k - 1);
        double den = 1.0;
        for (int j = 1; j < k; ++j) {
            num -= phi_prev[static_cast<std::size_t>(j)] *
                   report.acf(k - j - 1);
            den -= phi_prev[static_cast<std::size_t>(j)] * report.acf(j - 1);
        }
        if (std::abs(den) < 1e-14) {
            throw NumericError(
                "partial autocorrelation recursion is degenerate at lag " +
                std::to_string(k));
        }
        const double phikk = num / den;
        for (int j = 1; j < k; ++j) {
            phi_cur[static_cast<std::size_t>(j)] =
                phi_prev[static_cast<std::size_t>(j)] -
                phikk * phi_prev[static_cast<std::size_t>(k - j)];
        }
        phi_cur[static_cast<std::size_t>(k)] = phikk;
        report.pacf(k - 1) = phikk;
        std::swap(phi_prev, phi_cur);
    }

    const double sd = std::sqrt(gamma0);
    std::vector<double> standardized(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        standardized[static_cast<std::size_t>(i)] = centered(i) / sd;
    }
    std::sort(standardized.begin(), standardized.end());
    report.qq_theoretical.resize(n);
    report.qq_sample.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        report.qq_theoretical(i) =
            normal_quantile((static_cast<double>(i) + 0.5) / nd);
        report.qq_sample(i) = standardized[static_cast<std::size_t>(i)];
    }
    return report;
}

DiagnosticsReport residual_diagnostics(const FitResult& fit, int lags) {
    if (fit.residuals.size() == 0) {
        throw DataError("fit carries no residuals");
    }
    return residual_diagnostics(fit.residuals, lags);
}

} // namespace ssdm

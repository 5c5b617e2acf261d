#pragma once

#include <string>

#include <Eigen/Dense>

#include "ssdm/profile.hpp"

namespace ssdm {

// Inverse standard-normal CDF (rational approximation with one Halley
// refinement; absolute error well below 1e-12 on (0, 1)).
double normal_quantile(double prob);

struct DiagnosticsReport {
    Eigen::VectorXd residuals;      // as supplied, file order
    Eigen::VectorXd qq_theoretical; // quantiles at (i - 0.5)/n, ascending
    Eigen::VectorXd qq_sample;      // sorted standardized residuals
    Eigen::VectorXd acf;            // lags 1..L
    Eigen::VectorXd pacf;           // lags 1..L
    int lags = 0;
    double band = 0.0; // +-1.96/sqrt(n) reference band for ACF/PACF
    // The series order behind ACF/PACF is the dataset row order; for
    // spatial data this is a heuristic and the note says so.
    std::string ordering_note;
};

// lags <= 0 selects the default min(40, n/4). ACF uses the biased (1/n)
// mean-corrected estimator (positive semidefinite); PACF comes from the
// Durbin-Levinson recursion on it; QQ standardizes by the same variance.
DiagnosticsReport residual_diagnostics(const Eigen::VectorXd& residuals,
                                       int lags = 0);
DiagnosticsReport residual_diagnostics(const FitResult& fit, int lags = 0);

} // namespace ssdm

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ssdm/dataset.hpp"
#include "ssdm/kernels.hpp"
#include "ssdm/weights.hpp"

namespace ssdm {

// One local-linear fit at a target location: the level a = beta~(s) and the
// slope matrix B (row j = gradient of component j in (u, v)).
struct LocalFit {
    Eigen::VectorXd a;            // p
    Eigen::MatrixXd b;            // p x 2
    double effective_weight_count = 0.0; // sum of kernel weights at the target
    std::size_t support = 0;      // observations with nonzero weight
};

LocalFit local_linear_fit(const SpatialDataset& data,
                          const Eigen::VectorXd& ystar, double su, double sv,
                          double h, const KernelSpec& kernel);

// Row i of S maps a working response v to X_i' * (level of the local fit at
// s_i on v); hence m~ = S * (A y).
Eigen::MatrixXd smoother_matrix(const SpatialDataset& data, double h,
                                const KernelSpec& kernel, int threads = 1);

// Level estimates at every sample location for a fixed working response:
// row i = beta~(s_i)' applied to ystar. Same per-target systems as
// smoother_matrix, composed with ystar instead of X_i.
Eigen::MatrixXd surface_levels(const SpatialDataset& data,
                               const Eigen::VectorXd& ystar, double h,
                               const KernelSpec& kernel, int threads = 1);

// Per-component level smoothers T_j (p matrices, each n x n): row i of T_j
// maps a working response to the j-th level estimate at s_i. Used by the
// strict selection mode, where constant-averaged smoothers are needed as
// linear operators. Memory is p * n^2 doubles.
std::vector<Eigen::MatrixXd> component_smoothers(const SpatialDataset& data,
                                                 double h,
                                                 const KernelSpec& kernel,
                                                 int threads = 1);

// Coefficients of the residual quadratic: with r0 = (I-S)y, r1 = (I-S)(Wy),
// n sigma~^2(alpha) = c0 - 2 alpha c1 + alpha^2 c2 identically in alpha.
struct ProjectionQuadratic {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    Eigen::VectorXd r0;
    Eigen::VectorXd r1;
};

ProjectionQuadratic projection_quadratic(const Eigen::MatrixXd& s,
                                         const WeightMatrix& w,
                                         const Eigen::VectorXd& y);

// Everything the profile stage reuses across the whole alpha grid.
struct SmootherCache {
    double h = 0.0;
    Eigen::MatrixXd s;   // n x n
    Eigen::VectorXd wy;  // W y
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    Eigen::VectorXd r0;  // (I-S) y
    Eigen::VectorXd r1;  // (I-S) W y
};

SmootherCache build_smoother_cache(const SpatialDataset& data,
                                   const WeightMatrix& w, double h,
                                   const KernelSpec& kernel, int threads = 1);

} // namespace ssdm

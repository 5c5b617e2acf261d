#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssdm/dataset.hpp"
#include "ssdm/profile.hpp"
#include "ssdm/selection.hpp"
#include "ssdm/weights.hpp"

namespace ssdm {

// Named coefficient surfaces over the unit square (argument r = pi |s|^2
// where noted).
enum class BetaFunction {
    SinPiNorm2,  // sin(pi (u^2 + v^2))
    CosPiNorm2,  // cos(pi (u^2 + v^2))
    ExpNorm2,    // exp(u^2 + v^2)
    Sin2PiNorm2, // sin^2(pi (u^2 + v^2))
    Constant,    // value
};

struct BetaDescriptor {
    BetaFunction kind = BetaFunction::Constant;
    double value = 1.0; // used by Constant only
};

double beta_value(const BetaDescriptor& desc, double u, double v);
std::string beta_descriptor_name(const BetaDescriptor& desc);

struct DgpConfig {
    Eigen::Index n = 0;
    Eigen::Index p = 0; // must equal beta.size()
    double alpha = 0.5;
    double sigma2 = 1.0;
    std::vector<BetaDescriptor> beta;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0; // substream id (replication-specific)

    // The two simulation designs: p = 3 with (sin, cos, exp) surfaces, and
    // p = 5 adding sin^2 and the constant 1.
    static DgpConfig example1(Eigen::Index n, std::uint64_t seed);
    static DgpConfig example2(Eigen::Index n, std::uint64_t seed);
};

struct GeneratedData {
    SpatialDataset data;
    WeightMatrix w;
    Eigen::MatrixXd true_beta; // n x p surface values at the sample sites
    Eigen::VectorXd noise;     // the generated epsilon (kept for checks)
};

// Draw order is fixed (locations, then X row-major, then noise) so a
// (seed, stream) pair fully determines the dataset.
GeneratedData generate(const DgpConfig& config);

// Deterministic substream id for replication r at sample size n.
std::uint64_t replication_stream(Eigen::Index n, int rep);

struct MonteCarloReport {
    int table = 0; // 1 (estimation metrics) or 2 (selection ratios)
    Eigen::Index n = 0;
    int requested_reps = 0;
    int reps = 0; // successful replications
    int failures = 0;
    std::vector<std::string> failure_messages;

    double alpha_true = 0.0;
    double sigma2_true = 0.0;

    // Table-1 metrics (averages over successful replications).
    double mse_alpha = 0.0;
    double mse_sigma2 = 0.0;
    std::vector<double> mise_beta; // one entry per coefficient
    double h = 0.0;
    double h1 = 0.0;

    // Table-2 tallies: chosen model string -> count; counts sum to reps.
    std::map<std::string, int> selection_counts;
    std::string criterion;
    std::string algorithm;
    double sel_h = 0.0; // 0 = per-dataset criterion default

    // Median-performance replication (table 1 only): the replication whose
    // summed error metrics sit at the lower median, re-fitted for export.
    int median_rep = -1;
    FitResult median_run;
    Eigen::MatrixXd median_locations; // n x 2
    Eigen::MatrixXd median_true_beta; // n x p
};

// One report per n: Example-1 data, fully functional fit at the given
// bandwidths, MSE/MISE metrics and the median-performance run. Replication
// failures are recorded; more than 5% of them aborts with an error.
std::vector<MonteCarloReport> run_table1(const std::vector<Eigen::Index>& n_list,
                                         int reps, const BandwidthPolicy& bw,
                                         std::uint64_t seed,
                                         const KernelSpec& kernel = {},
                                         int threads = 1);

// One report per n: Example-2 data, the chosen criterion/algorithm per
// replication, tallied chosen models. bw.selection_h (absolute or fraction)
// overrides the criterion default bandwidth.
std::vector<MonteCarloReport> run_table2(const std::vector<Eigen::Index>& n_list,
                                         int reps, Criterion criterion,
                                         SelectionAlgorithm algorithm,
                                         std::uint64_t seed,
                                         const BandwidthPolicy& bw = {},
                                         const KernelSpec& kernel = {},
                                         int threads = 1);

} // namespace ssdm

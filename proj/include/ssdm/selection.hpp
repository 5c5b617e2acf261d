#pragma once

#include <string>
#include <vector>

#include "ssdm/profile.hpp"

namespace ssdm {

enum class Criterion { Aic, Bic };
enum class SelectionAlgorithm { BackwardElimination, Ctar };

Criterion criterion_from_name(const std::string& name); // throws DataError
std::string criterion_name(Criterion c);
SelectionAlgorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(SelectionAlgorithm a);

// Effective number of parameters: q constants count 1 each, every functional
// component costs (2 K(0)^2 - nu_star^2) / h^2 constants.
double effective_params(Eigen::Index p, Eigen::Index q,
                        const KernelSpec& kernel, double h);

// Criterion cores on the fit summary (n log sigma^ - log|A^| + RSS/(2 sigma^2)
// + penalty); AIC's penalty is K, BIC's is (log n / 2) K.
double aic_core(double n, double sigma2_hat, double logdet_a, double rss,
                double k_eff);
double bic_core(double n, double sigma2_hat, double logdet_a, double rss,
                double k_eff);

double aic(const FitResult& fit, double k_eff);
double bic(const FitResult& fit, double k_eff);

// Curvature-to-average ratios R_j = (1/beta-bar_j^2) sum_i (beta^_j(s_i) -
// beta-bar_j)^2 from a fully functional fit; beta-bar_j ~ 0 yields +inf
// (component functional by default).
std::vector<double> ctar_ratios(const FitResult& fit);

struct SelectionTraceEntry {
    ModelSpec model;
    double criterion_value = 0.0;
    double loglik = 0.0;
    bool feasible = true;
    std::string error; // set when infeasible
};

struct SelectionResult {
    ModelSpec chosen;
    std::vector<SelectionTraceEntry> trace;
    std::vector<double> ctar_ratios; // empty unless CTAR ran
    Criterion criterion = Criterion::Bic;
    SelectionAlgorithm algorithm = SelectionAlgorithm::BackwardElimination;
    double sel_h = 0.0;
    double alpha_hat = 0.0;  // from the fully functional selection fit
    double sigma2_hat = 0.0; // same
    std::vector<std::string> warnings;
};

struct SelectionOptions {
    bool strict = false; // re-profile alpha per candidate model
    int threads = 1;
};

// Backward elimination (start from the all-constant model; at each step drop
// the constant whose removal maximizes the log-likelihood; stop when the
// criterion of the current model beats the best submodel's).
SelectionResult backward_eliminate(const SpatialDataset& data,
                                   const WeightMatrix& w,
                                   const BandwidthPolicy& bw,
                                   const KernelSpec& kernel,
                                   Criterion criterion,
                                   const SelectionOptions& opts = {});

// CTAR: one functional fit, sort R_j increasingly, evaluate nested models
// k = 0, 1, ... until the criterion first increases; chosen = the model
// just before the increase.
SelectionResult ctar_select(const SpatialDataset& data, const WeightMatrix& w,
                            const BandwidthPolicy& bw,
                            const KernelSpec& kernel, Criterion criterion,
                            const SelectionOptions& opts = {});

// Dispatches on algorithm. Candidate likelihoods are profile likelihoods at
// the policy's fitting bandwidth h (default 0.35 of the location range);
// the selection bandwidth only prices functional components in the
// effective-parameter penalty and defaults to 0.2 of the range for AIC and
// 0.3 for BIC when the policy leaves it unset.
SelectionResult select_components(const SpatialDataset& data,
                                  const WeightMatrix& w,
                                  const BandwidthPolicy& bw,
                                  const KernelSpec& kernel,
                                  Criterion criterion,
                                  SelectionAlgorithm algorithm,
                                  const SelectionOptions& opts = {});

} // namespace ssdm

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ssdm/dataset.hpp"
#include "ssdm/kernels.hpp"
#include "ssdm/locallinear.hpp"
#include "ssdm/weights.hpp"

namespace ssdm {

// Bandwidths of the estimation pipeline. h profiles the parametric part,
// h1 (> h, "slightly larger") produces the final coefficient surfaces,
// selection_h drives model selection. Each value may be given absolutely or
// as a fraction of the location range; resolved() turns fractions into
// absolute values against the larger coordinate span.
struct BandwidthPolicy {
    double h = 0.0;
    double h1 = 0.0;          // <= 0: defaults to 1.5 h at resolution
    double selection_h = 0.0; // <= 0: criterion default at selection time
    bool h_is_fraction = false;
    bool h1_is_fraction = false;
    bool selection_h_is_fraction = false;

    // Validates h1 > h > 0 (and selection_h > 0 when set). Throws DataError.
    BandwidthPolicy resolved(double range) const;
};

// Component indices (1-based, sorted) whose coefficients are treated as
// constant; the empty set is the fully functional model.
struct ModelSpec {
    std::vector<int> constant_indices;

    bool is_constant(int j) const; // 1-based
    std::size_t q() const { return constant_indices.size(); }
    void validate(Eigen::Index p) const; // throws DataError
    std::string to_string() const;       // "{3,5}" or "{}"
};

enum class SeMode { None, Normal, Sandwich };

SeMode se_mode_from_name(const std::string& name); // throws DataError
std::string se_mode_name(SeMode mode);

struct FitResult {
    // Estimates.
    double alpha_hat = 0.0;
    double sigma2_hat = 0.0;
    Eigen::MatrixXd beta_surface;      // n x p (constant columns overwritten)
    std::map<int, double> beta_const;  // j (1-based) -> value, for j in C
    Eigen::VectorXd residuals;         // A^Y - m^ from the final surface

    // Likelihood and criteria.
    double loglik = 0.0;           // full log-likelihood, constant included
    double logdet_a = 0.0;         // log |I - alpha^ W|
    double n_effective_params = 0.0;
    double aic = 0.0;
    double bic = 0.0;

    // Optional standard errors.
    std::optional<double> se_alpha;
    std::optional<double> se_sigma2;
    std::optional<Eigen::MatrixXd> beta_se_surface; // n x p

    // Provenance needed by downstream operations and serialization.
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    double h = 0.0;
    double h1 = 0.0;
    KernelFamily kernel = KernelFamily::Epanechnikov;
    ModelSpec spec;
    SeMode se_mode = SeMode::None;
    std::pair<double, double> alpha_interval{0.0, 0.0};
    std::vector<std::string> warnings;
};

// sigma~^2(alpha) from the cached quadratic; throws NumericError if the
// cache produces a non-positive value (broken cache).
double sigma_tilde2(const SmootherCache& cache, double alpha);

// log|I - alpha W| via the cached spectrum (complex moduli).
double logdet_a(double alpha, const Eigen::VectorXcd& spectrum);

// Brute-force LU evaluation of log|det(I - alpha W)|; oracle for the
// eigenvalue path and the fallback for n beyond the dense-spectrum guard.
double logdet_a_lu(double alpha, const Eigen::MatrixXd& w);

// Concentrated log-likelihood of alpha (Fisher constant dropped):
//   -(n/2) log(sigma~^2(alpha)) + log|I - alpha W|.
double concentrated_loglik(double alpha, const SmootherCache& cache,
                           const Eigen::VectorXcd& spectrum);

struct AlphaMax {
    double alpha = 0.0;
    double value = 0.0;
    bool at_boundary = false;
};

// Uniform grid over the admissible interval, golden-section refinement to
// width 1e-8 around the best grid point, then a safeguarded Newton polish
// (exact derivatives) so the maximizer is reproducible to ~1e-12.
// Grid ties resolve to the candidate with smallest |alpha|, so a flat
// profile (W = 0) yields alpha^ = 0 rather than an endpoint.
AlphaMax maximize_alpha(const SmootherCache& cache,
                        const Eigen::VectorXcd& spectrum,
                        std::pair<double, double> interval,
                        int grid_points = 2001);

// Full estimation pipeline:
//   1. smoother cache at h; alpha^ by profile maximization; sigma^2 from the
//      h-stage cache at alpha^ (not recomputed later);
//   2. coefficient surfaces at h1 applied to A^ y;
//   3. constant components averaged over the sample and overwritten;
//   4. residuals from the final surface, likelihood, K, AIC, BIC;
//   5. optional plug-in standard errors.
FitResult estimate(const SpatialDataset& data, const WeightMatrix& w,
                   const BandwidthPolicy& bw, const ModelSpec& spec,
                   const KernelSpec& kernel, SeMode se_mode = SeMode::None,
                   int threads = 1);

// Plug-in standard errors (Fisher-information form; sandwich when
// assume_normal is false). Rebuilds the h-stage smoother from the fit's
// recorded bandwidth; estimate() uses an internal overload that reuses its
// cache instead.
void standard_errors(FitResult& fit, const SpatialDataset& data,
                     const WeightMatrix& w, bool assume_normal,
                     int threads = 1);

} // namespace ssdm

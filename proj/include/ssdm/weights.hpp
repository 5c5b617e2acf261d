#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace ssdm {

// Spatial weight matrix W with zero diagonal, its (lazily cached) complex
// spectrum, and the open interval of alpha values on which I - alpha*W is
// provably nonsingular. Immutable after construction; safe to share across
// threads (spectrum computation is synchronized compute-once).
class WeightMatrix {
public:
    explicit WeightMatrix(Eigen::MatrixXd entries, bool row_stochastic);

    Eigen::Index n() const { return entries_.rows(); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    bool row_stochastic() const { return row_stochastic_; }
    bool is_zero() const { return zero_; }

    // Eigenvalues of the (generally non-symmetric) real matrix W.
    const Eigen::VectorXcd& spectrum() const;

    double spectral_radius() const;

    // Open interval around 0 on which I - alpha*W is nonsingular:
    //   row-stochastic W -> (-1+delta, 1-delta)
    //   W = 0            -> (-10, 10)
    //   otherwise        -> +-(1-delta)/rho(W), clamped to (-10, 10)
    std::pair<double, double> alpha_interval(double delta = 1e-3) const;

private:
    // The cache lives behind a shared_ptr so WeightMatrix stays movable and
    // copies of the same matrix share one spectrum computation.
    struct SpectrumCache {
        std::once_flag once;
        std::optional<Eigen::VectorXcd> values;
    };

    Eigen::MatrixXd entries_;
    bool row_stochastic_ = false;
    bool zero_ = false;
    std::shared_ptr<SpectrumCache> cache_;
};

// Largest dense W accepted without an explicit override (the profile step
// needs a full spectrum or repeated LU; sizes in scope are small).
inline constexpr Eigen::Index kMaxDenseWeights = 4096;

// Row-normalized exponential-decay weights
//   w_ij = exp(-|s_i - s_j|) / sum_{k != i} exp(-|s_i - s_k|).
// Requires n >= 2 (the normalizer is empty otherwise).
WeightMatrix build_exp_decay_weights(const Eigen::MatrixXd& locations,
                                     bool allow_large = false);

// Validates a user-supplied dense matrix: square, finite, zero diagonal.
// Row-stochasticity is detected and recorded, not required.
WeightMatrix load_weights(Eigen::MatrixXd entries, bool allow_large = false);

} // namespace ssdm

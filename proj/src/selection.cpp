#include "ssdm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "ssdm/errors.hpp"

namespace ssdm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMeanFloor = 1e-12; // |mean| below this => ratio sentinel

} // namespace

Criterion criterion_from_name(const std::string& name) {
    if (name == "aic") return Criterion::Aic;
    if (name == "bic") return Criterion::Bic;
    throw DataError("unknown criterion '" + name + "' (expected aic or bic)");
}

std::string criterion_name(Criterion c) {
    return c == Criterion::Aic ? "aic" : "bic";
}

SelectionAlgorithm algorithm_from_name(const std::string& name) {
    if (name == "backward") return SelectionAlgorithm::BackwardElimination;
    if (name == "ctar") return SelectionAlgorithm::Ctar;
    throw DataError("unknown selection algorithm '" + name +
                    "' (expected backward or ctar)");
}

std::string algorithm_name(SelectionAlgorithm a) {
    return a == SelectionAlgorithm::BackwardElimination ? "backward" : "ctar";
}

double effective_params(Eigen::Index p, Eigen::Index q,
                        const KernelSpec& kernel, double h) {
    if (!(h > 0.0)) throw DataError("bandwidth must be positive");
    if (q < 0 || q > p) {
        throw DataError("constant-component count must lie in 0..p");
    }
    const KernelConstants kc = kernel_constants(kernel);
    // Multiply by the reciprocal twice instead of dividing by h*h: the
    // squaring would otherwise pick up a rounding error that keeps round
    // bandwidths (e.g. h = 0.2 -> 19.125 per function) off their exact value.
    const double inv_h = 1.0 / h;
    const double per_function =
        (2.0 * kc.k0 * kc.k0 - kc.nu_star * kc.nu_star) * inv_h * inv_h;
    return static_cast<double>(q) +
           static_cast<double>(p - q) * per_function;
}

double aic_core(double n, double sigma2_hat, double logdet_a, double rss,
                double k_eff) {
    return 0.5 * n * std::log(sigma2_hat) - logdet_a +
           rss / (2.0 * sigma2_hat) + k_eff;
}

double bic_core(double n, double sigma2_hat, double logdet_a, double rss,
                double k_eff) {
    return 0.5 * n * std::log(sigma2_hat) - logdet_a +
           rss / (2.0 * sigma2_hat) + 0.5 * std::log(n) * k_eff;
}

double aic(const FitResult& fit, double k_eff) {
    return aic_core(static_cast<double>(fit.n), fit.sigma2_hat, fit.logdet_a,
                    fit.residuals.squaredNorm(), k_eff);
}

double bic(const FitResult& fit, double k_eff) {
    return bic_core(static_cast<double>(fit.n), fit.sigma2_hat, fit.logdet_a,
                    fit.residuals.squaredNorm(), k_eff);
}

namespace {

std::vector<double> ratios_from_surface(const Eigen::MatrixXd& surface) {
    std::vector<double> out(static_cast<std::size_t>(surface.cols()));
    for (Eigen::Index j = 0; j < surface.cols(); ++j) {
        const double mean = surface.col(j).mean();
        if (std::abs(mean) <= kMeanFloor) {
            out[static_cast<std::size_t>(j)] =
                std::numeric_limits<double>::infinity();
        } else {
            const double ss =
                (surface.col(j).array() - mean).square().sum();
            out[static_cast<std::size_t>(j)] = ss / (mean * mean);
        }
    }
    return out;
}

} // namespace

std::vector<double> ctar_ratios(const FitResult& fit) {
    if (!fit.spec.constant_indices.empty()) {
        throw DataError("curvature-to-average ratios require a fully "
                        "functional fit (no constant components)");
    }
    if (fit.beta_surface.rows() != fit.n || fit.beta_surface.cols() != fit.p) {
        throw DataError("fit does not carry an n x p coefficient surface");
    }
    return ratios_from_surface(fit.beta_surface);
}

namespace {

struct Candidate {
    ModelSpec model;
    bool feasible = false;
    std::string error;
    double criterion_value = std::numeric_limits<double>::quiet_NaN();
    double loglik = std::numeric_limits<double>::quiet_NaN();
    double alpha = 0.0;
    double sigma2 = 0.0;
};

// All the state one selection run shares across candidate models.
//
// Candidate likelihoods are profile likelihoods at the fitting bandwidth h
// (default 0.35 of the location range): the model-aware smoother S_C is
// built at h, so the functional candidate's RSS is exactly the quantity the
// estimator minimizes, n sigma~^2(alpha^). The selection bandwidth never
// fits anything — it only prices functional components inside the
// effective-parameter penalty, and a smaller sel_h makes the criterion more
// conservative about keeping components functional. Pricing and fitting
// must not share a bandwidth: the likelihood gain from freeing one
// genuinely constant component is about half the effective dof of a surface
// at the FITTING bandwidth (boundary regions included), so a penalty
// computed from the interior-dof formula at that same bandwidth sits at the
// knife edge and stops near-randomly. The fitting default balances the two
// error directions: h large enough that a freed component's noise dof stays
// well under every penalty in the supported sel_h ranges, small enough that
// a genuinely varying coefficient keeps most of its likelihood advantage
// over its flattened version.
//
// Default mode: alpha^, sigma^2 and log|A| come from one fully functional
// fit and are shared by every candidate, whose RSS just replaces constant
// columns of the fitted surface by their sample averages (O(np) each).
// Strict mode rebuilds the model-aware smoother per candidate and
// re-profiles alpha through it; the two modes differ only in the alpha
// handling.
class Engine {
public:
    Engine(const SpatialDataset& data, const WeightMatrix& w,
           const BandwidthPolicy& bw, double sel_h, const KernelSpec& kernel,
           Criterion criterion, const SelectionOptions& opts)
        : data_(data),
          w_(w),
          kernel_(kernel),
          criterion_(criterion),
          strict_(opts.strict),
          sel_h_(sel_h),
          nd_(static_cast<double>(data.n())),
          interval_(w.alpha_interval()),
          spectrum_(w.spectrum()) {
        data_.validate();
        if (w_.n() != data_.n()) {
            throw DataError("weight matrix size does not match the dataset");
        }
        if (!(sel_h_ > 0.0)) {
            throw DataError("selection bandwidth must be positive");
        }

        BandwidthPolicy policy = bw;
        policy.selection_h = 0.0;
        if (policy.h <= 0.0) {
            policy.h = 0.35;
            policy.h1 = 0.0;
            policy.h_is_fraction = true;
        }
        est_ = policy.resolved(data_.location_range());

        tj_ = component_smoothers(data_, est_.h, kernel_, opts.threads);
        tj_mean_.reserve(tj_.size());
        for (const Eigen::MatrixXd& t : tj_) {
            tj_mean_.push_back(t.colwise().mean());
        }
        wy_ = w_.entries() * data_.y;

        // Fully functional fit: profiles alpha through S = sum_j x_j .* T_j.
        const Candidate functional = evaluate_model_aware(ModelSpec{});
        alpha0_ = functional.alpha;
        sigma20_ = functional.sigma2;
        logdet0_ = logdet_a(alpha0_, spectrum_);
        ystar0_ = data_.y - alpha0_ * wy_;
        surface0_.resize(data_.n(), data_.p());
        for (Eigen::Index j = 0; j < data_.p(); ++j) {
            surface0_.col(j) = tj_[static_cast<std::size_t>(j)] * ystar0_;
        }
    }

    double alpha0() const { return alpha0_; }
    double sigma20() const { return sigma20_; }
    const Eigen::MatrixXd& functional_surface() const { return surface0_; }

    Candidate evaluate(const ModelSpec& model) {
        Candidate cand;
        cand.model = model;
        try {
            model.validate(data_.p());
            if (strict_) {
                cand = evaluate_model_aware(model);
            } else {
                evaluate_default(cand);
            }
            cand.feasible = true;
        } catch (const Error& e) {
            cand.feasible = false;
            cand.error = e.what();
        }
        return cand;
    }

    std::vector<std::string> warnings;

private:
    void evaluate_default(Candidate& cand) {
        // With alpha frozen at the functional fit's value the candidate's
        // profile RSS is ||(I - S_C)(y - alpha^ W y)||^2, assembled from the
        // functional fit's component surfaces: constant components swap
        // their local levels for the sample average.
        Eigen::VectorXd mhat = Eigen::VectorXd::Zero(data_.n());
        for (Eigen::Index j = 0; j < data_.p(); ++j) {
            if (cand.model.is_constant(static_cast<int>(j) + 1)) {
                mhat += surface0_.col(j).mean() * data_.x.col(j);
            } else {
                mhat += data_.x.col(j).cwiseProduct(surface0_.col(j));
            }
        }
        const double rss = (ystar0_ - mhat).squaredNorm();
        finish(cand, alpha0_, sigma20_, logdet0_, rss);
    }

    Candidate evaluate_model_aware(const ModelSpec& model) {
        // Model-aware profiling smoother: functional components keep their
        // local levels, constant components contribute the sample average of
        // theirs, so
        //   S_C v = sum_{j not in C} x_j .* (T_j v)
        //         + sum_{j in C} x_j * mean(T_j v).
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(data_.n(), data_.n());
        for (Eigen::Index j = 0; j < data_.p(); ++j) {
            const Eigen::MatrixXd& t = tj_[static_cast<std::size_t>(j)];
            if (model.is_constant(static_cast<int>(j) + 1)) {
                s.noalias() += data_.x.col(j) *
                               tj_mean_[static_cast<std::size_t>(j)];
            } else {
                s.noalias() += data_.x.col(j).asDiagonal() * t;
            }
        }
        SmootherCache cache;
        cache.h = est_.h;
        ProjectionQuadratic pq = projection_quadratic(s, w_, data_.y);
        cache.c0 = pq.c0;
        cache.c1 = pq.c1;
        cache.c2 = pq.c2;
        cache.r0 = std::move(pq.r0);
        cache.r1 = std::move(pq.r1);
        cache.wy = wy_;
        cache.s = std::move(s);

        const AlphaMax am = maximize_alpha(cache, spectrum_, interval_);
        if (am.at_boundary && model.q() == 0 && !boundary_warned_) {
            boundary_warned_ = true;
            warnings.push_back(
                "selection-stage alpha maximizer sits at the "
                "admissible-interval boundary");
        }
        const double sigma2 = sigma_tilde2(cache, am.alpha);
        const double logdet = logdet_a(am.alpha, spectrum_);
        const double rss = nd_ * sigma2; // (I-S_C)A y has this exact norm

        Candidate cand;
        cand.model = model;
        finish(cand, am.alpha, sigma2, logdet, rss);
        return cand;
    }

    void finish(Candidate& cand, double alpha, double sigma2, double logdet,
                double rss) {
        const double k_eff = effective_params(
            data_.p(), static_cast<Eigen::Index>(cand.model.q()), kernel_,
            sel_h_);
        cand.alpha = alpha;
        cand.sigma2 = sigma2;
        cand.criterion_value =
            criterion_ == Criterion::Aic
                ? aic_core(nd_, sigma2, logdet, rss, k_eff)
                : bic_core(nd_, sigma2, logdet, rss, k_eff);
        cand.loglik = -0.5 * nd_ * std::log(kTwoPi) -
                      0.5 * nd_ * std::log(sigma2) + logdet -
                      rss / (2.0 * sigma2);
    }

    const SpatialDataset& data_;
    const WeightMatrix& w_;
    KernelSpec kernel_;
    Criterion criterion_;
    bool strict_;
    double sel_h_;
    double nd_;
    std::pair<double, double> interval_;
    const Eigen::VectorXcd& spectrum_;

    BandwidthPolicy est_;
    bool boundary_warned_ = false;
    double alpha0_ = 0.0;
    double sigma20_ = 0.0;
    double logdet0_ = 0.0;
    Eigen::VectorXd ystar0_;
    Eigen::VectorXd wy_;
    Eigen::MatrixXd surface0_;

    std::vector<Eigen::MatrixXd> tj_;
    std::vector<Eigen::RowVectorXd> tj_mean_;
};

SelectionTraceEntry to_trace(const Candidate& cand) {
    SelectionTraceEntry entry;
    entry.model = cand.model;
    entry.criterion_value = cand.criterion_value;
    entry.loglik = cand.loglik;
    entry.feasible = cand.feasible;
    entry.error = cand.error;
    return entry;
}

double resolve_selection_bandwidth(const SpatialDataset& data,
                                   const BandwidthPolicy& bw,
                                   Criterion criterion) {
    const double range = data.location_range();
    double sel_h = bw.selection_h;
    if (sel_h > 0.0 && bw.selection_h_is_fraction) sel_h *= range;
    if (sel_h <= 0.0) {
        sel_h = (criterion == Criterion::Aic ? 0.2 : 0.3) * range;
    }
    if (!std::isfinite(sel_h) || sel_h <= 0.0) {
        throw DataError("selection bandwidth resolves to a non-positive "
                        "value");
    }
    return sel_h;
}

ModelSpec full_constant_model(Eigen::Index p) {
    ModelSpec spec;
    spec.constant_indices.resize(static_cast<std::size_t>(p));
    std::iota(spec.constant_indices.begin(), spec.constant_indices.end(), 1);
    return spec;
}

ModelSpec without_index(const ModelSpec& model, int j) {
    ModelSpec out;
    out.constant_indices.reserve(model.constant_indices.size() - 1);
    for (int idx : model.constant_indices) {
        if (idx != j) out.constant_indices.push_back(idx);
    }
    return out;
}

} // namespace

SelectionResult backward_eliminate(const SpatialDataset& data,
                                   const WeightMatrix& w,
                                   const BandwidthPolicy& bw,
                                   const KernelSpec& kernel,
                                   Criterion criterion,
                                   const SelectionOptions& opts) {
    data.validate();
    const double sel_h = resolve_selection_bandwidth(data, bw, criterion);
    Engine engine(data, w, bw, sel_h, kernel, criterion, opts);

    SelectionResult result;
    result.criterion = criterion;
    result.algorithm = SelectionAlgorithm::BackwardElimination;
    result.sel_h = sel_h;
    result.alpha_hat = engine.alpha0();
    result.sigma2_hat = engine.sigma20();

    Candidate current = engine.evaluate(full_constant_model(data.p()));
    if (!current.feasible) {
        throw NumericError("the all-constant starting model could not be "
                           "fitted: " + current.error);
    }
    result.trace.push_back(to_trace(current));

    while (!current.model.constant_indices.empty()) {
        // Evaluate every single-removal submodel; the next model is the
        // feasible one with the largest log-likelihood.
        const Candidate* best = nullptr;
        std::vector<Candidate> step;
        step.reserve(current.model.constant_indices.size());
        for (int j : current.model.constant_indices) {
            step.push_back(engine.evaluate(without_index(current.model, j)));
        }
        for (const Candidate& cand : step) {
            result.trace.push_back(to_trace(cand));
            if (!cand.feasible) continue;
            if (best == nullptr || cand.loglik > best->loglik) best = &cand;
        }
        if (best == nullptr) {
            result.warnings.push_back(
                "all submodels of " + current.model.to_string() +
                " were infeasible; stopping at the current model");
            break;
        }
        if (current.criterion_value < best->criterion_value) break;
        current = *best;
    }

    result.chosen = current.model;
    result.warnings.insert(result.warnings.end(), engine.warnings.begin(),
                           engine.warnings.end());
    return result;
}

SelectionResult ctar_select(const SpatialDataset& data, const WeightMatrix& w,
                            const BandwidthPolicy& bw,
                            const KernelSpec& kernel, Criterion criterion,
                            const SelectionOptions& opts) {
    data.validate();
    const double sel_h = resolve_selection_bandwidth(data, bw, criterion);
    Engine engine(data, w, bw, sel_h, kernel, criterion, opts);

    SelectionResult result;
    result.criterion = criterion;
    result.algorithm = SelectionAlgorithm::Ctar;
    result.sel_h = sel_h;
    result.alpha_hat = engine.alpha0();
    result.sigma2_hat = engine.sigma20();
    result.ctar_ratios = ratios_from_surface(engine.functional_surface());

    // Components in increasing order of their ratios; ties and +inf
    // sentinels fall back to index order for determinism.
    std::vector<int> order(static_cast<std::size_t>(data.p()));
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return result.ctar_ratios[static_cast<std::size_t>(a - 1)] <
               result.ctar_ratios[static_cast<std::size_t>(b - 1)];
    });

    Candidate prev = engine.evaluate(ModelSpec{});
    if (!prev.feasible) {
        throw NumericError("the fully functional model could not be "
                           "fitted: " + prev.error);
    }
    result.trace.push_back(to_trace(prev));

    for (std::size_t k = 1; k <= order.size(); ++k) {
        ModelSpec model;
        model.constant_indices.assign(order.begin(),
                                      order.begin() +
                                          static_cast<std::ptrdiff_t>(k));
        std::sort(model.constant_indices.begin(),
                  model.constant_indices.end());
        const Candidate cand = engine.evaluate(model);
        result.trace.push_back(to_trace(cand));
        if (!cand.feasible) {
            result.warnings.push_back(
                "model " + model.to_string() +
                " was infeasible; stopping at the previous model");
            break;
        }
        if (cand.criterion_value > prev.criterion_value) break;
        prev = cand;
    }

    result.chosen = prev.model;
    result.warnings.insert(result.warnings.end(), engine.warnings.begin(),
                           engine.warnings.end());
    return result;
}

SelectionResult select_components(const SpatialDataset& data,
                                  const WeightMatrix& w,
                                  const BandwidthPolicy& bw,
                                  const KernelSpec& kernel,
                                  Criterion criterion,
                                  SelectionAlgorithm algorithm,
                                  const SelectionOptions& opts) {
    if (algorithm == SelectionAlgorithm::BackwardElimination) {
        return backward_eliminate(data, w, bw, kernel, criterion, opts);
    }
    return ctar_select(data, w, bw, kernel, criterion, opts);
}

} // namespace ssdm

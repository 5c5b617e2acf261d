#include "ssdm/profile.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "ssdm/errors.hpp"
#include "ssdm/selection.hpp"

namespace ssdm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kGoldenWidth = 1e-8;

} // namespace

BandwidthPolicy BandwidthPolicy::resolved(double range) const {
    if (!std::isfinite(range) || range <= 0.0) {
        throw DataError("location range must be positive and finite to "
                        "resolve bandwidth fractions");
    }
    BandwidthPolicy out = *this;
    if (out.h_is_fraction) {
        out.h *= range;
        out.h_is_fraction = false;
    }
    if (out.h1_is_fraction) {
        if (out.h1 > 0.0) out.h1 *= range;
        out.h1_is_fraction = false;
    }
    if (out.selection_h_is_fraction) {
        if (out.selection_h > 0.0) out.selection_h *= range;
        out.selection_h_is_fraction = false;
    }
    if (!std::isfinite(out.h) || out.h <= 0.0) {
        throw DataError("bandwidth h must be positive");
    }
    if (out.h1 <= 0.0) out.h1 = 1.5 * out.h;
    if (!std::isfinite(out.h1) || out.h1 <= out.h) {
        throw DataError("surface bandwidth h1 must exceed the profile "
                        "bandwidth h (default is 1.5 h)");
    }
    if (out.selection_h < 0.0) out.selection_h = 0.0;
    if (out.selection_h > 0.0 && !std::isfinite(out.selection_h)) {
        throw DataError("selection bandwidth must be finite");
    }
    return out;
}

bool ModelSpec::is_constant(int j) const {
    return std::binary_search(constant_indices.begin(), constant_indices.end(),
                              j);
}

void ModelSpec::validate(Eigen::Index p) const {
    int prev = 0;
    for (int j : constant_indices) {
        if (j < 1 || j > p) {
            throw DataError("constant component index " + std::to_string(j) +
                            " is outside 1.." + std::to_string(p));
        }
        if (j <= prev) {
            throw DataError("constant component indices must be strictly "
                            "increasing, got " + to_string());
        }
        prev = j;
    }
}

std::string ModelSpec::to_string() const {
    std::string out = "{";
    for (std::size_t k = 0; k < constant_indices.size(); ++k) {
        if (k > 0) out += ",";
        out += std::to_string(constant_indices[k]);
    }
    out += "}";
    return out;
}

SeMode se_mode_from_name(const std::string& name) {
    if (name == "none") return SeMode::None;
    if (name == "normal") return SeMode::Normal;
    if (name == "sandwich") return SeMode::Sandwich;
    throw DataError("unknown standard-error mode '" + name +
                    "' (expected none, normal, or sandwich)");
}

std::string se_mode_name(SeMode mode) {
    switch (mode) {
        case SeMode::None: return "none";
        case SeMode::Normal: return "normal";
        case SeMode::Sandwich: return "sandwich";
    }
    throw DataError("invalid standard-error mode value");
}

double sigma_tilde2(const SmootherCache& cache, double alpha) {
    const double n = static_cast<double>(cache.r0.size());
    if (n <= 0.0) throw NumericError("empty smoother cache");
    const double q =
        cache.c0 - 2.0 * alpha * cache.c1 + alpha * alpha * cache.c2;
    const double value = q / n;
    if (!std::isfinite(value) || value <= 0.0) {
        throw NumericError("sigma~^2(alpha) is not positive at alpha = " +
                           std::to_string(alpha) +
                           "; the smoother cache is inconsistent");
    }
    return value;
}

double logdet_a(double alpha, const Eigen::VectorXcd& spectrum) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        sum += std::log(std::abs(1.0 - alpha * spectrum[i]));
    }
    return sum;
}

double logdet_a_lu(double alpha, const Eigen::MatrixXd& w) {
    if (w.rows() != w.cols()) throw DataError("weight matrix must be square");
    const Eigen::Index n = w.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - alpha * w;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        sum += std::log(std::abs(lu.matrixLU()(i, i)));
    }
    return sum;
}

namespace {

// Concentrated log-likelihood without the additive constant:
//   -(n/2) log(sigma~^2(alpha)) + sum_i log|1 - alpha lambda_i|.
// A non-positive residual quadratic (perfect interpolation) maps to +inf.
double profile_value(double alpha, const SmootherCache& cache,
                     const Eigen::VectorXcd& spectrum) {
    const double n = static_cast<double>(cache.r0.size());
    const double q =
        cache.c0 - 2.0 * alpha * cache.c1 + alpha * alpha * cache.c2;
    if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
    return -0.5 * n * std::log(q / n) + logdet_a(alpha, spectrum);
}

struct ProfileDerivs {
    double d1 = 0.0;
    double d2 = 0.0;
};

// Exact first and second derivatives of profile_value:
//   d/da   log|1 - a l|  = Re(-l / (1 - a l))
//   d2/da2 log|1 - a l|  = -Re(l^2 / (1 - a l)^2)
ProfileDerivs profile_derivs(double alpha, const SmootherCache& cache,
                             const Eigen::VectorXcd& spectrum) {
    const double n = static_cast<double>(cache.r0.size());
    const double q =
        cache.c0 - 2.0 * alpha * cache.c1 + alpha * alpha * cache.c2;
    const double qp = -2.0 * cache.c1 + 2.0 * alpha * cache.c2;
    const double qpp = 2.0 * cache.c2;
    ProfileDerivs out;
    out.d1 = -0.5 * n * qp / q;
    out.d2 = -0.5 * n * (qpp * q - qp * qp) / (q * q);
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        const std::complex<double> ratio =
            spectrum[i] / (1.0 - alpha * spectrum[i]);
        out.d1 -= ratio.real();
        out.d2 -= (ratio * ratio).real();
    }
    return out;
}

} // namespace

double concentrated_loglik(double alpha, const SmootherCache& cache,
                           const Eigen::VectorXcd& spectrum) {
    return profile_value(alpha, cache, spectrum);
}

AlphaMax maximize_alpha(const SmootherCache& cache,
                        const Eigen::VectorXcd& spectrum,
                        std::pair<double, double> interval, int grid_points) {
    const double lo = interval.first;
    const double hi = interval.second;
    if (!(lo < hi)) throw NumericError("empty admissible interval for alpha");
    if (grid_points < 3) throw DataError("alpha grid needs at least 3 points");

    double best_a = lo;
    double best_v = -std::numeric_limits<double>::infinity();
    // Exact-tie resolution toward the smallest |alpha| keeps a flat profile
    // (W = 0) at the grid midpoint instead of drifting to an endpoint.
    const auto consider = [&](double a) {
        const double v = profile_value(a, cache, spectrum);
        if (v > best_v || (v == best_v && std::abs(a) < std::abs(best_a))) {
            best_v = v;
            best_a = a;
        }
        return v;
    };

    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    for (int i = 0; i < grid_points; ++i) {
        consider(lo + static_cast<double>(i) * step);
    }
    if (!std::isfinite(best_v)) {
        // Perfect interpolation: the profile is unbounded and every alpha
        // attains it; report the tie-broken grid point.
        return {best_a, best_v, false};
    }

    double a = std::max(lo, best_a - step);
    double b = std::min(hi, best_a + step);
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    while (b - a > kGoldenWidth) {
        const double x1 = b - invphi * (b - a);
        const double x2 = a + invphi * (b - a);
        const double f1 = consider(x1);
        const double f2 = consider(x2);
        if (f1 >= f2) {
            b = x2;
        } else {
            a = x1;
        }
    }

    // Safeguarded Newton polish: the golden bracket pins the maximizer to
    // ~1e-8; the stationary point is insensitive to the evaluation order of
    // the cached quadratic, which makes the result reproducible to ~1e-12
    // under permutations of the observations.
    double x = best_a;
    const double guard_lo = std::max(lo, x - 1e-6);
    const double guard_hi = std::min(hi, x + 1e-6);
    for (int it = 0; it < 50; ++it) {
        const ProfileDerivs d = profile_derivs(x, cache, spectrum);
        if (!std::isfinite(d.d1) || !(d.d2 < 0.0)) break;
        const double xn = x - d.d1 / d.d2;
        if (!(xn >= guard_lo && xn <= guard_hi)) break;
        const double move = std::abs(xn - x);
        x = xn;
        if (move < 1e-14 * std::max(1.0, std::abs(x))) break;
    }
    const double fx = profile_value(x, cache, spectrum);
    if (std::isfinite(fx) &&
        fx >= best_v - 1e-9 * std::max(1.0, std::abs(best_v))) {
        best_a = x;
        best_v = std::max(fx, best_v);
    }

    const double margin = std::max(1e-7, (hi - lo) * 1e-7);
    const bool boundary = (best_a - lo <= margin) || (hi - best_a <= margin);
    return {best_a, best_v, boundary};
}

namespace {

// Shared by estimate() (which already owns the h-stage smoother) and the
// public standard_errors() (which rebuilds it from the recorded bandwidth).
void apply_standard_errors(FitResult& fit, const SpatialDataset& data,
                           const WeightMatrix& w, const Eigen::MatrixXd& s,
                           bool assume_normal) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    const double nd = static_cast<double>(n);
    const double sigma2 = fit.sigma2_hat;

    Eigen::MatrixXd g;
    if (w.is_zero()) {
        g = Eigen::MatrixXd::Zero(n, n);
    } else {
        Eigen::MatrixXd a =
            Eigen::MatrixXd::Identity(n, n) - fit.alpha_hat * w.entries();
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
        g = w.entries() * lu.inverse();
        if (!g.allFinite()) {
            throw NumericError("I - alpha W is numerically singular at the "
                               "estimated alpha");
        }
    }

    const Eigen::VectorXd gdiag = g.diagonal();
    const double pi2 = g.trace() / nd;
    const double tr_gg = (g.array() * g.transpose().array()).sum();
    const double tr_gtg = g.squaredNorm();
    const double pi1 = (tr_gg + tr_gtg) / nd;
    const double pi3 = gdiag.squaredNorm() / nd;

    const Eigen::VectorXd mhat =
        (data.x.array() * fit.beta_surface.array()).rowwise().sum();
    const Eigen::VectorXd gm = g * mhat;
    const Eigen::VectorXd v = gm - s * gm;
    const double l1 = v.squaredNorm() / nd;
    const double l2 = v.dot(gdiag) / nd;
    const double l3 = v.sum() / nd;

    Eigen::Matrix2d omega;
    omega << l1 / sigma2 + pi1, pi2 / sigma2,
             pi2 / sigma2, 1.0 / (2.0 * sigma2 * sigma2);

    const double mu3 = fit.residuals.array().cube().mean();
    const double mu4 = fit.residuals.array().square().square().mean();

    const double det = omega(0, 0) * omega(1, 1) - omega(0, 1) * omega(0, 1);
    const bool singular =
        !(omega(0, 0) > 0.0) || !(det > 1e-12 * omega(0, 0) * omega(1, 1));
    if (singular) {
        // The alpha block of the information matrix is degenerate (for
        // example W = 0): fall back to the variance of sigma^2 alone,
        // 2 sigma^4 / n under normality and (mu4 - sigma^4) / n otherwise.
        fit.se_alpha.reset();
        fit.warnings.push_back(
            "information matrix for (alpha, sigma^2) is numerically "
            "singular; se_alpha is unavailable");
        if (assume_normal) {
            fit.se_sigma2 = sigma2 * std::sqrt(2.0 / nd);
        } else {
            fit.se_sigma2 =
                std::sqrt(std::max(0.0, mu4 - sigma2 * sigma2) / nd);
        }
    } else {
        Eigen::Matrix2d oinv;
        oinv << omega(1, 1), -omega(0, 1),
                -omega(0, 1), omega(0, 0);
        oinv /= det;
        Eigen::Matrix2d cov = oinv;
        if (!assume_normal) {
            const double s4 = sigma2 * sigma2;
            const double s6 = s4 * sigma2;
            const double s8 = s4 * s4;
            const double excess = mu4 - 3.0 * s4;
            const double off =
                mu3 / (2.0 * s6) * l3 + excess / (2.0 * s6) * pi2;
            Eigen::Matrix2d sig;
            sig << excess / s4 * pi3 + 2.0 * mu3 / s4 * l2, off,
                   off, excess / (4.0 * s8);
            cov += oinv * sig * oinv;
        }
        const auto se_from = [&](double var_entry,
                                 const char* which) -> std::optional<double> {
            if (!(var_entry >= 0.0)) {
                fit.warnings.push_back(
                    std::string("variance plug-in for ") + which +
                    " is negative; its standard error is suppressed");
                return std::nullopt;
            }
            return std::sqrt(var_entry / nd);
        };
        fit.se_alpha = se_from(cov(0, 0), "alpha");
        fit.se_sigma2 = se_from(cov(1, 1), "sigma^2");
    }

    // Pointwise coefficient standard errors:
    //   Var(beta^_j(s)) = nu0 sigma^2 (Psi^-1)_jj / (kappa0^2 n h1^2 f^(s))
    // with Psi^ = X'X/n and f^ the kernel density estimate at bandwidth h1.
    const KernelSpec kspec{fit.kernel};
    const KernelConstants kc = kernel_constants(kspec);
    const Eigen::MatrixXd psi = (data.x.transpose() * data.x) / nd;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(psi);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw NumericError("covariate second-moment matrix is singular; "
                           "coefficient standard errors are unavailable");
    }
    const Eigen::MatrixXd psi_inv =
        ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(psi_inv(j, j) > 0.0)) {
            throw NumericError("covariate second-moment matrix is "
                               "numerically singular; coefficient standard "
                               "errors are unavailable");
        }
    }

    Eigen::VectorXd fhat(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double du = data.locations(i, 0) - data.locations(k, 0);
            const double dv = data.locations(i, 1) - data.locations(k, 1);
            sum += scaled_kernel(kspec, std::sqrt(du * du + dv * dv), fit.h1);
        }
        fhat(i) = sum / (nd * kc.kappa0);
    }

    const double base =
        kc.nu0 * sigma2 / (kc.kappa0 * kc.kappa0 * nd * fit.h1 * fit.h1);
    Eigen::MatrixXd se(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            se(i, j) = std::sqrt(base * psi_inv(j, j) / fhat(i));
        }
    }
    fit.beta_se_surface = std::move(se);
}

} // namespace

FitResult estimate(const SpatialDataset& data, const WeightMatrix& w,
                   const BandwidthPolicy& bw, const ModelSpec& spec,
                   const KernelSpec& kernel, SeMode se_mode, int threads) {
    data.validate();
    if (w.n() != data.n()) {
        throw DataError("weight matrix is " + std::to_string(w.n()) + "x" +
                        std::to_string(w.n()) + " but the dataset has " +
                        std::to_string(data.n()) + " observations");
    }
    spec.validate(data.p());
    const BandwidthPolicy bwr = bw.resolved(data.location_range());
    const std::pair<double, double> interval = w.alpha_interval();

    const SmootherCache cache =
        build_smoother_cache(data, w, bwr.h, kernel, threads);
    const Eigen::VectorXcd& spectrum = w.spectrum();
    const AlphaMax am = maximize_alpha(cache, spectrum, interval);

    FitResult fit;
    fit.alpha_hat = am.alpha;
    if (am.at_boundary) {
        fit.warnings.push_back(
            "alpha maximizer sits at the admissible-interval boundary; the "
            "weight matrix may be misspecified");
    }
    fit.sigma2_hat = sigma_tilde2(cache, am.alpha);
    fit.logdet_a = logdet_a(am.alpha, spectrum);

    const Eigen::VectorXd ystar = data.y - am.alpha * cache.wy;
    Eigen::MatrixXd beta =
        surface_levels(data, ystar, bwr.h1, kernel, threads);
    for (int j : spec.constant_indices) {
        const double avg = beta.col(j - 1).mean();
        beta.col(j - 1).setConstant(avg);
        fit.beta_const[j] = avg;
    }
    const Eigen::VectorXd mhat =
        (data.x.array() * beta.array()).rowwise().sum();
    fit.residuals = ystar - mhat;
    fit.beta_surface = std::move(beta);

    const double nd = static_cast<double>(data.n());
    const double rss = fit.residuals.squaredNorm();
    fit.loglik = -0.5 * nd * std::log(kTwoPi) -
                 0.5 * nd * std::log(fit.sigma2_hat) + fit.logdet_a -
                 rss / (2.0 * fit.sigma2_hat);
    fit.n_effective_params =
        effective_params(data.p(), static_cast<Eigen::Index>(spec.q()),
                         kernel, bwr.h);
    fit.aic = aic_core(nd, fit.sigma2_hat, fit.logdet_a, rss,
                       fit.n_effective_params);
    fit.bic = bic_core(nd, fit.sigma2_hat, fit.logdet_a, rss,
                       fit.n_effective_params);

    fit.n = data.n();
    fit.p = data.p();
    fit.h = bwr.h;
    fit.h1 = bwr.h1;
    fit.kernel = kernel.family;
    fit.spec = spec;
    fit.se_mode = se_mode;
    fit.alpha_interval = interval;

    if (se_mode != SeMode::None) {
        apply_standard_errors(fit, data, w, cache.s,
                              se_mode == SeMode::Normal);
    }
    return fit;
}

void standard_errors(FitResult& fit, const SpatialDataset& data,
                     const WeightMatrix& w, bool assume_normal, int threads) {
    data.validate();
    if (fit.n != data.n() || fit.p != data.p()) {
        throw DataError("fit and dataset dimensions do not match");
    }
    if (w.n() != data.n()) {
        throw DataError("weight matrix size does not match the dataset");
    }
    if (!(fit.h > 0.0) || !(fit.h1 > 0.0)) {
        throw DataError("fit does not record positive bandwidths");
    }
    if (fit.beta_surface.rows() != data.n() ||
        fit.beta_surface.cols() != data.p() ||
        fit.residuals.size() != data.n()) {
        throw DataError("fit surfaces/residuals do not match the dataset");
    }
    const Eigen::MatrixXd s =
        smoother_matrix(data, fit.h, KernelSpec{fit.kernel}, threads);
    apply_standard_errors(fit, data, w, s, assume_normal);
    fit.se_mode = assume_normal ? SeMode::Normal : SeMode::Sandwich;
}

} // namespace ssdm

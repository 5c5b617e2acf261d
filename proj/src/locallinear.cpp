#include "ssdm/locallinear.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ssdm/errors.hpp"
#include "ssdm/parallel.hpp"
#include "ssdm/simd/weight_row.hpp"

namespace ssdm {

namespace {

constexpr double kMaxCondition = 1e10;
constexpr double kRidgeScale = 1e-10;

// Solved weighted local system at one target: support indices and the level
// block of (X'WX)^{-1} X'W restricted to the support columns.
struct TargetSystem {
    std::vector<Eigen::Index> support;
    Eigen::MatrixXd c_top; // p x k
    Eigen::MatrixXd c_all; // 3p x k (only filled when full_coef is requested)
    double weight_sum = 0.0;
};

// Smallest h admitting `needed` observations with nonzero weight at (su,sv):
// the needed-th smallest distance, divided by the kernel's support radius.
double suggest_bandwidth(const SpatialDataset& data, double su, double sv,
                         Eigen::Index needed, const KernelSpec& kernel) {
    const Eigen::Index n = data.n();
    std::vector<double> d(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double du = data.locations(i, 0) - su;
        const double dv = data.locations(i, 1) - sv;
        d[static_cast<std::size_t>(i)] = std::sqrt(du * du + dv * dv);
    }
    const auto nth = d.begin() + std::min<Eigen::Index>(needed, n) - 1;
    std::nth_element(d.begin(), nth, d.end());
    const double cut = kernel.family == KernelFamily::Gaussian ? 4.0 : 1.0;
    return *nth / cut;
}

[[noreturn]] void throw_bandwidth_error(const SpatialDataset& data, double su,
                                        double sv, Eigen::Index target_index,
                                        double h, const KernelSpec& kernel,
                                        const std::string& reason) {
    const Eigen::Index needed = 3 * data.p();
    const double suggested =
        std::max(suggest_bandwidth(data, su, sv, needed, kernel), 1.5 * h);
    throw BandwidthTooSmall(
        "local-linear smoother: " + reason + " at target #" +
            std::to_string(target_index + 1) + " = (" + std::to_string(su) +
            ", " + std::to_string(sv) + ") with h=" + std::to_string(h) +
            "; the local design needs " + std::to_string(needed) +
            " usable observations — increase h to more than about " +
            std::to_string(suggested),
        static_cast<std::size_t>(target_index), su, sv, suggested);
}

// Assembles and solves the ridged local WLS system at one target.
// target_index is only used for error reporting (pass the row index when the
// target is a sample location, or n when it is arbitrary).
TargetSystem solve_target(const SpatialDataset& data, double su, double sv,
                          double h, const KernelSpec& kernel,
                          Eigen::Index target_index, bool full_coef,
                          std::vector<double>& weight_buffer) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    const Eigen::Index m = 3 * p;

    weight_buffer.resize(static_cast<std::size_t>(n));
    simd::weight_row(kernel.family, data.locations.col(0).data(),
                     data.locations.col(1).data(),
                     static_cast<std::size_t>(n), su, sv, h,
                     weight_buffer.data());

    TargetSystem sys;
    sys.support.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (weight_buffer[static_cast<std::size_t>(i)] > 0.0) {
            sys.support.push_back(i);
            sys.weight_sum += weight_buffer[static_cast<std::size_t>(i)];
        }
    }
    const Eigen::Index k = static_cast<Eigen::Index>(sys.support.size());
    if (k < m) {
        throw_bandwidth_error(data, su, sv, target_index, h, kernel,
                              "only " + std::to_string(k) +
                                  " observations receive nonzero weight");
    }

    // Z row r = (x_i', x_i1*du, x_i1*dv, ..., x_ip*du, x_ip*dv).
    Eigen::MatrixXd z(k, m);
    Eigen::MatrixXd zw(k, m); // diag(w) Z
    for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index i = sys.support[static_cast<std::size_t>(r)];
        const double du = data.locations(i, 0) - su;
        const double dv = data.locations(i, 1) - sv;
        const double wi = weight_buffer[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < p; ++j) {
            const double xij = data.x(i, j);
            z(r, j) = xij;
            z(r, p + 2 * j) = xij * du;
            z(r, p + 2 * j + 1) = xij * dv;
        }
        zw.row(r) = z.row(r) * wi;
    }

    Eigen::MatrixXd gram = z.transpose() * zw; // X'WX, symmetric PSD
    const double ridge = kRidgeScale * gram.trace() / static_cast<double>(m);
    gram.diagonal().array() += ridge;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(gram,
                                                        Eigen::EigenvaluesOnly);
    const double lo = eigs.eigenvalues().minCoeff();
    const double hi = eigs.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition) {
        throw_bandwidth_error(data, su, sv, target_index, h, kernel,
                              "the local design matrix is near-singular "
                              "(condition estimate above 1e10 after ridge)");
    }

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (full_coef) {
        sys.c_all = ldlt.solve(zw.transpose()); // 3p x k
        sys.c_top = sys.c_all.topRows(p);
    } else {
        sys.c_top = ldlt.solve(zw.transpose()).topRows(p);
    }
    return sys;
}

} // namespace

void SpatialDataset::validate() const {
    const Eigen::Index nn = y.size();
    if (nn == 0) throw DataError("dataset: empty response");
    if (x.rows() != nn || locations.rows() != nn) {
        throw DataError("dataset: inconsistent row counts (y: " +
                        std::to_string(nn) + ", X: " + std::to_string(x.rows()) +
                        ", locations: " + std::to_string(locations.rows()) + ")");
    }
    if (locations.cols() != 2) {
        throw DataError("dataset: locations must have 2 columns");
    }
    if (x.cols() < 1) throw DataError("dataset: no covariates");
    if (!y.allFinite() || !x.allFinite() || !locations.allFinite()) {
        throw DataError("dataset: non-finite values present");
    }
    if (nn <= 3 * x.cols()) {
        throw DataError("dataset: n=" + std::to_string(nn) +
                        " must exceed 3p=" + std::to_string(3 * x.cols()) +
                        " (the local design has 3p columns)");
    }
}

LocalFit local_linear_fit(const SpatialDataset& data,
                          const Eigen::VectorXd& ystar, double su, double sv,
                          double h, const KernelSpec& kernel) {
    data.validate();
    if (ystar.size() != data.n()) {
        throw DataError("local_linear_fit: working response has wrong length");
    }
    if (!(h > 0.0)) throw DataError("local_linear_fit: bandwidth must be > 0");

    std::vector<double> wbuf;
    const TargetSystem sys =
        solve_target(data, su, sv, h, kernel, data.n(), /*full_coef=*/true, wbuf);

    const Eigen::Index p = data.p();
    const Eigen::Index k = static_cast<Eigen::Index>(sys.support.size());
    Eigen::VectorXd ys(k);
    for (Eigen::Index r = 0; r < k; ++r) {
        ys(r) = ystar(sys.support[static_cast<std::size_t>(r)]);
    }
    const Eigen::VectorXd coef = sys.c_all * ys; // 3p

    LocalFit fit;
    fit.a = coef.head(p);
    fit.b.resize(p, 2);
    for (Eigen::Index j = 0; j < p; ++j) {
        fit.b(j, 0) = coef(p + 2 * j);
        fit.b(j, 1) = coef(p + 2 * j + 1);
    }
    fit.effective_weight_count = sys.weight_sum;
    fit.support = sys.support.size();
    return fit;
}

// Shared driver: solves the local system at every sample location and hands
// the (row, support, level map) triple to the assembler.
template <typename Assemble>
static void for_each_target(const SpatialDataset& data, double h,
                            const KernelSpec& kernel, int threads,
                            Assemble&& assemble) {
    data.validate();
    if (!(h > 0.0)) throw DataError("smoother: bandwidth must be > 0");
    parallel_for(static_cast<std::size_t>(data.n()), threads,
                 [&](std::size_t i) {
                     thread_local std::vector<double> wbuf;
                     const Eigen::Index ti = static_cast<Eigen::Index>(i);
                     const TargetSystem sys = solve_target(
                         data, data.locations(ti, 0), data.locations(ti, 1), h,
                         kernel, ti, /*full_coef=*/false, wbuf);
                     assemble(ti, sys);
                 });
}

Eigen::MatrixXd smoother_matrix(const SpatialDataset& data, double h,
                                const KernelSpec& kernel, int threads) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(data.n(), data.n());
    for_each_target(data, h, kernel, threads,
                    [&](Eigen::Index i, const TargetSystem& sys) {
                        const auto row = data.x.row(i) * sys.c_top; // 1 x k
                        for (std::size_t c = 0; c < sys.support.size(); ++c) {
                            s(i, sys.support[c]) =
                                row(static_cast<Eigen::Index>(c));
                        }
                    });
    return s;
}

Eigen::MatrixXd surface_levels(const SpatialDataset& data,
                               const Eigen::VectorXd& ystar, double h,
                               const KernelSpec& kernel, int threads) {
    if (ystar.size() != data.n()) {
        throw DataError("surface_levels: working response has wrong length");
    }
    Eigen::MatrixXd surface(data.n(), data.p());
    for_each_target(data, h, kernel, threads,
                    [&](Eigen::Index i, const TargetSystem& sys) {
                        const Eigen::Index k =
                            static_cast<Eigen::Index>(sys.support.size());
                        Eigen::VectorXd ys(k);
                        for (Eigen::Index r = 0; r < k; ++r) {
                            ys(r) = ystar(
                                sys.support[static_cast<std::size_t>(r)]);
                        }
                        surface.row(i) = (sys.c_top * ys).transpose();
                    });
    return surface;
}

std::vector<Eigen::MatrixXd> component_smoothers(const SpatialDataset& data,
                                                 double h,
                                                 const KernelSpec& kernel,
                                                 int threads) {
    std::vector<Eigen::MatrixXd> t(
        static_cast<std::size_t>(data.p()),
        Eigen::MatrixXd::Zero(data.n(), data.n()));
    for_each_target(data, h, kernel, threads,
                    [&](Eigen::Index i, const TargetSystem& sys) {
                        for (Eigen::Index j = 0; j < data.p(); ++j) {
                            auto& tj = t[static_cast<std::size_t>(j)];
                            for (std::size_t c = 0; c < sys.support.size();
                                 ++c) {
                                tj(i, sys.support[c]) =
                                    sys.c_top(j, static_cast<Eigen::Index>(c));
                            }
                        }
                    });
    return t;
}

ProjectionQuadratic projection_quadratic(const Eigen::MatrixXd& s,
                                         const WeightMatrix& w,
                                         const Eigen::VectorXd& y) {
    if (s.rows() != y.size() || s.cols() != y.size() || w.n() != y.size()) {
        throw DataError("projection_quadratic: dimension mismatch");
    }
    ProjectionQuadratic q;
    const Eigen::VectorXd wy = w.entries() * y;
    q.r0 = y - s * y;
    q.r1 = wy - s * wy;
    q.c0 = q.r0.squaredNorm();
    q.c1 = q.r0.dot(q.r1);
    q.c2 = q.r1.squaredNorm();
    return q;
}

SmootherCache build_smoother_cache(const SpatialDataset& data,
                                   const WeightMatrix& w, double h,
                                   const KernelSpec& kernel, int threads) {
    if (w.n() != data.n()) {
        throw DataError("smoother cache: weight matrix size " +
                        std::to_string(w.n()) + " does not match n=" +
                        std::to_string(data.n()));
    }
    SmootherCache cache;
    cache.h = h;
    cache.s = smoother_matrix(data, h, kernel, threads);
    cache.wy = w.entries() * data.y;
    ProjectionQuadratic q = projection_quadratic(cache.s, w, data.y);
    cache.c0 = q.c0;
    cache.c1 = q.c1;
    cache.c2 = q.c2;
    cache.r0 = std::move(q.r0);
    cache.r1 = std::move(q.r1);
    return cache;
}

} // namespace ssdm

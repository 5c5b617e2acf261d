#include "ssdm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "ssdm/errors.hpp"
#include "ssdm/parallel.hpp"
#include "ssdm/rng.hpp"

namespace ssdm {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

} // namespace

double beta_value(const BetaDescriptor& desc, double u, double v) {
    const double r2 = u * u + v * v;
    switch (desc.kind) {
        case BetaFunction::SinPiNorm2: return std::sin(kPi * r2);
        case BetaFunction::CosPiNorm2: return std::cos(kPi * r2);
        case BetaFunction::ExpNorm2: return std::exp(r2);
        case BetaFunction::Sin2PiNorm2: {
            const double s = std::sin(kPi * r2);
            return s * s;
        }
        case BetaFunction::Constant: return desc.value;
    }
    throw DataError("invalid coefficient-function descriptor");
}

std::string beta_descriptor_name(const BetaDescriptor& desc) {
    switch (desc.kind) {
        case BetaFunction::SinPiNorm2: return "sin(pi|s|^2)";
        case BetaFunction::CosPiNorm2: return "cos(pi|s|^2)";
        case BetaFunction::ExpNorm2: return "exp(|s|^2)";
        case BetaFunction::Sin2PiNorm2: return "sin^2(pi|s|^2)";
        case BetaFunction::Constant:
            return "constant " + std::to_string(desc.value);
    }
    throw DataError("invalid coefficient-function descriptor");
}

DgpConfig DgpConfig::example1(Eigen::Index n, std::uint64_t seed) {
    DgpConfig cfg;
    cfg.n = n;
    cfg.p = 3;
    cfg.alpha = 0.5;
    cfg.sigma2 = 1.0;
    cfg.beta = {{BetaFunction::SinPiNorm2, 0.0},
                {BetaFunction::CosPiNorm2, 0.0},
                {BetaFunction::ExpNorm2, 0.0}};
    cfg.seed = seed;
    return cfg;
}

DgpConfig DgpConfig::example2(Eigen::Index n, std::uint64_t seed) {
    DgpConfig cfg = example1(n, seed);
    cfg.p = 5;
    cfg.beta.push_back({BetaFunction::Sin2PiNorm2, 0.0});
    cfg.beta.push_back({BetaFunction::Constant, 1.0});
    return cfg;
}

std::uint64_t replication_stream(Eigen::Index n, int rep) {
    return (static_cast<std::uint64_t>(n) << 32) ^
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(rep));
}

GeneratedData generate(const DgpConfig& config) {
    if (config.n < 2) {
        throw DataError("the generator needs at least 2 observations");
    }
    if (config.p < 1 ||
        config.p != static_cast<Eigen::Index>(config.beta.size())) {
        throw DataError("p must match the number of coefficient functions");
    }
    if (!std::isfinite(config.sigma2) || config.sigma2 <= 0.0) {
        throw DataError("sigma2 must be positive");
    }
    if (!std::isfinite(config.alpha)) {
        throw DataError("alpha must be finite");
    }

    Rng rng(config.seed, config.stream);
    const Eigen::Index n = config.n;
    const Eigen::Index p = config.p;

    Eigen::MatrixXd locations(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        locations(i, 0) = rng.next_uniform();
        locations(i, 1) = rng.next_uniform();
    }
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            x(i, j) = rng.next_normal();
        }
    }
    const double sd = std::sqrt(config.sigma2);
    Eigen::VectorXd eps(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        eps(i) = sd * rng.next_normal();
    }

    Eigen::MatrixXd true_beta(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            true_beta(i, j) =
                beta_value(config.beta[static_cast<std::size_t>(j)],
                           locations(i, 0), locations(i, 1));
        }
    }
    const Eigen::VectorXd m =
        (x.array() * true_beta.array()).rowwise().sum();

    // Interaction distances are measured at constant spatial density (4
    // points per unit area): the unit square of n sampled sites maps to a
    // side-length-sqrt(n)/2 domain for the weight construction. This keeps
    // each site's exponential-decay neighborhood genuinely local — a stable
    // effective-neighbor count at every n — which is what gives the
    // autoregressive parameter its root-n precision. Distances taken on the
    // raw unit square instead would make every weight nearly uniform
    // (exp(-d) with d <= sqrt(2)), leaving alpha almost unidentified at
    // these sample sizes. Coefficient surfaces and bandwidths stay on the
    // unit square.
    const double density_scale = std::sqrt(static_cast<double>(n)) / 2.0;
    WeightMatrix w = build_exp_decay_weights(locations * density_scale);
    const auto [lo, hi] = w.alpha_interval();
    if (!(config.alpha > lo && config.alpha < hi)) {
        throw DataError("alpha = " + std::to_string(config.alpha) +
                        " lies outside the admissible interval of the "
                        "generated weight matrix");
    }

    Eigen::MatrixXd a =
        Eigen::MatrixXd::Identity(n, n) - config.alpha * w.entries();
    const Eigen::VectorXd y = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(
        (m + eps).eval());

    GeneratedData out{SpatialDataset{std::move(locations), std::move(x), y},
                      std::move(w), std::move(true_beta), std::move(eps)};
    return out;
}

namespace {

struct RepSlot {
    bool ok = false;
    std::string error;
    double sq_alpha = 0.0;
    double sq_sigma2 = 0.0;
    std::vector<double> ise;
    double aggregate = 0.0;
    std::string chosen; // table 2
};

void check_failure_budget(const MonteCarloReport& report) {
    if (report.failures * 20 >= report.requested_reps) {
        std::string detail;
        for (std::size_t i = 0;
             i < report.failure_messages.size() && i < 3; ++i) {
            detail += "\n  " + report.failure_messages[i];
        }
        throw NumericError(
            "replication failures reached " +
            std::to_string(report.failures) + "/" +
            std::to_string(report.requested_reps) +
            " (>= 5%); first messages:" + detail);
    }
}

} // namespace

std::vector<MonteCarloReport> run_table1(const std::vector<Eigen::Index>& n_list,
                                         int reps, const BandwidthPolicy& bw,
                                         std::uint64_t seed,
                                         const KernelSpec& kernel,
                                         int threads) {
    if (reps < 2) throw DataError("at least 2 replications are required");
    if (n_list.empty()) throw DataError("no sample sizes given");

    std::vector<MonteCarloReport> out;
    out.reserve(n_list.size());
    for (const Eigen::Index n : n_list) {
        const DgpConfig proto = DgpConfig::example1(n, seed);
        MonteCarloReport report;
        report.table = 1;
        report.n = n;
        report.requested_reps = reps;
        report.alpha_true = proto.alpha;
        report.sigma2_true = proto.sigma2;
        report.mise_beta.assign(static_cast<std::size_t>(proto.p), 0.0);

        std::vector<RepSlot> slots(static_cast<std::size_t>(reps));
        parallel_for(static_cast<std::size_t>(reps), threads,
                     [&](std::size_t r) {
            RepSlot& slot = slots[r];
            try {
                DgpConfig cfg = proto;
                cfg.stream = replication_stream(n, static_cast<int>(r));
                const GeneratedData gen = generate(cfg);
                const FitResult fit = estimate(gen.data, gen.w, bw,
                                               ModelSpec{}, kernel,
                                               SeMode::None, 1);
                slot.sq_alpha = (fit.alpha_hat - cfg.alpha) *
                                (fit.alpha_hat - cfg.alpha);
                slot.sq_sigma2 = (fit.sigma2_hat - cfg.sigma2) *
                                 (fit.sigma2_hat - cfg.sigma2);
                slot.ise.resize(static_cast<std::size_t>(cfg.p));
                for (Eigen::Index j = 0; j < cfg.p; ++j) {
                    slot.ise[static_cast<std::size_t>(j)] =
                        (fit.beta_surface.col(j) - gen.true_beta.col(j))
                            .squaredNorm() /
                        static_cast<double>(cfg.n);
                }
                slot.aggregate = slot.sq_alpha + slot.sq_sigma2;
                for (const double v : slot.ise) slot.aggregate += v;
                slot.ok = true;
            } catch (const std::exception& e) {
                slot.error = e.what();
            }
        });

        std::vector<std::pair<double, int>> ranked;
        ranked.reserve(slots.size());
        for (int r = 0; r < reps; ++r) {
            const RepSlot& slot = slots[static_cast<std::size_t>(r)];
            if (!slot.ok) {
                ++report.failures;
                report.failure_messages.push_back(
                    "rep " + std::to_string(r) + ": " + slot.error);
                continue;
            }
            ++report.reps;
            report.mse_alpha += slot.sq_alpha;
            report.mse_sigma2 += slot.sq_sigma2;
            for (std::size_t j = 0; j < slot.ise.size(); ++j) {
                report.mise_beta[j] += slot.ise[j];
            }
            ranked.emplace_back(slot.aggregate, r);
        }
        check_failure_budget(report);

        const double count = static_cast<double>(report.reps);
        report.mse_alpha /= count;
        report.mse_sigma2 /= count;
        for (double& v : report.mise_beta) v /= count;

        // Lower-median aggregate error picks the representative run, which
        // is regenerated from its substream and re-fitted for export.
        std::sort(ranked.begin(), ranked.end());
        report.median_rep = ranked[(ranked.size() - 1) / 2].second;
        DgpConfig cfg = proto;
        cfg.stream = replication_stream(n, report.median_rep);
        const GeneratedData gen = generate(cfg);
        report.median_run = estimate(gen.data, gen.w, bw, ModelSpec{},
                                     kernel, SeMode::None, threads);
        report.median_locations = gen.data.locations;
        report.median_true_beta = gen.true_beta;
        report.h = report.median_run.h;
        report.h1 = report.median_run.h1;
        out.push_back(std::move(report));
    }
    return out;
}

std::vector<MonteCarloReport> run_table2(const std::vector<Eigen::Index>& n_list,
                                         int reps, Criterion criterion,
                                         SelectionAlgorithm algorithm,
                                         std::uint64_t seed,
                                         const BandwidthPolicy& bw,
                                         const KernelSpec& kernel,
                                         int threads) {
    if (reps < 2) throw DataError("at least 2 replications are required");
    if (n_list.empty()) throw DataError("no sample sizes given");

    // Candidate fitting bandwidth defaults are resolved inside the
    // selection engine (0.35 of the location range when unset).
    const BandwidthPolicy& policy = bw;

    std::vector<MonteCarloReport> out;
    out.reserve(n_list.size());
    for (const Eigen::Index n : n_list) {
        const DgpConfig proto = DgpConfig::example2(n, seed);
        MonteCarloReport report;
        report.table = 2;
        report.n = n;
        report.requested_reps = reps;
        report.alpha_true = proto.alpha;
        report.sigma2_true = proto.sigma2;
        report.criterion = criterion_name(criterion);
        report.algorithm = algorithm_name(algorithm);
        report.h = policy.h_is_fraction ? 0.0 : policy.h;
        report.h1 = policy.h1_is_fraction ? 0.0 : policy.h1;
        report.sel_h =
            (policy.selection_h > 0.0 && !policy.selection_h_is_fraction)
                ? policy.selection_h
                : 0.0;

        std::vector<RepSlot> slots(static_cast<std::size_t>(reps));
        parallel_for(static_cast<std::size_t>(reps), threads,
                     [&](std::size_t r) {
            RepSlot& slot = slots[r];
            try {
                DgpConfig cfg = proto;
                cfg.stream = replication_stream(n, static_cast<int>(r));
                const GeneratedData gen = generate(cfg);
                SelectionOptions opts;
                opts.strict = false;
                opts.threads = 1;
                const SelectionResult sel = select_components(
                    gen.data, gen.w, policy, kernel, criterion, algorithm,
                    opts);
                slot.chosen = sel.chosen.to_string();
                slot.ok = true;
            } catch (const std::exception& e) {
                slot.error = e.what();
            }
        });

        for (int r = 0; r < reps; ++r) {
            const RepSlot& slot = slots[static_cast<std::size_t>(r)];
            if (!slot.ok) {
                ++report.failures;
                report.failure_messages.push_back(
                    "rep " + std::to_string(r) + ": " + slot.error);
                continue;
            }
            ++report.reps;
            ++report.selection_counts[slot.chosen];
        }
        check_failure_budget(report);
        out.push_back(std::move(report));
    }
    return out;
}

} // namespace ssdm

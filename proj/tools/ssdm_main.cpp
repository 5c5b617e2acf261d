// ssdm — semiparametric spatial dynamic model toolkit.
//
// Subcommands: fit, select, simulate, diagnose. Exit codes: 0 success,
// 1 usage error, 2 data error, 3 numerical failure.

#include <charconv>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ssdm/diagnostics.hpp"
#include "ssdm/errors.hpp"
#include "ssdm/io.hpp"
#include "ssdm/profile.hpp"
#include "ssdm/selection.hpp"
#include "ssdm/simulate.hpp"
#include "ssdm/weights.hpp"

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

struct Logger {
    LogLevel level = LogLevel::Info;

    void info(const std::string& message) const {
        if (level >= LogLevel::Info) std::cerr << "[info] " << message << '\n';
    }
    void warn(const std::string& message) const {
        if (level >= LogLevel::Warn) std::cerr << "[warn] " << message << '\n';
    }
    void debug(const std::string& message) const {
        if (level >= LogLevel::Debug) {
            std::cerr << "[debug] " << message << '\n';
        }
    }
};

LogLevel log_level_from_name(const std::string& name) {
    if (name == "error") return LogLevel::Error;
    if (name == "warn") return LogLevel::Warn;
    if (name == "info") return LogLevel::Info;
    if (name == "debug") return LogLevel::Debug;
    throw ssdm::DataError("unknown log level '" + name +
                          "' (expected error, warn, info, or debug)");
}

std::string fmt(double value) {
    char buffer[40];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value);
    return ec == std::errc{} ? std::string(buffer, ptr) : std::string("nan");
}

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<int> parse_index_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token.empty()) continue;
        int value = 0;
        const auto [ptr, ec] =
            std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            throw ssdm::DataError("cannot parse '" + token +
                                  "' as an integer index");
        }
        out.push_back(value);
    }
    return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (!token.empty()) out.push_back(token);
    }
    return out;
}

// Column-role flags shared by every subcommand that ingests a dataset.
struct SchemaArgs {
    std::string u_col;
    std::string v_col;
    std::string y_col;
    std::string covariates;  // comma-separated, empty = all remaining
    std::string standardize; // comma-separated covariate names
};

void add_schema_flags(CLI::App* cmd, SchemaArgs& args) {
    cmd->add_option("--u-col", args.u_col,
                    "Location column for the first coordinate (default: "
                    "auto-detect u, then LON)");
    cmd->add_option("--v-col", args.v_col,
                    "Location column for the second coordinate (default: "
                    "auto-detect v, then LAT)");
    cmd->add_option("--y-col", args.y_col,
                    "Response column (default: auto-detect y, then MEDV)");
    cmd->add_option("--covariates", args.covariates,
                    "Comma-separated covariate columns in model order "
                    "(default: every remaining column)");
    cmd->add_option("--standardize", args.standardize,
                    "Comma-separated covariate columns to center and scale "
                    "to unit variance (covariates are raw by default)");
}

ssdm::DatasetSchema make_schema(const SchemaArgs& args) {
    ssdm::DatasetSchema schema;
    schema.location_u = args.u_col;
    schema.location_v = args.v_col;
    schema.response = args.y_col;
    schema.covariates = parse_name_list(args.covariates);
    schema.standardize = parse_name_list(args.standardize);
    return schema;
}

std::vector<Eigen::Index> parse_size_list(const std::string& text) {
    std::vector<Eigen::Index> out;
    for (const int v : parse_index_list(text)) {
        if (v < 1) {
            throw ssdm::DataError("sample sizes must be positive, got " +
                                  std::to_string(v));
        }
        out.push_back(static_cast<Eigen::Index>(v));
    }
    if (out.empty()) {
        throw ssdm::DataError("at least one sample size is required");
    }
    return out;
}

ssdm::WeightMatrix resolve_weights(const ssdm::LoadedDataset& loaded,
                                   const std::string& weights_path,
                                   bool dense_ok, const Logger& log) {
    if (weights_path.empty()) {
        log.debug("building exponential-decay weights from the locations");
        return ssdm::build_exp_decay_weights(loaded.data.locations, dense_ok);
    }
    log.debug("loading weights from '" + weights_path + "'");
    Eigen::MatrixXd entries = ssdm::read_matrix_csv(weights_path);
    if (entries.rows() != loaded.data.n()) {
        throw ssdm::DataError(
            "weight matrix from '" + weights_path + "' has " +
            std::to_string(entries.rows()) + " rows but the dataset has " +
            std::to_string(loaded.data.n()));
    }
    return ssdm::load_weights(std::move(entries), dense_ok);
}

// ---------------------------------------------------------------- fit ----

struct FitArgs {
    std::string data_path;
    SchemaArgs schema;
    std::string weights_path;
    double h = 0.0;
    double h1 = 0.0;
    bool h_frac = false;
    bool h1_frac = false;
    std::string constant;
    std::string kernel = "epanechnikov";
    std::string se = "none";
    std::string out;
    std::string surface;
    bool dense_ok = false;
    int threads = default_threads();
    std::string log_level = "info";
};

int run_fit(const FitArgs& args) {
    Logger log{log_level_from_name(args.log_level)};
    const ssdm::LoadedDataset loaded =
        ssdm::read_dataset(args.data_path, make_schema(args.schema));
    log.info("loaded '" + args.data_path + "': n=" +
             std::to_string(loaded.data.n()) + ", p=" +
             std::to_string(loaded.data.p()) + ", location range=" +
             fmt(loaded.data.location_range()));
    loaded.data.validate();
    const ssdm::WeightMatrix w =
        resolve_weights(loaded, args.weights_path, args.dense_ok, log);

    ssdm::BandwidthPolicy policy;
    policy.h = args.h;
    policy.h1 = args.h1;
    policy.h_is_fraction = args.h_frac;
    policy.h1_is_fraction = args.h1_frac;
    const ssdm::BandwidthPolicy bw =
        policy.resolved(loaded.data.location_range());

    ssdm::ModelSpec spec;
    spec.constant_indices = parse_index_list(args.constant);
    const ssdm::KernelSpec kernel{ssdm::kernel_family_from_name(args.kernel)};
    const ssdm::SeMode se_mode = ssdm::se_mode_from_name(args.se);

    log.info("fitting with h=" + fmt(bw.h) + ", h1=" + fmt(bw.h1) +
             ", constant=" + spec.to_string());
    const ssdm::FitResult fit = ssdm::estimate(loaded.data, w, bw, spec,
                                               kernel, se_mode, args.threads);
    for (const std::string& warning : fit.warnings) log.warn(warning);
    log.info("alpha=" + fmt(fit.alpha_hat) + ", sigma2=" +
             fmt(fit.sigma2_hat) + ", loglik=" + fmt(fit.loglik));

    ssdm::RunConfig config;
    config.subcommand = "fit";
    config.settings = {
        {"data", args.data_path},
        {"weights", args.weights_path.empty() ? "exp-decay(locations)"
                                              : args.weights_path},
        {"h", fmt(bw.h)},
        {"h1", fmt(bw.h1)},
        {"constant", spec.to_string()},
        {"kernel", ssdm::kernel_family_name(kernel.family)},
        {"se", ssdm::se_mode_name(se_mode)},
        {"threads", std::to_string(args.threads)},
        {"dense_ok", args.dense_ok ? "true" : "false"},
        {"out", args.out},
    };
    if (!args.schema.standardize.empty())
        config.settings["standardize"] = args.schema.standardize;
    if (!args.surface.empty()) config.settings["surface"] = args.surface;

    ssdm::write_fit(fit, args.out, config);
    log.info("wrote '" + args.out + "'");
    if (!args.surface.empty()) {
        ssdm::write_surface_csv(loaded.data, fit, args.surface);
        log.info("wrote '" + args.surface + "'");
    }
    return 0;
}

// ------------------------------------------------------------- select ----

struct SelectArgs {
    std::string data_path;
    SchemaArgs schema;
    std::string weights_path;
    std::string criterion = "bic";
    std::string algorithm = "backward";
    double h = 0.0;
    bool h_frac = false;
    double sel_h = 0.0;
    bool sel_h_frac = false;
    bool strict = false;
    std::string out;
    bool dense_ok = false;
    int threads = default_threads();
    std::string log_level = "info";
};

int run_select(const SelectArgs& args) {
    Logger log{log_level_from_name(args.log_level)};
    const ssdm::LoadedDataset loaded =
        ssdm::read_dataset(args.data_path, make_schema(args.schema));
    log.info("loaded '" + args.data_path + "': n=" +
             std::to_string(loaded.data.n()) + ", p=" +
             std::to_string(loaded.data.p()));
    loaded.data.validate();
    const ssdm::WeightMatrix w =
        resolve_weights(loaded, args.weights_path, args.dense_ok, log);

    const ssdm::Criterion criterion =
        ssdm::criterion_from_name(args.criterion);
    const ssdm::SelectionAlgorithm algorithm =
        ssdm::algorithm_from_name(args.algorithm);
    ssdm::BandwidthPolicy bw;
    bw.h = args.h;
    bw.h_is_fraction = args.h_frac;
    bw.selection_h = args.sel_h;
    bw.selection_h_is_fraction = args.sel_h_frac;

    ssdm::SelectionOptions opts;
    opts.strict = args.strict;
    opts.threads = args.threads;

    const ssdm::KernelSpec kernel{};
    const ssdm::SelectionResult sel = ssdm::select_components(
        loaded.data, w, bw, kernel, criterion, algorithm, opts);
    for (const std::string& warning : sel.warnings) log.warn(warning);
    log.info("chosen constant set: " + sel.chosen.to_string() +
             " (sel_h=" + fmt(sel.sel_h) + ")");

    ssdm::RunConfig config;
    config.subcommand = "select";
    config.settings = {
        {"data", args.data_path},
        {"weights", args.weights_path.empty() ? "exp-decay(locations)"
                                              : args.weights_path},
        {"criterion", ssdm::criterion_name(criterion)},
        {"algorithm", ssdm::algorithm_name(algorithm)},
        {"h", args.h > 0.0 ? fmt(args.h) : "default(0.35 range)"},
        {"sel_h", fmt(sel.sel_h)},
        {"strict", args.strict ? "true" : "false"},
        {"threads", std::to_string(args.threads)},
        {"dense_ok", args.dense_ok ? "true" : "false"},
        {"out", args.out},
    };
    if (!args.schema.standardize.empty())
        config.settings["standardize"] = args.schema.standardize;
    ssdm::write_selection(sel, args.out, config);
    log.info("wrote '" + args.out + "'");
    return 0;
}

// ----------------------------------------------------------- simulate ----

struct SimulateArgs {
    int table = 1;
    std::string n_list = "400";
    int reps = 200;
    std::uint64_t seed = 42;
    double h = 0.0;  // table-1 default 0.4; table 2 defers to the engine
    double h1 = 0.0; // table-1 default 0.6
    bool h_frac = false;
    bool h1_frac = false;
    std::string criterion = "bic";
    std::string algorithm = "backward";
    double sel_h = 0.0;
    bool sel_h_frac = false;
    std::string out;
    std::string surfaces_out;
    int threads = default_threads();
    std::string log_level = "info";
};

int run_simulate(const SimulateArgs& args) {
    Logger log{log_level_from_name(args.log_level)};
    const std::vector<Eigen::Index> sizes = parse_size_list(args.n_list);

    ssdm::RunConfig config;
    config.subcommand = "simulate";
    config.settings = {
        {"table", std::to_string(args.table)},
        {"n", args.n_list},
        {"reps", std::to_string(args.reps)},
        {"seed", std::to_string(args.seed)},
        {"threads", std::to_string(args.threads)},
        {"out", args.out},
    };

    std::vector<ssdm::MonteCarloReport> reports;
    if (args.table == 1) {
        ssdm::BandwidthPolicy bw;
        bw.h = args.h;
        bw.h1 = args.h1;
        bw.h_is_fraction = args.h_frac;
        bw.h1_is_fraction = args.h1_frac;
        if (bw.h <= 0.0) {
            bw.h = 0.4;
            bw.h1 = 0.6;
            bw.h_is_fraction = false;
            bw.h1_is_fraction = false;
        }
        config.settings["h"] = fmt(bw.h);
        config.settings["h1"] = fmt(bw.h1);
        log.info("table 1: n={" + args.n_list + "}, reps=" +
                 std::to_string(args.reps));
        reports = ssdm::run_table1(sizes, args.reps, bw, args.seed,
                                   ssdm::KernelSpec{}, args.threads);
    } else if (args.table == 2) {
        const ssdm::Criterion criterion =
            ssdm::criterion_from_name(args.criterion);
        const ssdm::SelectionAlgorithm algorithm =
            ssdm::algorithm_from_name(args.algorithm);
        ssdm::BandwidthPolicy bw;
        bw.h = args.h;
        bw.h1 = args.h1;
        bw.h_is_fraction = args.h_frac;
        bw.h1_is_fraction = args.h1_frac;
        bw.selection_h = args.sel_h;
        bw.selection_h_is_fraction = args.sel_h_frac;
        config.settings["criterion"] = ssdm::criterion_name(criterion);
        config.settings["algorithm"] = ssdm::algorithm_name(algorithm);
        config.settings["h"] =
            args.h > 0.0 ? fmt(args.h) : "default(0.35 range)";
        config.settings["sel_h"] =
            args.sel_h > 0.0 ? fmt(args.sel_h) : "criterion-default";
        log.info("table 2: n={" + args.n_list + "}, reps=" +
                 std::to_string(args.reps) + ", " +
                 ssdm::criterion_name(criterion) + "+" +
                 ssdm::algorithm_name(algorithm));
        reports = ssdm::run_table2(sizes, args.reps, criterion, algorithm,
                                   args.seed, bw, ssdm::KernelSpec{},
                                   args.threads);
    } else {
        throw ssdm::DataError("--table must be 1 or 2, got " +
                              std::to_string(args.table));
    }

    for (const ssdm::MonteCarloReport& report : reports) {
        if (report.failures > 0) {
            log.warn("n=" + std::to_string(report.n) + ": " +
                     std::to_string(report.failures) +
                     " replication(s) failed");
        }
        if (report.table == 1) {
            log.info("n=" + std::to_string(report.n) +
                     ": mse_alpha=" + fmt(report.mse_alpha) +
                     ", mse_sigma2=" + fmt(report.mse_sigma2));
        } else {
            log.info("n=" + std::to_string(report.n) + ": " +
                     std::to_string(report.selection_counts.size()) +
                     " distinct chosen model(s)");
        }
    }
    if (!args.surfaces_out.empty()) {
        config.settings["surfaces_out"] = args.surfaces_out;
    }
    ssdm::write_simulation(reports, args.out, config);
    log.info("wrote '" + args.out + "'");
    if (!args.surfaces_out.empty()) {
        ssdm::write_median_surfaces(reports, args.surfaces_out);
        log.info("wrote median surfaces under '" + args.surfaces_out + "'");
    }
    return 0;
}

// ----------------------------------------------------------- diagnose ----

struct DiagnoseArgs {
    std::string fit_path;
    std::string data_path;
    SchemaArgs schema;
    int lags = 0;
    std::string out;
    int threads = default_threads();
    std::string log_level = "info";
};

int run_diagnose(const DiagnoseArgs& args) {
    Logger log{log_level_from_name(args.log_level)};
    const ssdm::FitResult fit = ssdm::read_fit(args.fit_path);
    const ssdm::LoadedDataset loaded =
        ssdm::read_dataset(args.data_path, make_schema(args.schema));
    if (fit.n != loaded.data.n()) {
        throw ssdm::DataError(
            "fit '" + args.fit_path + "' has n=" + std::to_string(fit.n) +
            " but dataset '" + args.data_path + "' has n=" +
            std::to_string(loaded.data.n()));
    }
    const ssdm::DiagnosticsReport report =
        ssdm::residual_diagnostics(fit, args.lags);
    log.info("diagnostics over " + std::to_string(report.lags) + " lags");

    ssdm::RunConfig config;
    config.subcommand = "diagnose";
    config.settings = {
        {"fit", args.fit_path},
        {"data", args.data_path},
        {"lags", std::to_string(report.lags)},
        {"out", args.out},
    };
    ssdm::write_diagnostics(report, args.out, config);
    log.info("wrote '" + args.out + "'");
    return 0;
}

CLI::App* make_subcommand(CLI::App& app, const std::string& name,
                          const std::string& description) {
    CLI::App* cmd = app.add_subcommand(name, description);
    // Drop the short -h help alias: --h is a bandwidth option.
    cmd->set_help_flag("--help", "Print this help message and exit");
    return cmd;
}

void add_common_flags(CLI::App* cmd, int& threads, std::string& log_level) {
    cmd->add_option("--threads", threads,
                    "Worker threads (default: hardware concurrency)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--log-level", log_level,
                    "Stderr verbosity: error, warn, info, debug")
        ->default_val("info");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiparametric spatial dynamic model toolkit"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CLI::App* fit_cmd = make_subcommand(
        app, "fit", "Fit the model on a dataset at given bandwidths");
    fit_cmd->add_option("--data", fit_args.data_path, "Dataset CSV")
        ->required();
    add_schema_flags(fit_cmd, fit_args.schema);
    fit_cmd->add_option("--weights", fit_args.weights_path,
                        "Weight matrix CSV (default: exponential decay "
                        "built from the location columns)");
    fit_cmd->add_option("--h", fit_args.h, "Profiling bandwidth")->required();
    fit_cmd->add_option("--h1", fit_args.h1,
                        "Surface bandwidth (default: 1.5*h)");
    fit_cmd->add_flag("--h-frac", fit_args.h_frac,
                      "Interpret --h as a fraction of the location range");
    fit_cmd->add_flag("--h1-frac", fit_args.h1_frac,
                      "Interpret --h1 as a fraction of the location range");
    fit_cmd->add_option("--constant", fit_args.constant,
                        "Comma-separated 1-based indices of constant "
                        "coefficients, e.g. 3,5");
    fit_cmd->add_option("--kernel", fit_args.kernel,
                        "epanechnikov, quartic, or gaussian")
        ->default_val("epanechnikov");
    fit_cmd->add_option("--se", fit_args.se,
                        "Standard errors: none, normal, or sandwich")
        ->default_val("none");
    fit_cmd->add_option("--out", fit_args.out, "Fit JSON output path")
        ->required();
    fit_cmd->add_option("--surface", fit_args.surface,
                        "Optional coefficient-surface CSV output path");
    fit_cmd->add_flag("--dense-ok", fit_args.dense_ok,
                      "Allow dense weight matrices beyond the size guard");
    add_common_flags(fit_cmd, fit_args.threads, fit_args.log_level);

    SelectArgs select_args;
    CLI::App* select_cmd = make_subcommand(
        app, "select",
        "Identify constant coefficients by information criterion");
    select_cmd->add_option("--data", select_args.data_path, "Dataset CSV")
        ->required();
    add_schema_flags(select_cmd, select_args.schema);
    select_cmd->add_option("--weights", select_args.weights_path,
                           "Weight matrix CSV (default: exponential decay)");
    select_cmd->add_option("--criterion", select_args.criterion,
                           "aic or bic")
        ->default_val("bic");
    select_cmd->add_option("--algorithm", select_args.algorithm,
                           "backward or ctar")
        ->default_val("backward");
    select_cmd->add_option("--h", select_args.h,
                           "Fitting bandwidth for candidate models "
                           "(default: 0.35 of the location range)");
    select_cmd->add_flag("--h-frac", select_args.h_frac,
                         "Interpret --h as a fraction of the location range");
    select_cmd->add_option("--sel-h", select_args.sel_h,
                           "Selection bandwidth (default: 0.2*range for "
                           "AIC, 0.3*range for BIC)");
    select_cmd->add_flag("--sel-h-frac", select_args.sel_h_frac,
                         "Interpret --sel-h as a fraction of the range");
    select_cmd->add_flag("--strict", select_args.strict,
                         "Re-profile alpha for every candidate model");
    select_cmd->add_option("--out", select_args.out,
                           "Selection JSON output path")
        ->required();
    select_cmd->add_flag("--dense-ok", select_args.dense_ok,
                         "Allow dense weight matrices beyond the size guard");
    add_common_flags(select_cmd, select_args.threads, select_args.log_level);

    SimulateArgs sim_args;
    CLI::App* sim_cmd = make_subcommand(
        app, "simulate", "Monte Carlo study (table 1: estimation metrics; "
                         "table 2: selection ratios)");
    sim_cmd->add_option("--table", sim_args.table, "1 or 2")->required();
    sim_cmd->add_option("--n", sim_args.n_list,
                        "Comma-separated sample sizes, e.g. 400,500,600")
        ->required();
    sim_cmd->add_option("--reps", sim_args.reps, "Replications per n")
        ->required()
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim_args.seed, "Master RNG seed")
        ->default_val(42);
    sim_cmd->add_option("--h", sim_args.h,
                        "Profiling bandwidth (table-1 default: 0.4; table-2 "
                        "candidate fits default: 0.35 of the location "
                        "range)");
    sim_cmd->add_option("--h1", sim_args.h1,
                        "Surface bandwidth (table-1 default: 0.6)");
    sim_cmd->add_flag("--h-frac", sim_args.h_frac,
                      "Interpret --h as a fraction of the location range");
    sim_cmd->add_flag("--h1-frac", sim_args.h1_frac,
                      "Interpret --h1 as a fraction of the location range");
    sim_cmd->add_option("--criterion", sim_args.criterion,
                        "Table-2 criterion: aic or bic")
        ->default_val("bic");
    sim_cmd->add_option("--algorithm", sim_args.algorithm,
                        "Table-2 algorithm: backward or ctar")
        ->default_val("backward");
    sim_cmd->add_option("--sel-h", sim_args.sel_h,
                        "Table-2 selection bandwidth (default: criterion "
                        "rule per dataset)");
    sim_cmd->add_flag("--sel-h-frac", sim_args.sel_h_frac,
                      "Interpret --sel-h as a fraction of the range");
    sim_cmd->add_option("--out", sim_args.out, "Report JSON output path")
        ->required();
    sim_cmd->add_option("--surfaces-out", sim_args.surfaces_out,
                        "Directory for median-run surface CSVs");
    add_common_flags(sim_cmd, sim_args.threads, sim_args.log_level);

    DiagnoseArgs diag_args;
    CLI::App* diag_cmd = make_subcommand(
        app, "diagnose",
        "Residual diagnostics (ACF, PACF, QQ) from a saved fit");
    diag_cmd->add_option("--fit", diag_args.fit_path, "Fit JSON path")
        ->required();
    diag_cmd->add_option("--data", diag_args.data_path, "Dataset CSV")
        ->required();
    add_schema_flags(diag_cmd, diag_args.schema);
    diag_cmd->add_option("--lags", diag_args.lags,
                         "Number of lags (default: min(40, n/4))");
    diag_cmd->add_option("--out", diag_args.out,
                         "Diagnostics JSON output path")
        ->required();
    add_common_flags(diag_cmd, diag_args.threads, diag_args.log_level);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (fit_cmd->parsed()) return run_fit(fit_args);
        if (select_cmd->parsed()) return run_select(select_args);
        if (sim_cmd->parsed()) return run_simulate(sim_args);
        return run_diagnose(diag_args);
    } catch (const ssdm::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const ssdm::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}

#include "ssdm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "ssdm/errors.hpp"

namespace ssdm {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end &&
           std::isspace(static_cast<unsigned char>(s[begin]))) {
        ++begin;
    }
    while (end > begin &&
           std::isspace(static_cast<unsigned char>(s[end - 1]))) {
        --end;
    }
    return s.substr(begin, end - begin);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (const char c : text) {
        if (c == '\n') {
            if (!current.empty() && current.back() == '\r') {
                current.pop_back();
            }
            lines.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) lines.push_back(current);
    return lines;
}

enum class Delimiter { Comma, Tab, Semicolon, Whitespace };

Delimiter detect_delimiter(const std::string& header) {
    if (header.find(',') != std::string::npos) return Delimiter::Comma;
    if (header.find('\t') != std::string::npos) return Delimiter::Tab;
    if (header.find(';') != std::string::npos) return Delimiter::Semicolon;
    return Delimiter::Whitespace;
}

std::vector<std::string> split_cells(const std::string& line,
                                     Delimiter delim) {
    std::vector<std::string> cells;
    if (delim == Delimiter::Whitespace) {
        std::istringstream in(line);
        std::string token;
        while (in >> token) cells.push_back(token);
        return cells;
    }
    const char sep = delim == Delimiter::Comma
                         ? ','
                         : (delim == Delimiter::Tab ? '\t' : ';');
    std::string current;
    for (const char c : line) {
        if (c == sep) {
            cells.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    cells.push_back(trim(current));
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row,
                  const std::string& column) {
    const std::string value = trim(cell);
    if (value.empty()) {
        throw DataError("row " + std::to_string(row) + ", column '" +
                        column + "': missing value");
    }
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw DataError("row " + std::to_string(row) + ", column '" +
                        column + "': cannot parse '" + value +
                        "' as a number");
    }
    if (!std::isfinite(out)) {
        throw DataError("row " + std::to_string(row) + ", column '" +
                        column + "': non-finite value");
    }
    return out;
}

struct Table {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows; // raw cells
};

Table read_table(const std::string& path) {
    const std::vector<std::string> lines = split_lines(read_file(path));
    std::vector<std::string> content;
    content.reserve(lines.size());
    for (const std::string& line : lines) {
        if (!trim(line).empty()) content.push_back(line);
    }
    if (content.size() < 2) {
        throw DataError("'" + path +
                        "' needs a header row and at least one data row");
    }
    const Delimiter delim = detect_delimiter(content.front());
    Table table;
    table.names = split_cells(content.front(), delim);
    for (std::string& name : table.names) name = trim(name);
    for (std::size_t i = 1; i < content.size(); ++i) {
        std::vector<std::string> cells = split_cells(content[i], delim);
        if (cells.size() != table.names.size()) {
            throw DataError("row " + std::to_string(i) + " of '" + path +
                            "' has " + std::to_string(cells.size()) +
                            " cells, expected " +
                            std::to_string(table.names.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

// Column name -> index; duplicated names poison the lookup.
class ColumnIndex {
public:
    explicit ColumnIndex(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            auto [it, inserted] = map_.emplace(names[i], i);
            if (!inserted) duplicates_.insert(names[i]);
        }
    }

    bool contains(const std::string& name) const {
        return map_.count(name) > 0;
    }

    std::size_t at(const std::string& name) const {
        if (duplicates_.count(name) > 0) {
            throw DataError("column '" + name +
                            "' appears more than once in the header");
        }
        const auto it = map_.find(name);
        if (it == map_.end()) {
            throw DataError("column '" + name + "' not found in the file");
        }
        return it->second;
    }

private:
    std::unordered_map<std::string, std::size_t> map_;
    std::set<std::string> duplicates_;
};

Eigen::VectorXd column_values(const Table& table, std::size_t col) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(table.rows.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out(static_cast<Eigen::Index>(r)) =
            parse_cell(table.rows[r][col], r + 1, table.names[col]);
    }
    return out;
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

void ensure_finite(double value, const std::string& field) {
    if (!std::isfinite(value)) {
        throw DataError("refusing to serialize non-finite value in field '" +
                        field + "'");
    }
}

json vector_to_json(const Eigen::VectorXd& v, const std::string& field) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        ensure_finite(v(i), field);
        out.push_back(v(i));
    }
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m, const std::string& field) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            ensure_finite(m(i, j), field);
            row.push_back(m(i, j));
        }
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) {
        throw DataError("fit file field '" + field + "' must be an array");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw DataError("fit file field '" + field +
                        "' must be an array of rows");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) !=
            cols) {
            throw DataError("fit file field '" + field +
                            "' has ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            out(i, c) = j[static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(c)].get<double>();
        }
    }
    return out;
}

const json& require(const json& j, const std::string& field) {
    const auto it = j.find(field);
    if (it == j.end()) {
        throw DataError("fit file is missing field '" + field + "'");
    }
    return *it;
}

json config_to_json(const RunConfig& config) {
    json out;
    out["subcommand"] = config.subcommand;
    json settings = json::object();
    for (const auto& [key, value] : config.settings) settings[key] = value;
    out["settings"] = std::move(settings);
    return out;
}

json fit_to_json(const FitResult& fit) {
    json out;
    ensure_finite(fit.alpha_hat, "alpha_hat");
    ensure_finite(fit.sigma2_hat, "sigma2_hat");
    ensure_finite(fit.loglik, "loglik");
    ensure_finite(fit.logdet_a, "logdet_a");
    ensure_finite(fit.n_effective_params, "n_effective_params");
    ensure_finite(fit.aic, "aic");
    ensure_finite(fit.bic, "bic");
    out["n"] = fit.n;
    out["p"] = fit.p;
    out["alpha_hat"] = fit.alpha_hat;
    out["sigma2_hat"] = fit.sigma2_hat;
    out["loglik"] = fit.loglik;
    out["logdet_a"] = fit.logdet_a;
    out["n_effective_params"] = fit.n_effective_params;
    out["aic"] = fit.aic;
    out["bic"] = fit.bic;
    out["h"] = fit.h;
    out["h1"] = fit.h1;
    out["kernel"] = kernel_family_name(fit.kernel);
    out["constant_indices"] = fit.spec.constant_indices;
    json consts = json::object();
    for (const auto& [j, value] : fit.beta_const) {
        ensure_finite(value, "beta_const");
        consts[std::to_string(j)] = value;
    }
    out["beta_const"] = std::move(consts);
    out["se_mode"] = se_mode_name(fit.se_mode);
    ensure_finite(fit.alpha_interval.first, "alpha_interval");
    ensure_finite(fit.alpha_interval.second, "alpha_interval");
    out["alpha_interval"] = {fit.alpha_interval.first,
                             fit.alpha_interval.second};
    if (fit.se_alpha) {
        ensure_finite(*fit.se_alpha, "se_alpha");
        out["se_alpha"] = *fit.se_alpha;
    }
    if (fit.se_sigma2) {
        ensure_finite(*fit.se_sigma2, "se_sigma2");
        out["se_sigma2"] = *fit.se_sigma2;
    }
    out["warnings"] = fit.warnings;
    out["beta_surface"] = matrix_to_json(fit.beta_surface, "beta_surface");
    if (fit.beta_se_surface) {
        out["beta_se_surface"] =
            matrix_to_json(*fit.beta_se_surface, "beta_se_surface");
    }
    out["residuals"] = vector_to_json(fit.residuals, "residuals");
    return out;
}

FitResult fit_from_json(const json& j) {
    FitResult fit;
    fit.n = require(j, "n").get<Eigen::Index>();
    fit.p = require(j, "p").get<Eigen::Index>();
    fit.alpha_hat = require(j, "alpha_hat").get<double>();
    fit.sigma2_hat = require(j, "sigma2_hat").get<double>();
    fit.loglik = require(j, "loglik").get<double>();
    fit.logdet_a = require(j, "logdet_a").get<double>();
    fit.n_effective_params =
        require(j, "n_effective_params").get<double>();
    fit.aic = require(j, "aic").get<double>();
    fit.bic = require(j, "bic").get<double>();
    fit.h = require(j, "h").get<double>();
    fit.h1 = require(j, "h1").get<double>();
    fit.kernel =
        kernel_family_from_name(require(j, "kernel").get<std::string>());
    fit.spec.constant_indices =
        require(j, "constant_indices").get<std::vector<int>>();
    for (const auto& [key, value] : require(j, "beta_const").items()) {
        fit.beta_const[std::stoi(key)] = value.get<double>();
    }
    fit.se_mode =
        se_mode_from_name(require(j, "se_mode").get<std::string>());
    const json& interval = require(j, "alpha_interval");
    if (!interval.is_array() || interval.size() != 2) {
        throw DataError("fit file field 'alpha_interval' must hold 2 values");
    }
    fit.alpha_interval = {interval[0].get<double>(),
                          interval[1].get<double>()};
    if (j.contains("se_alpha")) fit.se_alpha = j["se_alpha"].get<double>();
    if (j.contains("se_sigma2")) {
        fit.se_sigma2 = j["se_sigma2"].get<double>();
    }
    fit.warnings = require(j, "warnings").get<std::vector<std::string>>();
    fit.beta_surface = matrix_from_json(require(j, "beta_surface"),
                                        "beta_surface");
    if (j.contains("beta_se_surface")) {
        fit.beta_se_surface =
            matrix_from_json(j["beta_se_surface"], "beta_se_surface");
    }
    fit.residuals = vector_from_json(require(j, "residuals"), "residuals");
    if (fit.beta_surface.rows() != fit.n || fit.beta_surface.cols() != fit.p ||
        fit.residuals.size() != fit.n) {
        throw DataError("fit file dimensions are inconsistent");
    }
    return fit;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open '" + path + "' for writing");
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw DataError("failed while writing '" + path + "'");
    }
}

json parse_json_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw DataError("cannot parse '" + path +
                        "' as JSON: " + e.what());
    }
}

void check_format(const json& j, const std::string& expected,
                  const std::string& path) {
    if (!j.contains("format") || j["format"] != expected) {
        throw DataError("'" + path + "' is not a " + expected + " file");
    }
    if (!j.contains("format_version") ||
        !j["format_version"].is_number_integer() ||
        j["format_version"].get<int>() != kFormatVersion) {
        throw DataError("'" + path + "' has an unsupported format version "
                        "(expected " + std::to_string(kFormatVersion) + ")");
    }
}

json envelope(const std::string& format, const RunConfig& config) {
    json out;
    out["format"] = format;
    out["format_version"] = kFormatVersion;
    out["written_at"] = timestamp_utc();
    out["config"] = config_to_json(config);
    return out;
}

std::string format_double(double value) {
    char buffer[40];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw NumericError("failed to format a floating-point value");
    }
    return std::string(buffer, ptr);
}

} // namespace

DatasetSchema DatasetSchema::boston() {
    DatasetSchema schema;
    schema.location_u = "LON";
    schema.location_v = "LAT";
    schema.response = "MEDV";
    schema.covariates = {"CRIM", "RM", "RAD", "TAX", "LSTAT"};
    return schema;
}

LoadedDataset read_dataset(const std::string& path,
                           const DatasetSchema& schema) {
    const Table table = read_table(path);
    const ColumnIndex index(table.names);

    std::string loc_u = schema.location_u;
    std::string loc_v = schema.location_v;
    if (loc_u.empty() || loc_v.empty()) {
        if (index.contains("u") && index.contains("v")) {
            loc_u = "u";
            loc_v = "v";
        } else if (index.contains("LON") && index.contains("LAT")) {
            loc_u = "LON";
            loc_v = "LAT";
        } else {
            throw DataError("cannot auto-detect location columns (looked "
                            "for u,v and LON,LAT); name them explicitly");
        }
    }
    std::string response = schema.response;
    if (response.empty()) {
        if (index.contains("y")) {
            response = "y";
        } else if (index.contains("MEDV")) {
            response = "MEDV";
        } else {
            throw DataError("cannot auto-detect the response column (looked "
                            "for y and MEDV); name it explicitly");
        }
    }
    std::vector<std::string> covariates = schema.covariates;
    if (covariates.empty()) {
        for (const std::string& name : table.names) {
            if (name != loc_u && name != loc_v && name != response) {
                covariates.push_back(name);
            }
        }
    }
    if (covariates.empty()) {
        throw DataError("no covariate columns remain after assigning "
                        "locations and the response");
    }

    const Eigen::Index n = static_cast<Eigen::Index>(table.rows.size());
    const Eigen::Index p = static_cast<Eigen::Index>(covariates.size());
    LoadedDataset out;
    out.location_u = loc_u;
    out.location_v = loc_v;
    out.response = response;
    out.covariate_names = covariates;

    out.data.locations.resize(n, 2);
    out.data.locations.col(0) = column_values(table, index.at(loc_u));
    out.data.locations.col(1) = column_values(table, index.at(loc_v));
    out.data.y = column_values(table, index.at(response));
    out.data.x.resize(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        out.data.x.col(j) = column_values(
            table, index.at(covariates[static_cast<std::size_t>(j)]));
    }

    for (const std::string& name : schema.standardize) {
        const auto it =
            std::find(covariates.begin(), covariates.end(), name);
        if (it == covariates.end()) {
            throw DataError("standardization target '" + name +
                            "' is not a covariate column");
        }
        const Eigen::Index j = it - covariates.begin();
        const double mean = out.data.x.col(j).mean();
        const double sd = std::sqrt(
            (out.data.x.col(j).array() - mean).square().sum() /
            static_cast<double>(n - 1));
        if (!(sd > 0.0)) {
            throw DataError("covariate '" + name +
                            "' is constant; cannot standardize");
        }
        out.data.x.col(j) = (out.data.x.col(j).array() - mean) / sd;
        out.standardized.push_back(name);
    }
    return out;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    const std::vector<std::string> lines = split_lines(read_file(path));
    std::vector<std::string> content;
    for (const std::string& line : lines) {
        if (!trim(line).empty()) content.push_back(line);
    }
    if (content.empty()) {
        throw DataError("'" + path + "' contains no rows");
    }
    const Delimiter delim = detect_delimiter(content.front());
    const std::size_t cols = split_cells(content.front(), delim).size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(content.size()),
                        static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < content.size(); ++r) {
        const std::vector<std::string> cells =
            split_cells(content[r], delim);
        if (cells.size() != cols) {
            throw DataError("row " + std::to_string(r + 1) + " of '" + path +
                            "' has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_cell(cells[c], r + 1,
                           "col " + std::to_string(c + 1));
        }
    }
    return out;
}

void write_fit(const FitResult& fit, const std::string& path,
               const RunConfig& config) {
    json out = envelope("ssdm-fit", config);
    out.update(fit_to_json(fit));
    write_json_file(out, path);
}

FitResult read_fit(const std::string& path) {
    const json j = parse_json_file(path);
    check_format(j, "ssdm-fit", path);
    return fit_from_json(j);
}

void write_surface_csv(const SpatialDataset& data, const FitResult& fit,
                       const std::string& path) {
    if (fit.beta_surface.rows() != data.n() ||
        fit.beta_surface.cols() != data.p()) {
        throw DataError("fit surface does not match the dataset");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open '" + path + "' for writing");
    }
    out << "u,v";
    for (Eigen::Index j = 1; j <= fit.p; ++j) out << ",beta_" << j;
    if (fit.beta_se_surface) {
        for (Eigen::Index j = 1; j <= fit.p; ++j) out << ",se_" << j;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        out << format_double(data.locations(i, 0)) << ','
            << format_double(data.locations(i, 1));
        for (Eigen::Index j = 0; j < fit.p; ++j) {
            out << ',' << format_double(fit.beta_surface(i, j));
        }
        if (fit.beta_se_surface) {
            for (Eigen::Index j = 0; j < fit.p; ++j) {
                out << ',' << format_double((*fit.beta_se_surface)(i, j));
            }
        }
        out << '\n';
    }
    if (!out) {
        throw DataError("failed while writing '" + path + "'");
    }
}

void write_selection(const SelectionResult& sel, const std::string& path,
                     const RunConfig& config) {
    json out = envelope("ssdm-selection", config);
    out["criterion"] = criterion_name(sel.criterion);
    out["algorithm"] = algorithm_name(sel.algorithm);
    out["sel_h"] = sel.sel_h;
    out["alpha_hat"] = sel.alpha_hat;
    out["sigma2_hat"] = sel.sigma2_hat;
    out["chosen"] = sel.chosen.to_string();
    out["chosen_indices"] = sel.chosen.constant_indices;
    if (!sel.ctar_ratios.empty()) {
        json ratios = json::array();
        for (const double r : sel.ctar_ratios) {
            if (std::isinf(r)) {
                ratios.push_back("inf");
            } else {
                ratios.push_back(r);
            }
        }
        out["ctar_ratios"] = std::move(ratios);
    }
    json trace = json::array();
    for (const SelectionTraceEntry& entry : sel.trace) {
        json item;
        item["model"] = entry.model.to_string();
        item["feasible"] = entry.feasible;
        if (entry.feasible) {
            item["criterion_value"] = entry.criterion_value;
            item["loglik"] = entry.loglik;
        } else {
            item["error"] = entry.error;
        }
        trace.push_back(std::move(item));
    }
    out["trace"] = std::move(trace);
    out["warnings"] = sel.warnings;
    write_json_file(out, path);
}

void write_simulation(const std::vector<MonteCarloReport>& reports,
                      const std::string& path, const RunConfig& config) {
    static const std::vector<std::string> kTable2Columns = {
        "{5}", "{1,5}", "{4,5}", "{1,4,5}", "{1,2,4,5}", "{1,2,3,4,5}"};

    json out = envelope("ssdm-simulation", config);
    json items = json::array();
    for (const MonteCarloReport& report : reports) {
        json item;
        item["table"] = report.table;
        item["n"] = report.n;
        item["requested_reps"] = report.requested_reps;
        item["reps"] = report.reps;
        item["failures"] = report.failures;
        item["failure_messages"] = report.failure_messages;
        item["alpha_true"] = report.alpha_true;
        item["sigma2_true"] = report.sigma2_true;
        if (report.table == 1) {
            item["h"] = report.h;
            item["h1"] = report.h1;
            item["mse_alpha"] = report.mse_alpha;
            item["mse_sigma2"] = report.mse_sigma2;
            item["mise_beta"] = report.mise_beta;
            item["median_rep"] = report.median_rep;
            if (report.median_rep >= 0) {
                item["median_run"] = fit_to_json(report.median_run);
            }
        } else {
            item["criterion"] = report.criterion;
            item["algorithm"] = report.algorithm;
            item["sel_h"] = report.sel_h;
            json counts = json::object();
            for (const auto& [model, count] : report.selection_counts) {
                counts[model] = count;
            }
            item["selection_counts"] = std::move(counts);
            // Ratios over the fixed column set plus an "other" bucket.
            json ratios = json::object();
            const double total = static_cast<double>(report.reps);
            int covered = 0;
            for (const std::string& model : kTable2Columns) {
                const auto it = report.selection_counts.find(model);
                const int count =
                    it == report.selection_counts.end() ? 0 : it->second;
                covered += count;
                ratios[model] =
                    total > 0.0 ? static_cast<double>(count) / total : 0.0;
            }
            ratios["other"] =
                total > 0.0
                    ? static_cast<double>(report.reps - covered) / total
                    : 0.0;
            item["ratios"] = std::move(ratios);
        }
        items.push_back(std::move(item));
    }
    out["reports"] = std::move(items);
    write_json_file(out, path);
}

void write_median_surfaces(const std::vector<MonteCarloReport>& reports,
                           const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw DataError("cannot create directory '" + dir +
                        "': " + ec.message());
    }
    for (const MonteCarloReport& report : reports) {
        if (report.median_rep < 0) continue;
        const Eigen::Index n = report.median_locations.rows();
        const Eigen::Index p = report.median_true_beta.cols();
        const std::string path =
            (std::filesystem::path(dir) /
             ("table" + std::to_string(report.table) + "_n" +
              std::to_string(report.n) + "_median_surfaces.csv"))
                .string();
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw DataError("cannot open '" + path + "' for writing");
        }
        out << "u,v";
        for (Eigen::Index j = 1; j <= p; ++j) out << ",beta_true_" << j;
        for (Eigen::Index j = 1; j <= p; ++j) out << ",beta_hat_" << j;
        out << '\n';
        for (Eigen::Index i = 0; i < n; ++i) {
            out << format_double(report.median_locations(i, 0)) << ','
                << format_double(report.median_locations(i, 1));
            for (Eigen::Index j = 0; j < p; ++j) {
                out << ',' << format_double(report.median_true_beta(i, j));
            }
            for (Eigen::Index j = 0; j < p; ++j) {
                out << ','
                    << format_double(report.median_run.beta_surface(i, j));
            }
            out << '\n';
        }
        if (!out) {
            throw DataError("failed while writing '" + path + "'");
        }
    }
}

void write_diagnostics(const DiagnosticsReport& report,
                       const std::string& path, const RunConfig& config) {
    json out = envelope("ssdm-diagnostics", config);
    out["n"] = report.residuals.size();
    out["lags"] = report.lags;
    out["band"] = report.band;
    out["ordering_note"] = report.ordering_note;
    out["residuals"] = vector_to_json(report.residuals, "residuals");
    out["acf"] = vector_to_json(report.acf, "acf");
    out["pacf"] = vector_to_json(report.pacf, "pacf");
    out["qq_theoretical"] =
        vector_to_json(report.qq_theoretical, "qq_theoretical");
    out["qq_sample"] = vector_to_json(report.qq_sample, "qq_sample");
    write_json_file(out, path);
}

} // namespace ssdm

#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssdm/dataset.hpp"
#include "ssdm/diagnostics.hpp"
#include "ssdm/profile.hpp"
#include "ssdm/selection.hpp"
#include "ssdm/simulate.hpp"

namespace ssdm {

// Column roles for dataset ingestion. Empty entries are auto-detected:
// locations try ("u","v") then ("LON","LAT"); the response tries "y" then
// "MEDV"; an empty covariate list takes every remaining column in file
// order. Names listed in `standardize` are centered and scaled (opt-in;
// covariates are used raw by default).
struct DatasetSchema {
    std::string location_u;
    std::string location_v;
    std::string response;
    std::vector<std::string> covariates;
    std::vector<std::string> standardize;

    // LON/LAT locations, MEDV response, CRIM RM RAD TAX LSTAT covariates.
    static DatasetSchema boston();
};

struct LoadedDataset {
    SpatialDataset data;
    std::string location_u;
    std::string location_v;
    std::string response;
    std::vector<std::string> covariate_names;
    std::vector<std::string> standardized;
};

// CSV with a header row; the cell delimiter (comma, tab, or semicolon) is
// detected from the header. Missing or non-numeric cells are rejected with
// their row and column.
LoadedDataset read_dataset(const std::string& path,
                           const DatasetSchema& schema = {});

// Headerless numeric grid (used for user-supplied weight matrices).
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Fully resolved run settings, echoed verbatim into every output file so
// each artifact records how it was produced.
struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> settings;
};

// Versioned JSON round-trip of every FitResult field. Non-finite values are
// refused (JSON has no representation for them). read_fit rejects files
// whose format or version does not match.
void write_fit(const FitResult& fit, const std::string& path,
               const RunConfig& config = {});
FitResult read_fit(const std::string& path);

// u,v,beta_1..beta_p[,se_1..se_p] rows aligned with the dataset.
void write_surface_csv(const SpatialDataset& data, const FitResult& fit,
                       const std::string& path);

void write_selection(const SelectionResult& sel, const std::string& path,
                     const RunConfig& config = {});

void write_simulation(const std::vector<MonteCarloReport>& reports,
                      const std::string& path, const RunConfig& config = {});

// One CSV per report into dir: u, v, true and fitted coefficient surfaces
// of the median-performance replication.
void write_median_surfaces(const std::vector<MonteCarloReport>& reports,
                           const std::string& dir);

void write_diagnostics(const DiagnosticsReport& report,
                       const std::string& path,
                       const RunConfig& config = {});

} // namespace ssdm

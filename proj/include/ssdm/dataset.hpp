#pragma once

#include <Eigen/Dense>

namespace ssdm {

// Observations of the spatial model: response y, covariates X, and planar
// locations. Locations share units with every bandwidth.
struct SpatialDataset {
    Eigen::MatrixXd locations; // n x 2 (u, v)
    Eigen::MatrixXd x;         // n x p
    Eigen::VectorXd y;         // n

    Eigen::Index n() const { return y.size(); }
    Eigen::Index p() const { return x.cols(); }

    // Coordinate span per axis; fraction-of-range bandwidths resolve against
    // the larger of the two.
    double span_u() const {
        return locations.col(0).maxCoeff() - locations.col(0).minCoeff();
    }
    double span_v() const {
        return locations.col(1).maxCoeff() - locations.col(1).minCoeff();
    }
    double location_range() const { return std::max(span_u(), span_v()); }

    // Throws DataError unless finite, consistently sized, and n > 3p.
    void validate() const;
};

} // namespace ssdm

#pragma once

#include <stdexcept>
#include <string>

namespace ssdm {

// Base for all library errors. CLI exit-code contract:
//   usage errors     -> 1 (raised by the argument parser, not these types)
//   DataError        -> 2
//   NumericError     -> 3
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: unreadable files, missing columns, non-numeric cells,
// dimension mismatches, invalid configuration values.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Numerical failure: singular systems, broken caches, infeasible bandwidths.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

// A local design matrix was (near-)singular at some target location. Carries
// the offending target and the smallest bandwidth that would admit enough
// observations there, so callers can act on the suggestion.
class BandwidthTooSmall : public NumericError {
public:
    BandwidthTooSmall(const std::string& msg, std::size_t target_index,
                      double target_u, double target_v, double suggested_h)
        : NumericError(msg),
          target_index(target_index),
          target_u(target_u),
          target_v(target_v),
          suggested_h(suggested_h) {}

    std::size_t target_index;
    double target_u;
    double target_v;
    double suggested_h;
};

} // namespace ssdm

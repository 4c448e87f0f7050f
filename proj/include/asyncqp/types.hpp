#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace asyncqp {

// Dense, row-major, double precision throughout. Row-major keeps each
// agent's row block Q^[i] contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A planning inequality cannot be satisfied. The message names the
/// violated inequality with the offending values substituted in.
struct InfeasibleError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace asyncqp

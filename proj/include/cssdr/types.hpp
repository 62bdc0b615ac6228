#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cssdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CSV ingestion failure. Carries the kind of defect and, where it applies,
/// the 1-based row (header = row 1) and column of the offending cell.
struct CsvError : Error {
    enum class Kind {
        missing_file,
        empty_file,
        non_numeric_cell,
        too_few_rows,
        response_missing,
        ragged_row,
        no_predictors,
    };

    CsvError(Kind k, const std::string& message, std::size_t row = 0, std::size_t col = 0)
        : Error(message), kind(k), row(row), col(col) {}

    Kind kind;
    std::size_t row;
    std::size_t col;
};

/// Numerical failure: singular covariance, degenerate Gram matrix,
/// kernel denominator underflow, non-finite objective, and the like.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace cssdr

#include "cssdr/dataset.hpp"

#include "cssdr/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cssdr {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

bool parse_number(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !cell.empty();
}

}  // namespace

Dataset make_dataset(Matrix X, Vector y) {
    if (X.rows() != y.size()) {
        throw std::invalid_argument("predictor rows (" + std::to_string(X.rows()) +
                                    ") and response length (" + std::to_string(y.size()) +
                                    ") differ");
    }
    if (X.rows() < 2) {
        throw std::invalid_argument("dataset needs at least 2 observations");
    }
    if (X.cols() < 1) {
        throw std::invalid_argument("dataset needs at least 1 predictor");
    }
    if (!X.allFinite() || !y.allFinite()) {
        throw std::invalid_argument("dataset contains non-finite entries");
    }
    Dataset ds;
    ds.X = std::move(X);
    ds.y = std::move(y);
    ds.shift_x = Vector::Zero(ds.p());
    ds.scale_x = Vector::Ones(ds.p());
    return ds;
}

Dataset load_csv(const std::string& path, const std::string& response) {
    std::ifstream in(path);
    if (!in) {
        throw CsvError(CsvError::Kind::missing_file, "cannot open file: " + path);
    }
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty() && rows.empty()) {
            continue;  // tolerate leading blank lines only
        }
        rows.push_back(split_csv_line(line));
    }
    while (!rows.empty() && rows.back().size() == 1 && rows.back()[0].empty()) {
        rows.pop_back();  // trailing blank line
    }
    if (rows.empty()) {
        throw CsvError(CsvError::Kind::empty_file, "file has no header row: " + path);
    }
    const std::vector<std::string>& header = rows.front();
    const std::size_t ncols = header.size();
    if (rows.size() < 3) {
        throw CsvError(CsvError::Kind::too_few_rows,
                       "need at least 2 data rows, found " + std::to_string(rows.size() - 1));
    }

    // Resolve the response column: exact name first, then 0-based index.
    std::size_t resp_col = ncols;
    for (std::size_t c = 0; c < ncols; ++c) {
        if (header[c] == response) {
            resp_col = c;
            break;
        }
    }
    if (resp_col == ncols) {
        std::size_t idx = 0;
        const char* b = response.data();
        auto [ptr, ec] = std::from_chars(b, b + response.size(), idx);
        if (ec == std::errc() && ptr == b + response.size() && idx < ncols) {
            resp_col = idx;
        }
    }
    if (resp_col == ncols) {
        throw CsvError(CsvError::Kind::response_missing,
                       "response column '" + response + "' not found in header");
    }
    if (ncols < 2) {
        throw CsvError(CsvError::Kind::no_predictors, "no predictor columns besides the response");
    }

    const std::size_t nrows = rows.size() - 1;
    Matrix X(nrows, ncols - 1);
    Vector y(nrows);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() != ncols) {
            throw CsvError(CsvError::Kind::ragged_row,
                           "row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                               " cells, header has " + std::to_string(ncols),
                           r + 1);
        }
        std::size_t xc = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            double value = 0.0;
            if (!parse_number(cells[c], value)) {
                throw CsvError(CsvError::Kind::non_numeric_cell,
                               "non-numeric cell at row " + std::to_string(r + 1) + ", column '" +
                                   header[c] + "' (value '" + cells[c] + "')",
                               r + 1, c + 1);
            }
            if (c == resp_col) {
                y[static_cast<Index>(r - 1)] = value;
            } else {
                X(static_cast<Index>(r - 1), static_cast<Index>(xc++)) = value;
            }
        }
    }

    Dataset ds = make_dataset(std::move(X), std::move(y));
    ds.response_name = header[resp_col];
    for (std::size_t c = 0; c < ncols; ++c) {
        if (c != resp_col) {
            ds.predictor_names.push_back(header[c]);
        }
    }
    return ds;
}

Dataset center(const Dataset& ds) {
    Dataset out = ds;
    const Vector x_means = ds.X.colwise().mean();
    const double y_mean = ds.y.mean();
    out.X.rowwise() -= x_means.transpose();
    out.y.array() -= y_mean;
    out.shift_x += ds.scale_x.cwiseProduct(x_means);
    out.shift_y += y_mean;
    out.centered = true;
    return out;
}

CovMatrix covariance(const Dataset& ds) {
    const auto n = static_cast<double>(ds.n());
    const Matrix xc = ds.X.rowwise() - ds.X.colwise().mean();
    CovMatrix cov;
    cov.sigma = (xc.transpose() * xc) / n;
    cov.sigma = 0.5 * (cov.sigma + cov.sigma.transpose());
    cov.chol_ok = Eigen::LLT<Matrix>(cov.sigma).info() == Eigen::Success;
    return cov;
}

Dataset standardize(const Dataset& ds) {
    Dataset out = center(ds);
    const auto n = static_cast<double>(out.n());
    for (Index c = 0; c < out.p(); ++c) {
        const double var = out.X.col(c).squaredNorm() / n;
        if (!(var > 0.0)) {
            const std::string name = c < static_cast<Index>(out.predictor_names.size())
                                         ? out.predictor_names[c]
                                         : ("x" + std::to_string(c + 1));
            throw NumericError("zero-variance predictor column '" + name +
                               "' cannot be standardized");
        }
        const double sd = std::sqrt(var);
        out.X.col(c) /= sd;
        out.scale_x[c] *= sd;
    }
    out.standardized = true;
    return out;
}

Matrix to_original_coords(const Dataset& ds, const Matrix& beta) {
    Matrix mapped = beta;
    for (Index c = 0; c < ds.p(); ++c) {
        mapped.row(c) /= ds.scale_x[c];
    }
    return orthonormal_columns(mapped);
}

}  // namespace cssdr

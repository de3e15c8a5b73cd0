#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ssgl_gam {

/// Numeric table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd data;

    /// Index of a named column, or -1.
    int column(const std::string& name) const;
};

/// Reads a comma-separated numeric table. Every cell must parse as a finite
/// double; failures throw DataError naming the file, line and column.
CsvTable read_csv(const std::string& path);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header, const Eigen::MatrixXd& data);

/// Response in column `y`, everything else as covariates.
struct XyData {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
    std::vector<std::string> x_names;
};
XyData split_xy(const CsvTable& t, const std::string& path, const std::string& response = "y");

}  // namespace ssgl_gam

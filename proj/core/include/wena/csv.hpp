#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace wena::csv {

/// Splits one CSV line on commas. Double-quoted fields may contain commas;
/// doubled quotes inside a quoted field unescape to one quote.
std::vector<std::string> split_line(const std::string& line);

/// Joins fields with commas, quoting any field that needs it.
std::string join_line(const std::vector<std::string>& fields);

/// Parses a decimal number; empty result when the field is not numeric.
std::optional<double> parse_number(const std::string& field);

/// Shortest decimal representation that round-trips the exact double value.
std::string format_number(double value);

/// Reads a numeric matrix. A non-numeric first row is treated as a header and
/// returned separately. Throws ParseError on ragged rows, NonFiniteValue on
/// NaN/inf entries, FileNotFound when unreadable.
struct NumericTable {
    Eigen::MatrixXd values;
    std::vector<std::string> header;  // empty when the file had none
};
NumericTable read_numeric_table(const std::string& path);

/// Writes a matrix as CSV, optionally with a header row. Deterministic:
/// format_number for every entry, '\n' line endings.
void write_numeric_table(const std::string& path, const Eigen::MatrixXd& values,
                         const std::vector<std::string>& header = {});

std::vector<std::string> read_lines(const std::string& path);
void write_text(const std::string& path, const std::string& content);

}  // namespace wena::csv

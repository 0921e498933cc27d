#include "wena/csv.hpp"

#include "wena/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace wena::csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && current.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

std::string join_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line.push_back(',');
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            line.push_back('"');
            for (char c : f) {
                if (c == '"') line.push_back('"');
                line.push_back(c);
            }
            line.push_back('"');
        } else {
            line += f;
        }
    }
    return line;
}

std::optional<double> parse_number(const std::string& field) {
    std::size_t begin = field.find_first_not_of(" \t");
    if (begin == std::string::npos) return std::nullopt;
    std::size_t end = field.find_last_not_of(" \t") + 1;
    const char* first = field.data() + begin;
    const char* last = field.data() + end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        // from_chars rejects leading '+'; fall back via strtod for those.
        char* str_end = nullptr;
        std::string copy(first, last);
        value = std::strtod(copy.c_str(), &str_end);
        if (str_end != copy.c_str() + copy.size() || copy.empty()) return std::nullopt;
    }
    return value;
}

std::string format_number(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path);
    out << content;
    if (!out) throw Error(ErrorCode::FileNotFound, "write failed for " + path);
}

NumericTable read_numeric_table(const std::string& path) {
    const auto lines = read_lines(path);
    NumericTable table;
    std::vector<std::vector<double>> rows;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = split_line(lines[li]);
        std::vector<double> row;
        row.reserve(fields.size());
        bool numeric = true;
        for (const auto& f : fields) {
            const auto v = parse_number(f);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (rows.empty() && table.header.empty()) {
                table.header = fields;
                continue;
            }
            throw Error(ErrorCode::ParseError,
                        path + ": non-numeric entry at line " + std::to_string(li + 1));
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonFiniteValue,
                            path + ": non-finite entry at line " + std::to_string(li + 1));
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw Error(ErrorCode::ParseError,
                        path + ": ragged row at line " + std::to_string(li + 1));
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw Error(ErrorCode::ParseError, path + ": no numeric rows");
    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return table;
}

void write_numeric_table(const std::string& path, const Eigen::MatrixXd& values,
                         const std::vector<std::string>& header) {
    std::string out;
    if (!header.empty()) {
        out += join_line(header);
        out.push_back('\n');
    }
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            if (j > 0) out.push_back(',');
            out += format_number(values(i, j));
        }
        out.push_back('\n');
    }
    write_text(path, out);
}

}  // namespace wena::csv

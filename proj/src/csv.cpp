#include "ssgl_gam/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ssgl_gam/errors.hpp"

namespace ssgl_gam {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

}  // namespace

int CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == name) return static_cast<int>(k);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw DataError("'" + path + "' is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    for (auto cell : split(line)) t.header.push_back(unquote(cell));
    const std::size_t width = t.header.size();

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != width) {
            std::ostringstream os;
            os << path << ":" << line_no << ": expected " << width << " fields, found " << cells.size();
            throw DataError(os.str());
        }
        for (std::size_t k = 0; k < width; ++k) {
            double v = 0.0;
            const auto c = cells[k];
            const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
            if (c.empty() || res.ec != std::errc() || res.ptr != c.data() + c.size() || !std::isfinite(v)) {
                std::ostringstream os;
                os << path << ":" << line_no << ", column " << k + 1 << " ('" << t.header[k]
                   << "'): not a finite number: '" << c << "'";
                throw DataError(os.str());
            }
            values.push_back(v);
        }
        ++rows;
    }
    t.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < width; ++k)
            t.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = values[i * width + k];
    return t;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const Eigen::MatrixXd& data) {
    if (static_cast<Eigen::Index>(header.size()) != data.cols())
        throw ArgumentError("write_csv: header width differs from the data");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index k = 0; k < data.cols(); ++k) out << (k ? "," : "") << format_double(data(i, k));
        out << '\n';
    }
    if (!out) throw DataError("error while writing '" + path + "'");
}

XyData split_xy(const CsvTable& t, const std::string& path, const std::string& response) {
    const int yc = t.column(response);
    if (yc < 0) throw DataError("'" + path + "' has no '" + response + "' column");
    if (t.header.size() < 2) throw DataError("'" + path + "' has no covariate columns");
    XyData out;
    out.y = t.data.col(yc);
    out.x.resize(t.data.rows(), t.data.cols() - 1);
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < t.data.cols(); ++c) {
        if (c == yc) continue;
        out.x.col(k++) = t.data.col(c);
        out.x_names.push_back(t.header[static_cast<std::size_t>(c)]);
    }
    return out;
}

}  // namespace ssgl_gam

#include "caegcn/dataset.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace caegcn {

namespace {

std::string location(const std::string& path, std::size_t line, std::size_t col = 0) {
    std::string s = path + ":" + std::to_string(line);
    if (col > 0) s += ":" + std::to_string(col);
    return s;
}

std::vector<double> parse_csv_row(const std::string& path, std::size_t lineno,
                                  const std::string& line) {
    std::vector<double> row;
    std::size_t pos = 0;
    std::size_t field = 0;
    while (true) {
        ++field;
        std::size_t end = line.find(',', pos);
        if (end == std::string::npos) end = line.size();
        std::size_t a = pos, b = end;
        while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
        while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t' || line[b - 1] == '\r')) --b;
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(line.data() + a, line.data() + b, value);
        if (ec != std::errc{} || ptr != line.data() + b || a == b) {
            throw std::runtime_error(location(path, lineno, field) + ": non-numeric cell '" +
                                     line.substr(pos, end - pos) + "'");
        }
        row.push_back(value);
        if (end == line.size()) break;
        pos = end + 1;
    }
    return row;
}

}  // namespace

DenseMatrix load_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_features: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t cols = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto row = parse_csv_row(path, lineno, line);
        if (rows.empty()) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw std::runtime_error(location(path, lineno) + ": row has " +
                                     std::to_string(row.size()) + " cells, expected " +
                                     std::to_string(cols));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("load_features: no data rows in " + path);
    DenseMatrix x(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::copy(rows[i].begin(), rows[i].end(), x.row(i));
    }
    if (!x.all_finite()) {
        throw std::runtime_error("load_features: non-finite value in " + path);
    }
    return x;
}

std::vector<std::size_t> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_labels: cannot open " + path);
    std::vector<std::size_t> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t a = 0, b = line.size();
        while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
        while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t' || line[b - 1] == '\r')) --b;
        if (a == b) continue;
        long long value = 0;
        const auto [ptr, ec] = std::from_chars(line.data() + a, line.data() + b, value);
        if (ec != std::errc{} || ptr != line.data() + b || value < 0) {
            throw std::runtime_error(location(path, lineno) +
                                     ": expected a nonnegative integer, got '" +
                                     line.substr(a, b - a) + "'");
        }
        labels.push_back(std::size_t(value));
    }
    if (labels.empty()) throw std::runtime_error("load_labels: no labels in " + path);
    return labels;
}

}  // namespace caegcn

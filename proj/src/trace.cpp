#include "avgdrem/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace avgdrem {

bool Trace::has(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::size_t Trace::index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("trace has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Trace::column(const std::string& name) const {
    const std::size_t j = index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
}

double Trace::at(const std::string& name, double t) const {
    const std::size_t j = index(name);
    const auto it = std::upper_bound(rows.begin(), rows.end(), t,
                                     [](double value, const std::vector<double>& r) { return value < r[0]; });
    if (it == rows.begin()) throw std::out_of_range(fmt::format("trace starts after t = {}", t));
    return (*(it - 1))[j];
}

void write_csv(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    std::string line;
    for (std::size_t j = 0; j < trace.columns.size(); ++j) {
        if (j > 0) line += ',';
        line += trace.columns[j];
    }
    out << line << '\n';
    for (const auto& row : trace.rows) {
        line.clear();
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0) line += ',';
            if (std::isnan(row[j])) {
                line += "nan";
            } else {
                line += fmt::format("{:.17g}", row[j]);
            }
        }
        out << line << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Trace read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    Trace trace;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + path.string() + "' is empty");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) trace.columns.push_back(cell);
    }
    if (trace.columns.empty() || trace.columns.front() != "t") {
        throw std::runtime_error("'" + path.string() + "': first column must be 't'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(trace.columns.size());
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell == "nan") {
                row.push_back(std::nan(""));
                continue;
            }
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size() || cell.empty()) {
                throw std::runtime_error(fmt::format("{}:{}: bad number '{}'", path.string(), line_no, cell));
            }
            row.push_back(v);
        }
        if (row.size() != trace.columns.size()) {
            throw std::runtime_error(fmt::format("{}:{}: expected {} fields, got {}", path.string(), line_no,
                                                 trace.columns.size(), row.size()));
        }
        trace.rows.push_back(std::move(row));
    }
    return trace;
}

}  // namespace avgdrem

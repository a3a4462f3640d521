#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace avgdrem {

/// Uniformly sampled simulation output. Column 0 is always "t".
struct Trace {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] bool has(const std::string& name) const;
    /// Throws std::out_of_range naming the column when absent.
    [[nodiscard]] std::size_t index(const std::string& name) const;
    [[nodiscard]] std::vector<double> column(const std::string& name) const;
    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
    [[nodiscard]] bool empty() const noexcept { return rows.empty(); }
    /// Value of `name` in the last row whose time is <= t.
    [[nodiscard]] double at(const std::string& name, double t) const;
};

/// Header row followed by one row per record, 17 significant digits.
void write_csv(const Trace& trace, const std::filesystem::path& path);
Trace read_csv(const std::filesystem::path& path);

}  // namespace avgdrem

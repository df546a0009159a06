#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rffid {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws naming the available columns
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;       // mean over rows sharing (series, x)
    std::vector<std::size_t> n;  // rows averaged per point
};

/// Groups rows by the series column (first-appearance order) and x (ascending).
std::vector<PlotSeries> aggregate_series(const CsvTable& table, std::string_view x, std::string_view y,
                                         std::string_view series);

std::string render_svg(const std::vector<PlotSeries>& series, std::string_view x_label, std::string_view y_label);

/// Reads the CSV, aggregates and writes the SVG. Nothing is written on error.
void plot(const std::filesystem::path& results_csv, std::string_view x, std::string_view y, std::string_view series,
          const std::filesystem::path& out_svg);

} // namespace rffid

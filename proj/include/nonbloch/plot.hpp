#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nonbloch {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> lines;  ///< source line of each row

    /// Column index by name, or -1.
    int column(const std::string& name) const;
    /// Numeric cell; throws "<file>:<line>: ..." when it does not parse.
    double number(std::size_t row, int col) const;

    std::string source;
};

/// Throws std::runtime_error("<file>:<line>: ...") on ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

/// Self-contained SVG for one of the CSV files written by `run`. The panel
/// type is picked from the header; report.json / healing_report.json next
/// to the CSV supply fit lines when present.
std::string render_svg(const std::filesystem::path& csv);

/// Render and write `<csv stem>.svg` into `out_dir`; returns the path.
std::filesystem::path plot_file(const std::filesystem::path& csv, const std::filesystem::path& out_dir);

}  // namespace nonbloch

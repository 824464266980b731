#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace glf {

/// Doubles are written with %.12e so identical runs give identical bytes.
class CsvWriter {
public:
    using Cell = std::variant<double, long long, std::string>;

    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<Cell>& cells);
    std::size_t rows() const { return rows_; }

private:
    std::FILE* f_ = nullptr;
    std::size_t columns_ = 0;
    std::size_t rows_ = 0;
    std::string path_;
};

std::string format_value(double v);

/// key: value lines.
void write_summary(const std::string& path, const std::vector<std::pair<std::string, std::string>>& lines);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

/// Static SVG rendering. Non-finite points, and non-positive ones on log axes, are skipped.
void write_svg(const std::string& path, const PlotSpec& spec);

/// Creates the directory and its parents.
void ensure_directory(const std::string& path);

}  // namespace glf

#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "errors.hpp"

namespace glf {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : columns_(header.size()), path_(path) {
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) fail(ErrorCode::IoError, fmt::format("cannot write '{}'", path));
    for (std::size_t i = 0; i < header.size(); ++i) std::fprintf(f_, "%s%s", i ? "," : "", header[i].c_str());
    std::fputc('\n', f_);
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<Cell>& cells) {
    require(cells.size() == columns_, ErrorCode::InvalidArgument,
            fmt::format("{}: row has {} cells, header has {}", path_, cells.size(), columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) std::fputc(',', f_);
        if (const auto* d = std::get_if<double>(&cells[i])) std::fputs(format_value(*d).c_str(), f_);
        else if (const auto* n = std::get_if<long long>(&cells[i])) std::fprintf(f_, "%lld", *n);
        else std::fputs(std::get<std::string>(cells[i]).c_str(), f_);
    }
    std::fputc('\n', f_);
    if (std::ferror(f_)) fail(ErrorCode::IoError, fmt::format("write to '{}' failed", path_));
    ++rows_;
}

void write_summary(const std::string& path, const std::vector<std::pair<std::string, std::string>>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, fmt::format("cannot write '{}'", path));
    for (const auto& [k, v] : lines) out << k << ": " << v << '\n';
    if (!out) fail(ErrorCode::IoError, fmt::format("write to '{}' failed", path));
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) fail(ErrorCode::IoError, fmt::format("cannot create '{}': {}", path, ec.message()));
}

namespace {

constexpr double kW = 640, kH = 420, kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log;
    double lo, hi;  // in transformed units

    double tr(double v) const { return log ? std::log10(v) : v; }

    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) t.push_back(e);
            return t;
        }
        const double span = hi - lo;
        const double raw = span / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (raw <= m * mag) {
                step = m * mag;
                break;
            }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(v);
        return t;
    }

    std::string label(double v) const {
        if (log) return fmt::format("1e{}", static_cast<int>(std::lround(v)));
        if (std::abs(v) < 1e-12 * std::max(std::abs(lo), std::abs(hi))) v = 0.0;
        return fmt::format("{:.4g}", v);
    }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

Axis make_axis(const PlotSpec& spec, bool is_x) {
    const bool log = is_x ? spec.log_x : spec.log_y;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double x = s.x[i], y = s.y[i];
            if (!usable(x, spec.log_x) || !usable(y, spec.log_y)) continue;
            const double v = is_x ? x : y;
            const double t = log ? std::log10(v) : v;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    if (!std::isfinite(lo)) return {log, 0.0, 1.0};
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= log ? 0.5 : std::max(0.5, 0.05 * std::abs(lo));
        hi += log ? 0.5 : std::max(0.5, 0.05 * std::abs(hi));
    }
    if (log) {
        lo = std::floor(lo);
        hi = std::ceil(hi);
    } else {
        const double pad = 0.03 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {log, lo, hi};
}

}  // namespace

void write_svg(const std::string& path, const PlotSpec& spec) {
    const Axis ax = make_axis(spec, true), ay = make_axis(spec, false);
    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (ax.tr(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double v) { return kTop + ph - (ay.tr(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::string s;
    s += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
                     "font-family=\"sans-serif\" font-size=\"12\">\n",
                     kW, kH, kW, kH);
    s += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kW, kH);
    s += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kLeft + pw / 2, esc(spec.title));
    for (double t : ax.ticks()) {
        const double x = kLeft + (t - ax.lo) / (ax.hi - ax.lo) * pw;
        s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"#e0e0e0\"/>\n", x,
                         kTop, kTop + ph);
        s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", x, kTop + ph + 16,
                         ax.label(t));
    }
    for (double t : ay.ticks()) {
        const double y = kTop + ph - (t - ay.lo) / (ay.hi - ay.lo) * ph;
        s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#e0e0e0\"/>\n",
                         kLeft, y, kLeft + pw);
        s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6, y + 4,
                         ay.label(t));
    }
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, pw, ph);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2, kH - 18,
                     esc(spec.x_label));
    s += fmt::format("<text x=\"18\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1f})\">{}</text>\n",
                     kTop + ph / 2, kTop + ph / 2, esc(spec.y_label));

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& ser = spec.series[k];
        const char* color = kColors[k % std::size(kColors)];
        std::string pts;
        for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
            if (!usable(ser.x[i], spec.log_x) || !usable(ser.y[i], spec.log_y)) continue;
            pts += fmt::format("{:.2f},{:.2f} ", px(ser.x[i]), py(ser.y[i]));
            if (ser.markers)
                s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px(ser.x[i]),
                                 py(ser.y[i]), color);
        }
        if (!ser.markers && !pts.empty())
            s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
        const double ly = kTop + 14 + 18 * static_cast<double>(k);
        s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" "
                         "stroke-width=\"2\"/>\n",
                         kLeft + pw + 10, ly, kLeft + pw + 30, color);
        s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kLeft + pw + 36, ly + 4, esc(ser.label));
    }
    s += "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, fmt::format("cannot write '{}'", path));
    out << s;
}

}  // namespace glf

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "hypwander/orbits.hpp"
#include "hypwander/sector.hpp"

namespace hypwander::io {

/// 12 significant digits, '.' as decimal separator, independent of the global locale.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // to_chars ignores the C locale, so output never picks up a decimal comma.
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return {buf, res.ptr};
}

/// Fixed-point with `digits` decimals, for human-readable summary lines.
inline std::string format_fixed(double v, int digits) {
    if (!std::isfinite(v)) return format_real(v);
    char buf[400];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    return {buf, res.ptr};
}

/// RFC-4180-style CSV: '#' metadata lines, one header row, '\n' line endings.
/// Fields never contain separators, so no quoting is done.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::string& schema) : os_(os) {
        os_ << "# hypwander " << schema << " v1\n";
    }

    void meta(const std::string& key, const std::string& value) { os_ << "# " << key << "=" << value << "\n"; }
    void meta(const std::string& key, double value) { meta(key, format_real(value)); }

    void header(std::initializer_list<std::string> columns) { write(std::vector<std::string>(columns)); }

    void row(const std::vector<std::string>& fields) { write(fields); }
    void row(std::initializer_list<double> values) {
        std::vector<std::string> fields;
        for (double v : values) fields.push_back(format_real(v));
        write(fields);
    }

private:
    void write(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << fields[i];
        os_ << "\n";
    }

    std::ostream& os_;
};

inline const char* to_string(PixelClass c) {
    switch (c) {
        case PixelClass::Escaped: return "escaped";
        case PixelClass::Bounded: return "bounded";
        case PixelClass::LeftWindow: return "left-window";
    }
    return "?";
}

/// PPM palette: escaped = amber, bounded = navy, left-window = red.
inline std::array<std::uint8_t, 3> palette(PixelClass c) {
    switch (c) {
        case PixelClass::Escaped: return {250, 190, 40};
        case PixelClass::Bounded: return {16, 24, 72};
        case PixelClass::LeftWindow: return {200, 40, 40};
    }
    return {0, 0, 0};
}

/// Columns x, y, class, iterations; rows top to bottom, left to right.
inline void write_escape_grid_csv(std::ostream& os, const EscapeGrid& grid, const std::string& map_name) {
    CsvWriter csv(os, "escape-grid");
    csv.meta("map", map_name);
    csv.meta("rect", format_real(grid.rect.x_min) + ":" + format_real(grid.rect.x_max) + "x" +
                         format_real(grid.rect.y_min) + ":" + format_real(grid.rect.y_max));
    csv.meta("resolution", std::to_string(grid.nx) + "x" + std::to_string(grid.ny));
    csv.meta("n_max", std::to_string(grid.n_max));
    csv.meta("escape_radius", grid.escape_radius);
    csv.header({"x", "y", "class", "iterations"});
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const Complex c = grid.center(i, j);
            const Pixel& p = grid.at(i, j);
            csv.row({format_real(c.real()), format_real(c.imag()), to_string(p.cls), std::to_string(p.iterations)});
        }
}

/// Binary P6, one pixel per grid cell, top row first.
inline void write_escape_grid_ppm(std::ostream& os, const EscapeGrid& grid) {
    os << "P6\n" << grid.nx << " " << grid.ny << "\n255\n";
    for (const Pixel& p : grid.pixels) {
        const auto rgb = palette(p.cls);
        os.write(reinterpret_cast<const char*>(rgb.data()), 3);
    }
}

/// Columns x, ratio, preceded by a '#' line carrying the verdict and K.
inline void write_sector_report_csv(std::ostream& os, const SectorReport& rep, const std::string& map_name) {
    CsvWriter csv(os, "sector-check");
    csv.meta("map", map_name);
    csv.meta("sigma", to_string(rep.direction));
    csv.meta("range", format_real(rep.r) + ":" + format_real(rep.x_max));
    csv.meta("samples", std::to_string(rep.samples));
    csv.meta("K_max", rep.k_max);
    os << "# verdict=" << to_string(rep.verdict) << " K=" << format_real(rep.sup_ratio);
    if (rep.witness) os << " witness=" << format_real(*rep.witness);
    os << "\n";
    csv.header({"x", "ratio"});
    for (const auto& [x, q] : rep.ratios) csv.row({x, q});
}

}  // namespace hypwander::io

#pragma once
// Depth raster lookup. CSV layout: header row of longitudes (first cell is
// a label), then one row per latitude: latitude, depths in metres.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "groundbn/errors.hpp"
#include "groundbn/ingest/csv.hpp"

namespace groundbn::ingest {

class BathymetryGrid {
public:
    // depth[i][j] at (lat[i], lon[j]); coordinates may run either way.
    BathymetryGrid(std::vector<double> lat, std::vector<double> lon, std::vector<std::vector<double>> depth,
                   std::string datum = {})
        : datum_(std::move(datum)) {
        if (lat.size() < 2 || lon.size() < 2)
            throw Error(ErrorCode::MalformedInput, "a depth raster needs at least 2 x 2 points");
        if (depth.size() != lat.size())
            throw Error(ErrorCode::MalformedInput, "one depth row per latitude is required");
        for (std::size_t i = 0; i < depth.size(); ++i) {
            if (depth[i].size() != lon.size())
                throw Error(ErrorCode::MalformedInput, "depth row has the wrong number of columns",
                            "row " + std::to_string(i + 1));
            for (double d : depth[i])
                if (!std::isfinite(d))
                    throw Error(ErrorCode::MalformedInput, "depths must be finite", "row " + std::to_string(i + 1));
        }
        lat_ = ascending(std::move(lat), depth, true);
        lon_ = ascending(std::move(lon), depth, false);
        depth_ = std::move(depth);
    }

    static BathymetryGrid from_csv(const CsvTable& t, const std::string& source = "bathymetry") {
        if (t.rows.empty()) throw Error(ErrorCode::MalformedInput, "empty raster", source);
        std::vector<double> lon;
        if (!t.header.empty()) {
            for (std::size_t j = 1; j < t.header.size(); ++j) {
                double v;
                if (!detail::parse_number(t.header[j], v))
                    throw Error(ErrorCode::MalformedInput, "longitude header must be numeric", source + ":header");
                lon.push_back(v);
            }
        } else {
            throw Error(ErrorCode::MalformedInput, "missing longitude header row", source);
        }
        std::vector<double> lat;
        std::vector<std::vector<double>> depth;
        for (const auto& row : numeric_columns(t, lon.size() + 1, source)) {
            lat.push_back(row[0]);
            depth.emplace_back(row.begin() + 1, row.end());
        }
        return BathymetryGrid(std::move(lat), std::move(lon), std::move(depth));
    }

    static BathymetryGrid from_csv_file(const std::string& path) {
        // The header's first cell is a label, so it never parses as numbers.
        return from_csv(read_csv_file(path), path);
    }

    // Bilinear interpolation between the four surrounding raster points.
    double lookup(double lat, double lon) const {
        if (!(lat >= lat_.front() && lat <= lat_.back() && lon >= lon_.front() && lon <= lon_.back()))
            throw Error(ErrorCode::OutOfBounds, "position lies outside the depth raster");
        auto [i, u] = locate(lat_, lat);
        auto [j, v] = locate(lon_, lon);
        const double d00 = depth_[i][j], d01 = depth_[i][j + 1], d10 = depth_[i + 1][j], d11 = depth_[i + 1][j + 1];
        return (1 - u) * ((1 - v) * d00 + v * d01) + u * ((1 - v) * d10 + v * d11);
    }

    double cell_lat() const { return (lat_.back() - lat_.front()) / static_cast<double>(lat_.size() - 1); }
    double cell_lon() const { return (lon_.back() - lon_.front()) / static_cast<double>(lon_.size() - 1); }
    const std::string& datum() const { return datum_; }

private:
    std::vector<double> lat_, lon_;
    std::vector<std::vector<double>> depth_;
    std::string datum_;

    static std::vector<double> ascending(std::vector<double> c, std::vector<std::vector<double>>& depth, bool rows) {
        const bool down = c.front() > c.back();
        if (down) {
            std::reverse(c.begin(), c.end());
            if (rows) std::reverse(depth.begin(), depth.end());
            else
                for (auto& r : depth) std::reverse(r.begin(), r.end());
        }
        for (std::size_t k = 1; k < c.size(); ++k)
            if (!(c[k] > c[k - 1]) || !std::isfinite(c[k]))
                throw Error(ErrorCode::MalformedInput, "raster coordinates must be strictly monotone");
        return c;
    }

    static std::pair<std::size_t, double> locate(const std::vector<double>& c, double x) {
        std::size_t k = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), x) - c.begin());
        k = std::clamp<std::size_t>(k, 1, c.size() - 1);
        return {k - 1, (x - c[k - 1]) / (c[k] - c[k - 1])};
    }
};

inline double bathymetry_lookup(const BathymetryGrid& g, double lat, double lon) { return g.lookup(lat, lon); }

}  // namespace groundbn::ingest

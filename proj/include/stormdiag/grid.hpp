#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stormdiag/time.hpp"

namespace stormdiag {

/// Geometry of a regular latitude-longitude grid. Rows run north to south
/// (lat_step < 0), columns west to east (lon_step > 0).
struct GridSpec {
    int nlat = 0;
    int nlon = 0;
    double lat_start = 90.0;
    double lat_step = -1.0;
    double lon_start = 0.0;
    double lon_step = 1.0;
    bool includes_poles = false;
    bool global_lon = false;

    /// Global grid at `step` degrees. With poles: 180/step + 1 rows starting
    /// at 90; without: 180/step rows offset by half a step.
    static GridSpec global(double step, bool with_poles);

    /// Regional grid spanning [lat_south, lat_north] x [lon_west, lon_east]
    /// inclusive at `step` degrees. Sets global_lon when the span closes 360.
    static GridSpec regional(double lat_north, double lat_south, double lon_west,
                             double lon_east, double step);

    double lat(int i) const { return lat_start + i * lat_step; }
    double lon(int j) const { return lon_start + j * lon_step; }
    double lat_end() const { return lat(nlat - 1); }
    std::size_t size() const { return static_cast<std::size_t>(nlat) * nlon; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nlon + j; }

    bool is_pole_row(int i) const;

    /// Pole-to-pole coverage with either pole rows or half-step offset rows,
    /// and periodic in longitude. Required by the spectral transforms.
    bool is_global() const;

    /// Throws stormdiag::Error when any structural invariant is violated.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

/// Vertical coordinate of a field: a pressure level in hPa or the surface.
class Level {
public:
    Level() = default;
    static Level surface() { return Level(true, 0.0); }
    static Level pressure(double hpa) { return Level(false, hpa); }

    bool is_surface() const { return surface_; }
    double hpa() const { return hpa_; }

    /// "sfc" or the pressure with trailing zeros trimmed ("850", "925.5").
    std::string label() const;

    auto operator<=>(const Level&) const = default;

private:
    Level(bool surface, double hpa) : surface_(surface), hpa_(hpa) {}
    bool surface_ = true;
    double hpa_ = 0.0;
};

struct FieldKey {
    std::string variable;
    Level level;
    TimePoint valid_time;

    auto operator<=>(const FieldKey&) const = default;
    std::string describe() const;
};

/// A scalar field on a GridSpec. NaN marks missing data.
struct Field {
    GridSpec grid;
    std::string variable;
    Level level;
    TimePoint valid_time{};
    std::string units;
    std::vector<double> values;

    /// Same grid and metadata, values filled with `fill`.
    static Field like(const Field& other, std::string variable, std::string units,
                      double fill = 0.0);

    double operator()(int i, int j) const { return values[grid.index(i, j)]; }
    double& operator()(int i, int j) { return values[grid.index(i, j)]; }

    std::span<const double> row(int i) const {
        return {values.data() + grid.index(i, 0), static_cast<std::size_t>(grid.nlon)};
    }

    FieldKey key() const { return {variable, level, valid_time}; }
};

/// Longitude/latitude box; the longitude interval is taken modulo 360 and
/// may wrap the dateline.
struct RegionBox {
    double lon_west = 0.0;
    double lon_east = 360.0;
    double lat_south = -90.0;
    double lat_north = 90.0;

    void validate() const;
    bool contains(double lat, double lon) const;
};

/// Uniform translation velocity of a cyclone, m/s (east, north).
struct CycloneVelocity {
    double cx = 0.0;
    double cy = 0.0;

    /// Throws unless |c| < 60 m/s.
    void validate() const;
};

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

/// Canonical SI units for registered variable names, or nullopt.
std::optional<std::string_view> canonical_units(std::string_view variable);

/// Normalizes a longitude into [0, 360).
double wrap_lon(double lon);

/// Throws stormdiag::Error if `a` and `b` differ in grid, level or time.
void require_coregistered(const Field& a, const Field& b, std::string_view what);

}  // namespace stormdiag

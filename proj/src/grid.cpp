#include "stormdiag/grid.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "stormdiag/error.hpp"

namespace stormdiag {

namespace {

constexpr double kGeomTol = 1e-9;

bool near(double a, double b) { return std::abs(a - b) <= kGeomTol * std::max(1.0, std::abs(b)); }

}  // namespace

GridSpec GridSpec::global(double step, bool with_poles) {
    if (!(step > 0.0)) throw Error("grid step must be positive");
    const double rows = 180.0 / step;
    const double cols = 360.0 / step;
    if (!near(rows, std::round(rows)) || !near(cols, std::round(cols))) {
        throw Error("grid step must divide 180 degrees evenly");
    }
    GridSpec g;
    g.nlon = static_cast<int>(std::lround(cols));
    g.lon_start = 0.0;
    g.lon_step = step;
    g.lat_step = -step;
    g.global_lon = true;
    if (with_poles) {
        g.nlat = static_cast<int>(std::lround(rows)) + 1;
        g.lat_start = 90.0;
        g.includes_poles = true;
    } else {
        g.nlat = static_cast<int>(std::lround(rows));
        g.lat_start = 90.0 - 0.5 * step;
        g.includes_poles = false;
    }
    g.validate();
    return g;
}

GridSpec GridSpec::regional(double lat_north, double lat_south, double lon_west, double lon_east,
                            double step) {
    if (!(step > 0.0) || !(lat_north > lat_south)) throw Error("invalid regional grid bounds");
    double span = lon_east - lon_west;
    if (span <= 0.0) span += 360.0;
    GridSpec g;
    g.lat_start = lat_north;
    g.lat_step = -step;
    g.nlat = static_cast<int>(std::lround((lat_north - lat_south) / step)) + 1;
    g.lon_start = wrap_lon(lon_west);
    g.lon_step = step;
    if (near(span, 360.0)) {
        g.nlon = static_cast<int>(std::lround(360.0 / step));
        g.global_lon = true;
    } else {
        g.nlon = static_cast<int>(std::lround(span / step)) + 1;
    }
    g.includes_poles = near(lat_north, 90.0) && near(g.lat_end(), -90.0);
    g.validate();
    return g;
}

bool GridSpec::is_pole_row(int i) const { return std::abs(lat(i)) > 90.0 - kGeomTol; }

bool GridSpec::is_global() const {
    if (!global_lon) return false;
    if (includes_poles) return true;
    const double half = -0.5 * lat_step;
    return near(lat_start, 90.0 - half) && near(lat_end(), -90.0 + half);
}

void GridSpec::validate() const {
    if (nlat < 3 || nlon < 4) throw Error("grid must have nlat >= 3 and nlon >= 4");
    if (!(lat_step < 0.0)) throw Error("lat_step must be negative (rows north to south)");
    if (!(lon_step > 0.0)) throw Error("lon_step must be positive");
    if (lat_start > 90.0 + kGeomTol || lat_end() < -90.0 - kGeomTol) {
        throw Error("grid latitudes exceed [-90, 90]");
    }
    if (lon_start < 0.0 || lon_start >= 360.0) throw Error("lon_start must lie in [0, 360)");
    if (global_lon && !near(nlon * lon_step, 360.0)) {
        throw Error("global_lon grid requires nlon * lon_step = 360");
    }
    if (includes_poles && !(near(lat_start, 90.0) && near(lat_end(), -90.0))) {
        throw Error("includes_poles requires rows from 90 to -90");
    }
}

std::string Level::label() const {
    if (surface_) return "sfc";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", hpa_);
    return buf;
}

std::string FieldKey::describe() const {
    return variable + "@" + level.label() + "@" + format_time(valid_time);
}

Field Field::like(const Field& other, std::string variable, std::string units, double fill) {
    Field f;
    f.grid = other.grid;
    f.variable = std::move(variable);
    f.level = other.level;
    f.valid_time = other.valid_time;
    f.units = std::move(units);
    f.values.assign(other.grid.size(), fill);
    return f;
}

void RegionBox::validate() const {
    if (!(lat_south < lat_north)) throw Error("region box requires lat_south < lat_north");
}

bool RegionBox::contains(double lat, double lon) const {
    if (lat < lat_south - kGeomTol || lat > lat_north + kGeomTol) return false;
    if (lon_east - lon_west >= 360.0) return true;
    const double width = wrap_lon(lon_east - lon_west);
    const double offset = wrap_lon(lon - lon_west);
    return offset <= width + kGeomTol || offset >= 360.0 - kGeomTol;
}

void CycloneVelocity::validate() const {
    if (!(std::hypot(cx, cy) < 60.0)) throw Error("cyclone velocity magnitude must be below 60 m/s");
}

std::optional<std::string_view> canonical_units(std::string_view variable) {
    static const std::map<std::string_view, std::string_view> table = {
        {"msl", "Pa"},        {"u10", "m s-1"},    {"v10", "m s-1"},   {"u", "m s-1"},
        {"v", "m s-1"},       {"z", "m2 s-2"},     {"t", "K"},         {"r", "%"},
        {"q", "kg kg-1"},     {"ws10", "m s-1"},   {"ws", "m s-1"},    {"vo", "s-1"},
        {"thw", "K"},         {"r_derived", "%"},  {"wsg", "m s-1"},   {"wsgr", "m s-1"},
        {"curv", "m-1"},      {"wsdiff", "m s-1"}, {"gwmask", "1"},
    };
    if (auto it = table.find(variable); it != table.end()) return it->second;
    return std::nullopt;
}

double wrap_lon(double lon) {
    double w = std::fmod(lon, 360.0);
    if (w < 0.0) w += 360.0;
    if (w >= 360.0) w -= 360.0;
    return w;
}

void require_coregistered(const Field& a, const Field& b, std::string_view what) {
    if (!(a.grid == b.grid)) throw Error(std::string(what) + ": grid mismatch");
    if (a.level != b.level) throw Error(std::string(what) + ": level mismatch");
    if (a.valid_time != b.valid_time) throw Error(std::string(what) + ": valid time mismatch");
}

}  // namespace stormdiag

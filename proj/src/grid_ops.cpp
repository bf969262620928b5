#include "stormdiag/grid_ops.hpp"

#include <cmath>
#include <limits>

#include "stormdiag/error.hpp"
#include "stormdiag/geo.hpp"

namespace stormdiag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTol = 1e-9;

bool better(double candidate, double best, Extremum mode) {
    return mode == Extremum::Min ? candidate < best : candidate > best;
}

// Fractional column position of `lon` in the source grid, or NaN when it
// falls outside a non-periodic grid.
double column_position(const GridSpec& g, double lon) {
    double x = wrap_lon(lon - g.lon_start) / g.lon_step;
    if (g.global_lon) return x;
    if (x > g.nlon - 1 + kTol) {
        // points just west of lon_start wrap to ~nlon; treat as outside
        const double west = x - 360.0 / g.lon_step;
        if (west >= -kTol) return 0.0;
        return kNaN;
    }
    return std::min(x, static_cast<double>(g.nlon - 1));
}

}  // namespace

Field regrid_bilinear(const Field& f, const GridSpec& target) {
    target.validate();
    if (target == f.grid) return f;

    const GridSpec& s = f.grid;
    if (target.lat_start > s.lat_start + kTol || target.lat_end() < s.lat_end() - kTol) {
        throw Error("regrid_bilinear: target latitudes outside source coverage");
    }

    Field out;
    out.grid = target;
    out.variable = f.variable;
    out.level = f.level;
    out.valid_time = f.valid_time;
    out.units = f.units;
    out.values.assign(target.size(), kNaN);

    std::vector<int> j0(target.nlon), j1(target.nlon);
    std::vector<double> wx(target.nlon);
    for (int j = 0; j < target.nlon; ++j) {
        const double x = column_position(s, target.lon(j));
        if (std::isnan(x)) throw Error("regrid_bilinear: target longitude outside source coverage");
        int lo = static_cast<int>(std::floor(x));
        double w = x - lo;
        if (w < kTol) w = 0.0;
        if (s.global_lon) {
            lo %= s.nlon;
            j0[j] = lo;
            j1[j] = (lo + 1) % s.nlon;
        } else {
            if (lo >= s.nlon - 1) {
                lo = s.nlon - 1;
                w = 0.0;
            }
            j0[j] = lo;
            j1[j] = std::min(lo + 1, s.nlon - 1);
        }
        wx[j] = w;
    }

    for (int i = 0; i < target.nlat; ++i) {
        const double y = (target.lat(i) - s.lat_start) / s.lat_step;
        int i0 = static_cast<int>(std::floor(y + kTol));
        i0 = std::clamp(i0, 0, s.nlat - 1);
        double wy = y - i0;
        if (std::abs(wy) < kTol) wy = 0.0;
        const int i1 = std::min(i0 + 1, s.nlat - 1);
        for (int j = 0; j < target.nlon; ++j) {
            const double a = f(i0, j0[j]);
            const double b = f(i0, j1[j]);
            const double c = f(i1, j0[j]);
            const double d = f(i1, j1[j]);
            const double x = wx[j];
            const double top = a + x * (b - a);
            const double bottom = c + x * (d - c);
            double v = top + wy * (bottom - top);
            // keep the four-point NaN rule even when a weight is zero
            if (std::isnan(a) || std::isnan(b) || std::isnan(c) || std::isnan(d)) v = kNaN;
            out(i, j) = v;
        }
    }
    return out;
}

GridPoint region_extremum(const Field& f, const RegionBox& box, Extremum mode) {
    box.validate();
    const GridSpec& g = f.grid;
    bool found = false;
    bool any_cell = false;
    GridPoint best;
    for (int i = 0; i < g.nlat; ++i) {
        const double lat = g.lat(i);
        if (lat < box.lat_south - kTol || lat > box.lat_north + kTol) continue;
        for (int j = 0; j < g.nlon; ++j) {
            if (!box.contains(lat, g.lon(j))) continue;
            any_cell = true;
            const double v = f(i, j);
            if (std::isnan(v)) continue;
            if (!found || better(v, best.value, mode)) {
                best = {i, j, lat, wrap_lon(g.lon(j)), v};
                found = true;
            }
        }
    }
    if (!any_cell) throw Error("region_extremum: box does not overlap the grid");
    if (!found) throw Error("region_extremum: all values in the box are missing");
    return best;
}

std::optional<GridPoint> disk_extremum(const Field& f, double lat, double lon, double radius_m,
                                       Extremum mode, const PhysicalConstants& pc) {
    const GridSpec& g = f.grid;
    std::optional<GridPoint> best;
    const double dlat_max = radius_m / pc.earth_radius * kRadToDeg;
    for (int i = 0; i < g.nlat; ++i) {
        const double la = g.lat(i);
        if (std::abs(la - lat) > dlat_max + kTol) continue;
        for (int j = 0; j < g.nlon; ++j) {
            const double v = f(i, j);
            if (std::isnan(v)) continue;
            const double lo = g.lon(j);
            if (great_circle_distance(lat, lon, la, lo, pc.earth_radius) > radius_m) continue;
            if (!best || better(v, best->value, mode)) best = GridPoint{i, j, la, wrap_lon(lo), v};
        }
    }
    return best;
}

}  // namespace stormdiag

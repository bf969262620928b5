#include "stormdiag/finite_diff.hpp"

#include <cmath>
#include <limits>

#include "stormdiag/error.hpp"

namespace stormdiag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Field ddx(const Field& f, const PhysicalConstants& pc) {
    const GridSpec& g = f.grid;
    if (g.nlon < 3) throw Error("ddx: grid needs at least 3 columns");
    Field out = Field::like(f, f.variable + "_x", f.units + " m-1", kNaN);
    const double dlam = g.lon_step * kDegToRad;
    const int n = g.nlon;

    for (int i = 0; i < g.nlat; ++i) {
        if (g.is_pole_row(i)) continue;
        const double metric = 1.0 / (pc.earth_radius * std::cos(g.lat(i) * kDegToRad));
        const double* row = f.values.data() + g.index(i, 0);
        double* dst = out.values.data() + g.index(i, 0);
        for (int j = 1; j < n - 1; ++j) {
            dst[j] = (row[j + 1] - row[j - 1]) / (2.0 * dlam) * metric;
        }
        if (g.global_lon) {
            dst[0] = (row[1] - row[n - 1]) / (2.0 * dlam) * metric;
            dst[n - 1] = (row[0] - row[n - 2]) / (2.0 * dlam) * metric;
        } else {
            dst[0] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * dlam) * metric;
            dst[n - 1] = (3.0 * row[n - 1] - 4.0 * row[n - 2] + row[n - 3]) / (2.0 * dlam) * metric;
        }
    }
    return out;
}

Field ddy(const Field& f, const PhysicalConstants& pc) {
    const GridSpec& g = f.grid;
    if (g.nlon < 3) throw Error("ddy: grid needs at least 3 columns");
    Field out = Field::like(f, f.variable + "_y", f.units + " m-1", kNaN);
    // lat_step is negative, so row i+1 lies dphi to the south
    const double dphi = g.lat_step * kDegToRad;
    const double inv_a = 1.0 / pc.earth_radius;
    const int m = g.nlat;

    for (int i = 0; i < m; ++i) {
        if (g.is_pole_row(i)) continue;
        double* dst = out.values.data() + g.index(i, 0);
        for (int j = 0; j < g.nlon; ++j) {
            double d;
            if (i == 0) {
                d = (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / (2.0 * dphi);
            } else if (i == m - 1) {
                d = (3.0 * f(m - 1, j) - 4.0 * f(m - 2, j) + f(m - 3, j)) / (2.0 * dphi);
            } else {
                d = (f(i + 1, j) - f(i - 1, j)) / (2.0 * dphi);
            }
            dst[j] = d * inv_a;
        }
    }
    return out;
}

Field shift_columns(const Field& f, int k) {
    Field out = f;
    const int n = f.grid.nlon;
    const int s = ((k % n) + n) % n;
    for (int i = 0; i < f.grid.nlat; ++i) {
        for (int j = 0; j < n; ++j) out(i, (j + s) % n) = f(i, j);
    }
    return out;
}

}  // namespace stormdiag

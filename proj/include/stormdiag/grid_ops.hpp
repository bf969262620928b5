#pragma once

#include <optional>

#include "stormdiag/constants.hpp"
#include "stormdiag/grid.hpp"

namespace stormdiag {

enum class Extremum { Min, Max };

struct GridPoint {
    int row = 0;
    int col = 0;
    double lat = 0.0;
    double lon = 0.0;
    double value = 0.0;
};

/// Bilinear interpolation onto `target`. Longitude is handled modulo 360;
/// any NaN in the four-point stencil yields NaN. Returns an exact copy when
/// target equals the source grid.
Field regrid_bilinear(const Field& f, const GridSpec& target);

/// Extremum of the non-NaN values inside `box`. Ties go to the smallest row,
/// then the smallest column. Throws when the selection is empty or all NaN.
GridPoint region_extremum(const Field& f, const RegionBox& box, Extremum mode);

/// As region_extremum, over points within `radius_m` great-circle meters of
/// (lat, lon). Returns nullopt when no non-NaN point lies in the disk.
std::optional<GridPoint> disk_extremum(const Field& f, double lat, double lon, double radius_m,
                                       Extremum mode, const PhysicalConstants& pc = {});

}  // namespace stormdiag

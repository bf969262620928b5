#pragma once

#include "stormdiag/constants.hpp"
#include "stormdiag/grid.hpp"

namespace stormdiag {

// Second-order finite differences on the sphere. Centered in the interior,
// periodic in longitude for global_lon grids, one-sided second order at open
// edges. Rows at |lat| = 90 are NaN; NaN inputs propagate through the stencil.

/// (1 / (a cos(lat))) d f / d lon
Field ddx(const Field& f, const PhysicalConstants& pc = {});

/// (1 / a) d f / d lat
Field ddy(const Field& f, const PhysicalConstants& pc = {});

/// Rotates columns by k (positive k moves values eastward).
Field shift_columns(const Field& f, int k);

}  // namespace stormdiag

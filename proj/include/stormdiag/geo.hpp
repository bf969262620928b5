#pragma once

#include "stormdiag/grid.hpp"

namespace stormdiag {

/// Haversine great-circle distance in meters on a sphere of `radius` meters.
double great_circle_distance(double lat1, double lon1, double lat2, double lon2, double radius);

/// Initial bearing from point 1 to point 2, radians clockwise from north.
double initial_bearing(double lat1, double lon1, double lat2, double lon2);

/// Point reached from (lat, lon) after `distance` meters along `bearing`.
LatLon destination_point(double lat, double lon, double bearing, double distance, double radius);

}  // namespace stormdiag

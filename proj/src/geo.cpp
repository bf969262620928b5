#include "stormdiag/geo.hpp"

#include <algorithm>
#include <cmath>

#include "stormdiag/constants.hpp"

namespace stormdiag {

double great_circle_distance(double lat1, double lon1, double lat2, double lon2, double radius) {
    const double p1 = lat1 * kDegToRad;
    const double p2 = lat2 * kDegToRad;
    const double sdp = std::sin(0.5 * (p2 - p1));
    const double sdl = std::sin(0.5 * (lon2 - lon1) * kDegToRad);
    const double h = sdp * sdp + std::cos(p1) * std::cos(p2) * sdl * sdl;
    return 2.0 * radius * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

double initial_bearing(double lat1, double lon1, double lat2, double lon2) {
    const double p1 = lat1 * kDegToRad;
    const double p2 = lat2 * kDegToRad;
    const double dl = (lon2 - lon1) * kDegToRad;
    const double y = std::sin(dl) * std::cos(p2);
    const double x = std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl);
    return std::atan2(y, x);
}

LatLon destination_point(double lat, double lon, double bearing, double distance, double radius) {
    const double p1 = lat * kDegToRad;
    const double delta = distance / radius;
    const double p2 = std::asin(std::sin(p1) * std::cos(delta) +
                                std::cos(p1) * std::sin(delta) * std::cos(bearing));
    const double l2 = lon * kDegToRad +
                      std::atan2(std::sin(bearing) * std::sin(delta) * std::cos(p1),
                                 std::cos(delta) - std::sin(p1) * std::sin(p2));
    return {p2 * kRadToDeg, wrap_lon(l2 * kRadToDeg)};
}

}  // namespace stormdiag

#include "stormdiag/constants.hpp"

#include <cmath>

#include "stormdiag/error.hpp"

namespace stormdiag {

void PhysicalConstants::validate() const {
    if (!(earth_radius > 0.0) || !(omega > 0.0) || !(gravity > 0.0)) {
        throw Error("physical constants must be strictly positive");
    }
}

double PhysicalConstants::coriolis(double lat_deg) const {
    return 2.0 * omega * std::sin(lat_deg * kDegToRad);
}

}  // namespace stormdiag

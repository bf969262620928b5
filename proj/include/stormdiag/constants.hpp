#pragma once

#include <numbers>

namespace stormdiag {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

/// Planetary constants shared by every operation in a run. Defaults follow
/// the ECMWF product conventions.
struct PhysicalConstants {
    double earth_radius = 6371229.0;  // m
    double omega = 7.292115e-5;       // s^-1
    double gravity = 9.80665;         // m s^-2

    /// Throws stormdiag::Error unless all constants are strictly positive.
    void validate() const;

    double coriolis(double lat_deg) const;
};

}  // namespace stormdiag

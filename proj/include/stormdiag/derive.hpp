#pragma once

#include <cstddef>

#include "stormdiag/constants.hpp"
#include "stormdiag/dataset.hpp"
#include "stormdiag/grid.hpp"

namespace stormdiag::derive {

enum class HumidityKind { RelativeHumidity, SpecificHumidity };

/// sqrt(u^2 + v^2); NaN where either input is NaN.
Field wind_speed(const Field& u, const Field& v);

/// Vertical relative vorticity on the sphere,
/// (1 / (a cos phi)) [dv/dlambda - d(u cos phi)/dphi]. NaN at the poles and
/// along open (non-periodic) grid edges.
Field relative_vorticity(const Field& u, const Field& v, const PhysicalConstants& pc = {});

// Scalar thermodynamics. Temperatures in K, pressures and vapour pressures
// in hPa, relative humidity in %, specific humidity in kg/kg.

/// Saturation vapour pressure over water (Bolton 1980).
double saturation_vapor_pressure(double t_k);

/// Vapour pressure from specific humidity at pressure p.
double vapor_pressure_from_q(double q, double p_hpa);

/// Specific humidity at saturation.
double saturation_specific_humidity(double t_k, double p_hpa);

/// Dew point from vapour pressure (inverse of the Bolton formula).
double dew_point(double e_hpa);

/// Pseudo-equivalent potential temperature (Bolton 1980, eq. 43), with the
/// LCL temperature taken from the dew point (eq. 15).
double theta_e_bolton(double t_k, double e_hpa, double p_hpa);

/// Wet-bulb potential temperature from theta_e (Davies-Jones 2008 fit).
double theta_w_from_theta_e(double theta_e);

/// theta_w for one parcel given temperature and relative humidity. Throws
/// on non-physical input.
double theta_w_point(double t_k, double rh_percent, double p_hpa);

/// Gridded theta_w at a pressure level; `humidity` holds RH (%) or q (kg/kg).
Field theta_w(const Field& t, const Field& humidity, HumidityKind kind, double level_hpa);

struct RhDiagnostics {
    std::size_t clipped_low = 0;
    std::size_t clipped_high = 0;
};

inline constexpr double kRhCeiling = 150.0;

/// Relative humidity (%) w.r.t. water from specific humidity, clipped to
/// [0, 150] with clip counts reported in `diagnostics`.
Field rh_from_q(const Field& q, const Field& t, double level_hpa,
                RhDiagnostics* diagnostics = nullptr);

/// Adds the fields derivable from `ds` at (level, time) under their
/// canonical names: ws10 (surface), ws and vo (pressure levels), thw and
/// r_derived where temperature and humidity allow.
std::vector<Field> derive_available(const Dataset& ds, Level level, TimePoint t,
                                    const PhysicalConstants& pc = {});

}  // namespace stormdiag::derive

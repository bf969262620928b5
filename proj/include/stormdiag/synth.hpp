#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "stormdiag/constants.hpp"
#include "stormdiag/grid.hpp"

namespace stormdiag::synth {

enum class Balance { Geostrophic, Gradient };
enum class CoriolisMode { FullSphere, FPlane };

/// Axisymmetric Gaussian geopotential low,
///   Phi(r) = phi_env - amplitude * exp(-r^2 / (2 L^2)),
/// with great-circle r from a centre that translates uniformly.
struct VortexSpec {
    double center_lat = 50.0;
    double center_lon = 340.0;
    double amplitude = 1500.0;     // m2 s-2
    double radius_scale = 4.0e5;   // m (L)
    Balance balance = Balance::Gradient;
    CycloneVelocity translation{};
    CoriolisMode f_mode = CoriolisMode::FPlane;
    double f_plane_lat = 50.0;     // reference latitude for FPlane mode
    double level_hpa = 850.0;
    double phi_env = 1.45e4;       // m2 s-2
    double msl_env = 101300.0;     // Pa
    double msl_per_phi = 1.25;     // Pa per (m2 s-2), surface density
    double wind10_factor = 0.7;    // 10-m wind / level wind

    void validate() const;
};

/// Closed-form diagnostics of the vortex as functions of radius r (m) and
/// Coriolis parameter f. Curvature of every contour is 1/r.
struct VortexAnalytic {
    double amplitude;
    double radius_scale;
    Balance balance;

    double phi_anomaly(double r) const;  // Phi - phi_env
    double dphi_dr(double r) const;
    double vg(double r, double f) const;
    double vgr(double r, double f) const;
    double curvature(double r) const { return 1.0 / r; }
    /// Speed of the sampled wind (vg or vgr depending on balance).
    double wind(double r, double f) const;
    /// Relative vorticity of the sampled wind, V/r + dV/dr.
    double vorticity(double r, double f) const;
};

struct VortexFields {
    Field z, u, v;           // at the pressure level
    Field msl, u10, v10;     // surface
    LatLon center;
    VortexAnalytic analytic;
    double f_plane;          // Coriolis parameter used in FPlane mode
};

/// Vortex centre after `hours` of translation from the spec's centre.
LatLon vortex_center(const VortexSpec& spec, double hours, const PhysicalConstants& pc = {});

/// Samples the vortex at `t`; `hours` is the time since the spec's centre
/// position.
VortexFields gaussian_low(const VortexSpec& spec, const GridSpec& grid, TimePoint t, double hours,
                          const PhysicalConstants& pc = {});

/// Every field of gaussian_low at t0, t0 + step_h, ... (n_steps values).
std::vector<Field> gaussian_low_series(const VortexSpec& spec, const GridSpec& grid, TimePoint t0, int n_steps,
                                       double step_h, const PhysicalConstants& pc = {});

/// Real orthonormal spherical harmonic (sqrt 2 Pbar cos(m lon) for m > 0),
/// evaluated through std::sph_legendre.
double harmonic_value(int l, int m, double lat_deg, double lon_deg);
/// (1/(a cos lat)) d/dlon of harmonic_value.
double harmonic_ddx(int l, int m, double lat_deg, double lon_deg, double radius);
/// (1/a) d/dlat of harmonic_value.
double harmonic_ddy(int l, int m, double lat_deg, double lon_deg, double radius);

Field harmonic_field(int l, int m, const GridSpec& grid);

struct NoiseSpec {
    int lmin = 120;
    int lmax = 160;
    int terms = 24;
    double amplitude = 0.1;   // fraction of the base's standard deviation
    std::uint64_t seed = 1;
};

/// base + seeded superposition of harmonics with lmin <= l <= lmax. The
/// noise RMS is amplitude * std(base) (or |mean| for a constant base).
Field noisy_field(const Field& base, const NoiseSpec& noise);

/// Grid from {"step", "global", "with_poles"} or {"step", "north", "south",
/// "west", "east"}.
GridSpec grid_from_params(const nlohmann::json& j);

/// Dataset fields for a named case: "gaussian-low" (a time series of the
/// vortex), "harmonic" (one z field holding scale * Y_lm) or "noisy" (the
/// gaussian-low series with high-degree noise added to z). Missing keys take
/// the VortexSpec/NoiseSpec defaults.
std::vector<Field> synth_case(const std::string& name, const nlohmann::json& params,
                              const PhysicalConstants& pc = {});

}  // namespace stormdiag::synth

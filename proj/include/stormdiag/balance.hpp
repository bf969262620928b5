#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "stormdiag/constants.hpp"
#include "stormdiag/dataset.hpp"
#include "stormdiag/grid.hpp"

namespace stormdiag::balance {

struct BalanceOptions {
    int lmax = 106;                 // truncation for K and for smoothed bundles; 0 disables
    double k_eps = 0.0;             // |K| below this: Vgr = Vg replacement, m-1
    double vg_min = 0.5;            // direction indeterminate below this, m s-1
    double equator_mask_deg = 5.0;
    std::optional<double> f_plane_lat;  // constant f instead of 2 Omega sin(lat)

    void validate() const;
};

struct GeostrophicWind {
    Field u;
    Field v;
};

/// u_g = -(1/f) dPhi/dy, v_g = (1/f) dPhi/dx. NaN at the poles, at open
/// edges and within equator_mask_deg of the equator.
GeostrophicWind geostrophic_wind(const Field& phi, const BalanceOptions& opt = {},
                                 const PhysicalConstants& pc = {});

/// Curvature of the geostrophic streamlines (the Phi contours) from the
/// natural-coordinate vorticity, K = (zeta_g + dVg/dn) / Vg, with n 90 degrees
/// left of the geostrophic wind. zeta_g is the spherical vorticity. Phi is
/// first truncated at opt.lmax (global grids only; lmax = 0 uses Phi as is).
/// NaN where Vg < vg_min.
Field contour_curvature(const Field& phi, const BalanceOptions& opt = {},
                        const PhysicalConstants& pc = {});

/// Contour curvature from a given geostrophic wind (no smoothing).
Field curvature_from_wind(const GeostrophicWind& g, const BalanceOptions& opt = {},
                          const PhysicalConstants& pc = {});

/// Trajectory curvature of a pattern translating at c:
/// K (1 - c.s / Vg), s the unit vector along (ug, vg). NaN where Vg < vg_min.
Field motion_corrected_curvature(const Field& k, const Field& ug, const Field& vg, CycloneVelocity c,
                                 const BalanceOptions& opt = {});

struct GradientRoot {
    double value = 0.0;
    bool defined = false;
};

/// Regular root of K V^2 + f V - f Vg = 0: the root continuous with V = Vg
/// as K -> 0, written as 2 f Vg / (f + sign(f) sqrt(D)), D = f^2 + 4 K f Vg,
/// which needs no small-K special case. K = 0 or |K| < k_eps gives Vg.
/// Undefined for D < 0, NaN input or a negative root.
GradientRoot solve_gradient_wind(double f, double k, double vg, double k_eps = 0.0);

struct GradientWind {
    Field speed;
    Field mask;  // 1 defined, 0 undefined
};

/// Gridded gradient-wind speed. Where K is NaN only because Vg < vg_min the
/// flow is treated in the geostrophic limit (Vgr = Vg, mask = 1).
GradientWind gradient_wind_speed(const Field& vg, const Field& k, const BalanceOptions& opt = {},
                                 const PhysicalConstants& pc = {});

struct BalanceBundle {
    TimePoint valid_time{};
    double level_hpa = 0.0;
    Field V, Vg, K, Vgr, diff, mask;
    bool smoothed = false;
    CycloneVelocity cyclone_velocity{};
    BalanceOptions options;
    PhysicalConstants constants;

    nlohmann::json provenance() const;
    std::vector<Field> fields() const;
};

/// Full balance diagnosis from u, v and z at one level and time. K always
/// comes from the truncated geopotential; `smoothed` also truncates u, v and
/// z before computing V and Vg.
BalanceBundle balance_from_fields(const Field& u, const Field& v, const Field& z, CycloneVelocity c,
                                  bool smoothed, const BalanceOptions& opt = {},
                                  const PhysicalConstants& pc = {});

BalanceBundle balance_bundle(const Dataset& ds, TimePoint t, double level_hpa, CycloneVelocity c,
                             bool smoothed, const BalanceOptions& opt = {},
                             const PhysicalConstants& pc = {});

/// Writes ws, wsg, curv, wsgr, wsdiff and gwmask as fgrid fields plus
/// balance_provenance.json into `dir`.
void write_bundle(const std::filesystem::path& dir, const BalanceBundle& b, const std::string& label = {});

}  // namespace stormdiag::balance

#include "stormdiag/balance.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "stormdiag/derive.hpp"
#include "stormdiag/error.hpp"
#include "stormdiag/finite_diff.hpp"
#include "stormdiag/spectral.hpp"

namespace stormdiag::balance {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double row_coriolis(const GridSpec& g, int i, const BalanceOptions& opt, const PhysicalConstants& pc) {
    return pc.coriolis(opt.f_plane_lat ? *opt.f_plane_lat : g.lat(i));
}

bool equatorial(const GridSpec& g, int i, const BalanceOptions& opt) {
    return std::abs(g.lat(i)) < opt.equator_mask_deg;
}

Field smooth(const Field& f, int lmax) {
    if (lmax <= 0) return f;
    return spectral::truncate(spectral::fill_pole_rows(f), lmax);
}

Field speed_of(const Field& u, const Field& v, const char* name) {
    Field s = Field::like(u, name, "m s-1");
    for (std::size_t k = 0; k < s.values.size(); ++k) s.values[k] = std::hypot(u.values[k], v.values[k]);
    return s;
}

}  // namespace

void BalanceOptions::validate() const {
    if (lmax < 0) throw Error("truncation must be non-negative");
    if (!(k_eps >= 0.0) || !(vg_min >= 0.0) || !(equator_mask_deg >= 0.0)) {
        throw Error("balance thresholds must be non-negative");
    }
    if (f_plane_lat && std::abs(*f_plane_lat) < 1.0) throw Error("f-plane latitude too close to the equator");
}

GeostrophicWind geostrophic_wind(const Field& phi, const BalanceOptions& opt, const PhysicalConstants& pc) {
    opt.validate();
    const GridSpec& g = phi.grid;
    const Field dx = ddx(phi, pc);
    const Field dy = ddy(phi, pc);
    GeostrophicWind out{Field::like(phi, "u", "m s-1", kNaN), Field::like(phi, "v", "m s-1", kNaN)};
    for (int i = 0; i < g.nlat; ++i) {
        if (equatorial(g, i, opt)) continue;
        const double f = row_coriolis(g, i, opt, pc);
        for (int j = 0; j < g.nlon; ++j) {
            out.u(i, j) = -dy(i, j) / f;
            out.v(i, j) = dx(i, j) / f;
        }
    }
    return out;
}

Field curvature_from_wind(const GeostrophicWind& gw, const BalanceOptions& opt, const PhysicalConstants& pc) {
    const Field zeta = derive::relative_vorticity(gw.u, gw.v, pc);
    const Field vg = speed_of(gw.u, gw.v, "wsg");
    const Field dvx = ddx(vg, pc);
    const Field dvy = ddy(vg, pc);
    Field k = Field::like(gw.u, "curv", "m-1", kNaN);
    for (std::size_t n = 0; n < k.values.size(); ++n) {
        const double s = vg.values[n];
        if (!(s >= opt.vg_min)) continue;
        // n = (-vg, ug) / Vg
        const double dvdn = (-gw.v.values[n] * dvx.values[n] + gw.u.values[n] * dvy.values[n]) / s;
        k.values[n] = (zeta.values[n] + dvdn) / s;
    }
    return k;
}

Field contour_curvature(const Field& phi, const BalanceOptions& opt, const PhysicalConstants& pc) {
    opt.validate();
    return curvature_from_wind(geostrophic_wind(smooth(phi, opt.lmax), opt, pc), opt, pc);
}

Field motion_corrected_curvature(const Field& k, const Field& ug, const Field& vg, CycloneVelocity c,
                                 const BalanceOptions& opt) {
    c.validate();
    require_coregistered(k, ug, "motion_corrected_curvature");
    require_coregistered(k, vg, "motion_corrected_curvature");
    Field out = Field::like(k, "curv", "m-1", kNaN);
    for (std::size_t n = 0; n < out.values.size(); ++n) {
        const double u = ug.values[n];
        const double v = vg.values[n];
        const double s = std::hypot(u, v);
        if (!(s >= opt.vg_min)) continue;
        const double cs = (c.cx * u + c.cy * v) / s;
        out.values[n] = k.values[n] * (1.0 - cs / s);
    }
    return out;
}

GradientRoot solve_gradient_wind(double f, double k, double vg, double k_eps) {
    if (std::isnan(f) || std::isnan(k) || std::isnan(vg) || f == 0.0) return {};
    if (k == 0.0 || std::abs(k) < k_eps) return {vg, true};
    const double d = f * f + 4.0 * k * f * vg;
    if (d < 0.0) return {};
    const double root = std::sqrt(d);
    const double v = 2.0 * f * vg / (f + std::copysign(root, f));
    if (!(v >= 0.0)) return {};
    return {v, true};
}

GradientWind gradient_wind_speed(const Field& vg, const Field& k, const BalanceOptions& opt,
                                 const PhysicalConstants& pc) {
    require_coregistered(vg, k, "gradient_wind_speed");
    const GridSpec& g = vg.grid;
    GradientWind out{Field::like(vg, "wsgr", "m s-1", kNaN), Field::like(vg, "gwmask", "1", 0.0)};
    for (int i = 0; i < g.nlat; ++i) {
        if (equatorial(g, i, opt) || g.is_pole_row(i)) continue;
        const double f = row_coriolis(g, i, opt, pc);
        for (int j = 0; j < g.nlon; ++j) {
            const double s = vg(i, j);
            const double kk = k(i, j);
            GradientRoot r;
            if (std::isnan(kk) && s >= 0.0 && s < opt.vg_min) r = {s, true};
            else r = solve_gradient_wind(f, kk, s, opt.k_eps);
            if (!r.defined) continue;
            out.speed(i, j) = r.value;
            out.mask(i, j) = 1.0;
        }
    }
    return out;
}

nlohmann::json BalanceBundle::provenance() const {
    nlohmann::json coriolis;
    if (options.f_plane_lat) coriolis = {{"mode", "f-plane"}, {"reference_lat", *options.f_plane_lat}};
    else coriolis = {{"mode", "full-sphere"}};
    return {
        {"valid_time", format_time(valid_time)},
        {"level_hPa", level_hpa},
        {"smoothed", smoothed},
        {"truncation", options.lmax},
        {"curvature_source", options.lmax > 0 ? "truncated geopotential" : "raw geopotential"},
        {"cyclone_velocity", {{"cx", cyclone_velocity.cx}, {"cy", cyclone_velocity.cy}}},
        {"constants",
         {{"earth_radius_m", constants.earth_radius},
          {"omega_s-1", constants.omega},
          {"gravity_m_s-2", constants.gravity}}},
        {"thresholds",
         {{"k_eps_m-1", options.k_eps}, {"vg_min_m_s-1", options.vg_min}, {"equator_mask_deg", options.equator_mask_deg}}},
        {"coriolis", coriolis},
        {"root", "regular"},
        {"spectral_norm", "orthonormal"},
    };
}

std::vector<Field> BalanceBundle::fields() const { return {V, Vg, K, Vgr, diff, mask}; }

BalanceBundle balance_from_fields(const Field& u, const Field& v, const Field& z, CycloneVelocity c,
                                  bool smoothed, const BalanceOptions& opt, const PhysicalConstants& pc) {
    opt.validate();
    pc.validate();
    c.validate();
    require_coregistered(u, v, "balance");
    require_coregistered(u, z, "balance");
    if (z.level.is_surface()) throw Error("balance requires a pressure level");
    if (smoothed && opt.lmax <= 0) throw Error("smoothed balance requires a positive truncation");

    const Field z_trunc = smooth(z, opt.lmax);
    const GeostrophicWind gw_trunc = geostrophic_wind(z_trunc, opt, pc);
    const Field k_static = curvature_from_wind(gw_trunc, opt, pc);

    BalanceBundle b;
    b.valid_time = z.valid_time;
    b.level_hpa = z.level.hpa();
    b.smoothed = smoothed;
    b.cyclone_velocity = c;
    b.options = opt;
    b.constants = pc;
    b.K = motion_corrected_curvature(k_static, gw_trunc.u, gw_trunc.v, c, opt);

    if (smoothed) {
        b.V = speed_of(smooth(u, opt.lmax), smooth(v, opt.lmax), "ws");
        b.Vg = speed_of(gw_trunc.u, gw_trunc.v, "wsg");
    } else {
        b.V = speed_of(u, v, "ws");
        const GeostrophicWind raw = geostrophic_wind(z, opt, pc);
        b.Vg = speed_of(raw.u, raw.v, "wsg");
    }

    GradientWind gr = gradient_wind_speed(b.Vg, b.K, opt, pc);
    b.Vgr = std::move(gr.speed);
    b.mask = std::move(gr.mask);
    b.diff = Field::like(b.V, "wsdiff", "m s-1", kNaN);
    for (std::size_t n = 0; n < b.diff.values.size(); ++n) {
        if (b.mask.values[n] == 1.0) b.diff.values[n] = b.V.values[n] - b.Vgr.values[n];
    }
    return b;
}

BalanceBundle balance_bundle(const Dataset& ds, TimePoint t, double level_hpa, CycloneVelocity c,
                             bool smoothed, const BalanceOptions& opt, const PhysicalConstants& pc) {
    const Level level = Level::pressure(level_hpa);
    return balance_from_fields(ds.get("u", level, t), ds.get("v", level, t), ds.get("z", level, t), c, smoothed,
                               opt, pc);
}

void write_bundle(const std::filesystem::path& dir, const BalanceBundle& b, const std::string& label) {
    write_fields(dir, b.fields(), b.constants, label);
    std::ofstream out(dir / "balance_provenance.json");
    if (!out) throw Error("cannot write " + (dir / "balance_provenance.json").string());
    out << b.provenance().dump(2) << "\n";
}

}  // namespace stormdiag::balance

// Acceptance suite: one PASS/FAIL/SKIPPED line per criterion.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "balance_oracle.hpp"
#include "stormdiag/balance.hpp"
#include "stormdiag/derive.hpp"
#include "stormdiag/error.hpp"
#include "stormdiag/geo.hpp"
#include "stormdiag/grid_ops.hpp"
#include "stormdiag/report.hpp"
#include "stormdiag/spectral.hpp"
#include "stormdiag/synth.hpp"
#include "stormdiag/track.hpp"
#include "thermo_oracle.hpp"

using namespace stormdiag;

namespace {

const PhysicalConstants kPc{};
const TimePoint kT0 = parse_time("2023-11-01T00:00Z");

enum class Status { Pass, Fail, Skipped };

struct Outcome {
    Status status = Status::Fail;
    std::string detail;
};

struct Criterion {
    std::string name;
    double max_seconds;  // 0 means no runtime bound
    std::function<Outcome()> run;
};

std::string fmt(double v, int prec = 4) {
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

// ---------------------------------------------------------------------------

Outcome gradient_wind_quadratic() {
    std::mt19937_64 rng(20231102);
    std::uniform_real_distribution<double> uf(-1.4e-4, 1.4e-4), uk(-2e-5, 2e-5), uv(0.0, 80.0);
    double worst = 0.0;
    int tested = 0;
    bool all_defined = true;
    while (tested < 1000) {
        const double f = uf(rng), k = uk(rng), vg = uv(rng);
        if (f * f + 4.0 * f * k * vg < 0.0) continue;
        ++tested;
        const auto r = balance::solve_gradient_wind(f, k, vg);
        if (!r.defined) {
            all_defined = false;
            continue;
        }
        const double res = std::abs(k * r.value * r.value + f * r.value - f * vg);
        worst = std::max(worst, res / (1e-6 * std::max(1.0, std::abs(f * vg))));
    }
    const auto worked = balance::solve_gradient_wind(1e-4, 1.0 / 3.0e5, 40.0);
    const auto bis = oracle::gradient_wind_bisection(1e-4, 1.0 / 3.0e5, 40.0);
    const double gap = (worked.defined && bis) ? std::abs(worked.value - *bis) : 1e9;
    return verdict(all_defined && worst <= 1.0 && gap < 0.01,
                   "max residual/bound " + fmt(worst) + " over 1000 triples; worked Vgr " + fmt(worked.value, 6) +
                       " vs oracle " + fmt(bis.value_or(NAN), 6) + " (|diff| " + fmt(gap, 2) + ")");
}

struct Vortex {
    synth::VortexSpec spec;
    synth::VortexFields fields;
    GridSpec grid;
};

Vortex global_vortex(synth::VortexSpec spec, double step) {
    Vortex v{spec, {}, GridSpec::global(step, true)};
    v.fields = synth::gaussian_low(spec, v.grid, kT0, 0.0, kPc);
    return v;
}

template <class Fn>
void for_disk(const Vortex& v, double r_max, Fn&& fn) {
    const GridSpec& g = v.grid;
    for (int i = 0; i < g.nlat; ++i) {
        if (std::abs(g.lat(i) - v.fields.center.lat) > r_max / kPc.earth_radius * kRadToDeg + 1.0) continue;
        for (int j = 0; j < g.nlon; ++j) {
            const double r = great_circle_distance(v.fields.center.lat, v.fields.center.lon, g.lat(i), g.lon(j),
                                                   kPc.earth_radius);
            if (r <= r_max) fn(i, j, r);
        }
    }
}

balance::BalanceOptions f_plane(double lat) {
    balance::BalanceOptions o;
    o.f_plane_lat = lat;
    return o;
}

Outcome balance_closure() {
    synth::VortexSpec spec;  // gradient-balanced, f-plane at 50 N
    const Vortex v = global_vortex(spec, 0.25);
    const auto b =
        balance::balance_from_fields(v.fields.u, v.fields.v, v.fields.z, {}, false, f_plane(spec.f_plane_lat));
    const double two_cells = 2.0 * 0.25 * kDegToRad * kPc.earth_radius;
    const GridSpec& g = v.grid;
    double worst = 0.0;
    long counted = 0, cyclonic = 0, violations = 0;
    const double f = kPc.coriolis(spec.f_plane_lat);
    for (int i = 0; i < g.nlat; ++i) {
        for (int j = 0; j < g.nlon; ++j) {
            if (b.mask(i, j) != 1.0) continue;
            const double r = great_circle_distance(v.fields.center.lat, v.fields.center.lon, g.lat(i), g.lon(j),
                                                   kPc.earth_radius);
            if (r <= two_cells) continue;
            ++counted;
            worst = std::max(worst, std::abs(b.V(i, j) - b.Vgr(i, j)));
            if (!std::isnan(b.K(i, j)) && b.K(i, j) * f > 0.0) {
                ++cyclonic;
                if (b.Vgr(i, j) > b.Vg(i, j)) ++violations;
            }
        }
    }
    return verdict(worst < 0.5 && violations == 0 && cyclonic > 0,
                   "max |V - Vgr| " + fmt(worst) + " m/s over " + std::to_string(counted) +
                       " mask=1 points; Vgr > Vg at " + std::to_string(violations) + " of " +
                       std::to_string(cyclonic) + " cyclonic points");
}

Outcome curvature() {
    synth::VortexSpec spec;
    const Vortex v = global_vortex(spec, 0.25);
    const Field k = balance::contour_curvature(v.fields.z, f_plane(spec.f_plane_lat));
    double worst_k = 0.0;
    long n = 0;
    for_disk(v, 1.0e6, [&](int i, int j, double r) {
        if (r < 3.0e5) return;
        ++n;
        worst_k = std::isnan(k(i, j)) ? 1e9 : std::max(worst_k, std::abs(k(i, j) * r - 1.0));
    });

    synth::VortexSpec moving;
    moving.balance = synth::Balance::Geostrophic;
    moving.amplitude = 6000.0;
    moving.radius_scale = 6.0e5;
    moving.translation = {17.7, 6.4};
    const Vortex mv = global_vortex(moving, 0.25);
    const auto opt = f_plane(moving.f_plane_lat);
    const auto gw = balance::geostrophic_wind(spectral::truncate(mv.fields.z), opt);
    const Field kc =
        balance::motion_corrected_curvature(balance::curvature_from_wind(gw, opt), gw.u, gw.v, moving.translation, opt);
    const GridSpec& g = mv.grid;
    double worst_c = 0.0;
    int samples = 0;
    for (double r_km = 300.0; r_km <= 1000.0; r_km += 100.0) {
        for (int bdir = 0; bdir < 16; ++bdir) {
            const LatLon p = destination_point(mv.fields.center.lat, mv.fields.center.lon, bdir * kPi / 8.0,
                                               r_km * 1e3, kPc.earth_radius);
            const int i = static_cast<int>(std::lround((g.lat_start - p.lat) / 0.25));
            const int j = static_cast<int>(std::lround(wrap_lon(p.lon) / 0.25)) % g.nlon;
            const double r = great_circle_distance(g.lat(i), g.lon(j), mv.fields.center.lat, mv.fields.center.lon,
                                                   kPc.earth_radius);
            const double bearing = initial_bearing(g.lat(i), g.lon(j), mv.fields.center.lat, mv.fields.center.lon);
            const oracle::TranslatingVortex tv{moving.amplitude, moving.radius_scale, mv.fields.f_plane,
                                               moving.translation.cx, moving.translation.cy, r * std::sin(bearing),
                                               r * std::cos(bearing)};
            const double expect = oracle::trajectory_curvature(tv);
            worst_c = std::max(worst_c, std::abs(kc(i, j) - expect) / std::abs(expect));
            ++samples;
        }
    }
    return verdict(n > 0 && worst_k < 0.02 && worst_c < 0.05,
                   "max |K r - 1| " + fmt(worst_k) + " over " + std::to_string(n) +
                       " points (300-1000 km); motion-corrected vs trajectory oracle max rel. error " + fmt(worst_c) +
                       " over " + std::to_string(samples) + " samples, c = (17.7, 6.4) m/s");
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

Outcome spectral_checks() {
    const GridSpec g = GridSpec::global(0.25, true);
    std::mt19937 rng(106);
    std::uniform_int_distribution<int> ul(0, 106);
    std::normal_distribution<double> amp(0.0, 1.0);
    Field band = synth::harmonic_field(0, 0, g);
    for (double& v : band.values) v = 0.0;
    for (int t = 0; t < 24; ++t) {
        const int l = ul(rng);
        const int m = std::uniform_int_distribution<int>(0, l)(rng);
        const double a = amp(rng);
        const Field h = synth::harmonic_field(l, m, g);
        for (std::size_t k = 0; k < h.values.size(); ++k) band.values[k] += a * h.values[k];
    }
    for (double& v : band.values) v += 3.0;  // non-zero mean

    const Field once = spectral::truncate(band);
    const double round_trip = max_diff(once, band) / max_abs(band.values);
    const Field twice = spectral::truncate(once);
    const double idem = max_diff(twice, once) / max_abs(once.values);
    const double mean_shift =
        std::abs(spectral::area_mean(once) - spectral::area_mean(band)) / std::abs(spectral::area_mean(band));

    const Field y120 = synth::harmonic_field(120, 7, g);
    const double killed = max_abs(spectral::truncate(y120).values) / max_abs(y120.values);

    return verdict(round_trip < 1e-8 && killed < 1e-6 && idem <= 1e-10 && mean_shift <= 1e-10,
                   "0.25 deg global: round trip " + fmt(round_trip, 3) + ", Y(120,7) residual " + fmt(killed, 3) +
                       ", idempotence " + fmt(idem, 3) + ", mean shift " + fmt(mean_shift, 3) + " (relative)");
}

Outcome bomb_metric() {
    track::Track t;
    for (int k = 0; k <= 4; ++k) t.points.push_back({hours_after(kT0, 6.0 * k), 48.0, 355.0, 988.0 - 8.5 * k});
    const auto r = track::intensification(t, 24.0);
    return verdict(r.is_bomb && std::abs(r.bergerons - 1.651) <= 0.001 && std::abs(r.deepening_hpa - 34.0) < 1e-9,
                   "988 -> 954 hPa in 24 h at 48 N: deepening " + fmt(r.deepening_hpa) + " hPa, bergerons " +
                       fmt(r.bergerons, 6) + ", is_bomb " + (r.is_bomb ? "true" : "false"));
}

Outcome tracking() {
    synth::VortexSpec spec;
    spec.center_lat = 45.0;
    spec.center_lon = 330.0;
    spec.translation = {17.7, 6.4};
    spec.f_mode = synth::CoriolisMode::FullSphere;
    const GridSpec g = GridSpec::regional(75, 25, 300, 60, 0.25);
    Dataset ds("synthetic");
    for (Field& f : synth::gaussian_low_series(spec, g, kT0, 9, 6.0, kPc)) ds.add(std::move(f));
    const track::Track t = track::track_cyclone(ds, RegionBox{320, 340, 40, 50}, kT0, hours_after(kT0, 48));
    double worst_cells = 0.0;
    for (std::size_t k = 0; k < t.points.size(); ++k) {
        const LatLon c = synth::vortex_center(spec, 6.0 * k, kPc);
        worst_cells = std::max({worst_cells, std::abs(t.points[k].lat - c.lat) / 0.25,
                                std::abs(wrap_lon(t.points[k].lon - c.lon + 180.0) - 180.0) / 0.25});
    }
    std::vector<TimePoint> times;
    for (const auto& p : t.points) times.push_back(p.time);
    const auto self = report::intercomparison({ds}, t, times);
    double worst_self = 0.0;
    bool all_ok = true;
    for (const auto& r : self.rows) {
        all_ok = all_ok && r.ok;
        worst_self = std::max(worst_self, r.position_error_km);
    }
    return verdict(t.points.size() == 9 && worst_cells <= 1.0 && all_ok && worst_self == 0.0,
                   std::to_string(t.points.size()) + " steps over 48 h, max offset " + fmt(worst_cells, 3) +
                       " grid cells; self-comparison max error " + fmt(worst_self) + " km");
}

Outcome vorticity() {
    const GridSpec g = GridSpec::global(0.25, true);
    Field u = synth::harmonic_field(0, 0, g);
    u.variable = "u";
    u.units = "m s-1";
    Field v = Field::like(u, "v", "m s-1", 0.0);
    for (int i = 0; i < g.nlat; ++i)
        for (int j = 0; j < g.nlon; ++j) u(i, j) = kPc.omega * kPc.earth_radius * std::cos(g.lat(i) * kDegToRad);
    const Field zeta = derive::relative_vorticity(u, v, kPc);
    double worst = 0.0;
    long n = 0;
    for (int i = 0; i < g.nlat; ++i) {
        const double exact = 2.0 * kPc.omega * std::sin(g.lat(i) * kDegToRad);
        if (std::abs(exact) < 1e-12) continue;  // the equator row has no relative scale
        for (int j = 0; j < g.nlon; j += 37) {
            if (std::isnan(zeta(i, j))) continue;  // pole rows are undefined by construction
            worst = std::max(worst, std::abs(zeta(i, j) - exact) / std::abs(exact));
            ++n;
        }
    }
    return verdict(n > 10000 && worst < 1e-3,
                   "solid body with omega = Omega at 0.25 deg: max relative error " + fmt(worst, 3) + " over " +
                       std::to_string(n) + " points");
}

Outcome theta_w() {
    double ident = 0.0;
    for (double t = 260.0; t <= 300.0 + 1e-9; t += 1.0)
        ident = std::max(ident, std::abs(derive::theta_w_point(t, 100.0, 1000.0) - t));
    double worst = 0.0;
    int n = 0;
    for (double p : {700.0, 850.0, 1000.0})
        for (double t = 260.0; t <= 300.0 + 1e-9; t += 2.0)
            for (double rh = 20.0; rh <= 100.0 + 1e-9; rh += 5.0) {
                worst = std::max(worst, std::abs(derive::theta_w_point(t, rh, p) - oracle::theta_w(t, rh, p)));
                ++n;
            }
    return verdict(ident < 0.25 && worst < 0.3, "saturated 1000 hPa identity max " + fmt(ident, 3) +
                                                    " K; max |theta_w - moist-adiabat oracle| " + fmt(worst, 3) +
                                                    " K over " + std::to_string(n) + " points");
}

Outcome era5_case() {
    const char* dir = std::getenv("STORMDIAG_ERA5_DATASET");
    if (!dir || !*dir) {
        return {Status::Skipped, "optional; set STORMDIAG_ERA5_DATASET to an fgrid ERA5 dataset to run"};
    }
    const char* fg_env = std::getenv("STORMDIAG_ERA5_FIRST_GUESS");
    RegionBox fg{295, 315, 35, 50};
    if (fg_env && *fg_env) {
        std::stringstream ss(fg_env);
        char c;
        ss >> fg.lon_west >> c >> fg.lon_east >> c >> fg.lat_south >> c >> fg.lat_north;
    }
    const Dataset ds = load_dataset(dir);
    const TimePoint t_start = parse_time("2023-10-31T06:00Z");
    const TimePoint t_min = parse_time("2023-11-02T06:00Z");
    const TimePoint t_wind = parse_time("2023-11-02T00:00Z");
    const TimePoint t_vo = parse_time("2023-11-01T18:00Z");
    const track::Track t = track::track_cyclone(ds, fg, t_start, t_min);
    const auto& last = t.points.back();
    double ws = NAN;
    for (const auto& row : track::intensity_timeseries(ds, t, 800.0))
        if (row.time == t_wind) ws = row.max_ws10;
    double vo_max = NAN;
    for (const auto& p : t.points) {
        if (p.time != t_vo) continue;
        const Level l850 = Level::pressure(850);
        const Field vo = ds.contains("vo", l850, t_vo)
                             ? ds.get("vo", l850, t_vo)
                             : derive::relative_vorticity(ds.get("u", l850, t_vo), ds.get("v", l850, t_vo));
        if (auto m = disk_extremum(vo, p.lat, p.lon, 800e3, Extremum::Max)) vo_max = m->value;
    }
    const bool ok = last.time == t_min && std::abs(last.mslp_hpa - 954.0) <= 1.0 && std::abs(ws - 30.0) <= 1.0 &&
                    std::abs(vo_max - 7e-4) <= 1e-4;
    return verdict(ok, "min MSLP " + fmt(last.mslp_hpa, 5) + " hPa at " + format_time(last.time) +
                           "; max 10-m wind " + fmt(ws) + " m/s; 850-hPa vorticity max " + fmt(vo_max, 3) + " s-1");
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"gradient-wind quadratic", 1.0, gradient_wind_quadratic},
        {"balance closure on synthetic vortex", 30.0, balance_closure},
        {"curvature and motion correction", 60.0, curvature},
        {"spectral T106 at 0.25 deg", 120.0, spectral_checks},
        {"bomb metric", 0.0, bomb_metric},
        {"tracking", 0.0, tracking},
        {"vorticity solid body", 0.0, vorticity},
        {"theta_w", 0.0, theta_w},
        {"ERA5 case (data-dependent)", 0.0, era5_case},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Status::Fail, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.status == Status::Pass && c.max_seconds > 0.0 && secs >= c.max_seconds) {
            o.status = Status::Fail;
            o.detail += "; runtime limit " + fmt(c.max_seconds) + " s exceeded";
        }
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIPPED";
        std::cout << tag << "  " << c.name << ": " << o.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
        failures += o.status == Status::Fail;
    }
    std::cout << (failures == 0 ? "all criteria passed or skipped" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}

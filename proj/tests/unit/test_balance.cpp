#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "balance_oracle.hpp"
#include "stormdiag/balance.hpp"
#include "stormdiag/error.hpp"
#include "stormdiag/finite_diff.hpp"
#include "stormdiag/geo.hpp"
#include "stormdiag/spectral.hpp"
#include "stormdiag/synth.hpp"

using namespace stormdiag;
using balance::BalanceOptions;

namespace {

const PhysicalConstants kPc{};

struct VortexCase {
    synth::VortexSpec spec;
    synth::VortexFields fields;
    GridSpec grid;
};

VortexCase global_vortex(synth::Balance bal, double step = 0.25) {
    VortexCase vc;
    vc.spec.balance = bal;
    vc.grid = GridSpec::global(step, true);
    vc.fields = synth::gaussian_low(vc.spec, vc.grid, parse_time("2023-11-01T00:00Z"), 0.0, kPc);
    return vc;
}

BalanceOptions f_plane_options(double lat = 50.0) {
    BalanceOptions o;
    o.f_plane_lat = lat;
    return o;
}

double distance_to(const VortexCase& vc, int i, int j) {
    return great_circle_distance(vc.fields.center.lat, vc.fields.center.lon, vc.grid.lat(i), vc.grid.lon(j),
                                 kPc.earth_radius);
}

template <class Fn>
void for_ring(const VortexCase& vc, double r_min, double r_max, Fn&& fn) {
    const GridSpec& g = vc.grid;
    for (int i = 0; i < g.nlat; ++i) {
        if (std::abs(g.lat(i) - vc.fields.center.lat) > 15.0) continue;
        for (int j = 0; j < g.nlon; ++j) {
            const double r = distance_to(vc, i, j);
            if (r >= r_min && r <= r_max) fn(i, j, r);
        }
    }
}

}  // namespace

TEST_CASE("solve_gradient_wind: worked points against the bisection oracle") {
    const auto geo = balance::solve_gradient_wind(1e-4, 0.0, 30.0);
    CHECK(geo.defined);
    CHECK(geo.value == 30.0);

    const auto worked = balance::solve_gradient_wind(1e-4, 1.0 / 3.0e5, 40.0);
    const auto bis = oracle::gradient_wind_bisection(1e-4, 1.0 / 3.0e5, 40.0);
    REQUIRE(worked.defined);
    REQUIRE(bis);
    CHECK(std::abs(worked.value - *bis) < 0.01);
    CHECK(worked.value == doctest::Approx(22.75).epsilon(2e-3));
    CHECK(worked.value < 40.0);

    const auto neg = balance::solve_gradient_wind(1e-4, -1.0 / 3.0e5, 40.0);
    CHECK_FALSE(neg.defined);
    CHECK_FALSE(oracle::gradient_wind_bisection(1e-4, -1.0 / 3.0e5, 40.0));

    // southern hemisphere cyclone: f < 0 with K < 0
    const auto sh = balance::solve_gradient_wind(-1e-4, -1.0 / 3.0e5, 40.0);
    REQUIRE(sh.defined);
    CHECK(sh.value == doctest::Approx(worked.value).epsilon(1e-14));

    CHECK_FALSE(balance::solve_gradient_wind(1e-4, std::nan(""), 10.0).defined);
}

TEST_CASE("solve_gradient_wind: residual and branch on random triples") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uf(-1.4e-4, 1.4e-4), uk(-2e-5, 2e-5), uv(0.0, 80.0);
    int tested = 0;
    while (tested < 1000) {
        const double f = uf(rng), k = uk(rng), vg = uv(rng);
        if (std::abs(f) < 1e-6 || f * f + 4.0 * k * f * vg < 0.0) continue;
        ++tested;
        const auto r = balance::solve_gradient_wind(f, k, vg);
        REQUIRE(r.defined);
        CHECK(std::abs(k * r.value * r.value + f * r.value - f * vg) <= 1e-6 * std::max(1.0, std::abs(f * vg)));
        const auto bis = oracle::gradient_wind_bisection(f, k, vg);
        if (std::abs(k) >= 1e-9) {
            REQUIRE(bis);
            CHECK(std::abs(r.value - *bis) < 1e-6 * std::max(1.0, vg));
        }
        if (f * k > 0.0) CHECK(r.value <= vg);
        if (f * k < 0.0) CHECK(r.value >= vg);
    }
}

TEST_CASE("solve_gradient_wind: continuous through the geostrophic switch") {
    const double f = 1e-4, vg = 35.0;
    for (double sign : {-1.0, 1.0})
        for (double mag = 1e-12; mag <= 1e-7; mag *= 1.5) {
            const double k = sign * mag;
            const auto r = balance::solve_gradient_wind(f, k, vg);
            REQUIRE(r.defined);
            // |Vgr - Vg| ~ K Vg^2 / f to first order
            CHECK(std::abs(r.value - vg) <= 2.0 * std::abs(k) * vg * vg / f);
            const auto literal = balance::solve_gradient_wind(f, k, vg, 1e-9);
            if (mag < 1e-9) CHECK(literal.value == vg);
        }
}

TEST_CASE("geostrophic_wind: constant, zonal oracle, Gaussian low") {
    const GridSpec g = GridSpec::global(0.5, true);
    Field phi = synth::harmonic_field(0, 0, g);
    for (double& v : phi.values) v = 5000.0;
    const auto zero = balance::geostrophic_wind(phi);
    for (int i = 0; i < g.nlat; ++i) {
        const bool undefined = g.is_pole_row(i) || std::abs(g.lat(i)) < 5.0;
        CHECK(std::isnan(zero.u(i, 3)) == undefined);
        if (!undefined) CHECK(zero.u(i, 3) == 0.0);
    }

    // Phi = 40 a Omega cos(lat) has u_g = 20 exactly
    for (int i = 0; i < g.nlat; ++i)
        for (int j = 0; j < g.nlon; ++j) phi(i, j) = 40.0 * kPc.earth_radius * kPc.omega * std::cos(g.lat(i) * kDegToRad);
    const auto zonal = balance::geostrophic_wind(phi);
    double worst = 0.0;
    for (int i = 1; i < g.nlat - 1; ++i) {
        if (std::abs(g.lat(i)) < 5.0) continue;
        worst = std::max({worst, std::abs(zonal.u(i, 0) - 20.0), std::abs(zonal.v(i, 0))});
    }
    const double dphi = 0.5 * kDegToRad;
    CHECK(worst < 20.0 * dphi * dphi);

    const VortexCase vc = global_vortex(synth::Balance::Geostrophic);
    const auto gw = balance::geostrophic_wind(vc.fields.z, f_plane_options());
    const double cell = 0.25 * kDegToRad * kPc.earth_radius;
    const double peak = vc.fields.analytic.vg(vc.spec.radius_scale, vc.fields.f_plane);
    double err = 0.0;
    for_ring(vc, 2.0 * cell, 1.5e6, [&](int i, int j, double r) {
        err = std::max(err, std::abs(std::hypot(gw.u(i, j), gw.v(i, j)) - vc.fields.analytic.vg(r, vc.fields.f_plane)));
        // tangent to the contours
        CHECK(std::abs(gw.u(i, j) - vc.fields.u(i, j)) < 0.01 * peak);
        CHECK(std::abs(gw.v(i, j) - vc.fields.v(i, j)) < 0.01 * peak);
    });
    CHECK(err < 0.01 * peak);
}

TEST_CASE("geostrophic wind is tangent to smoothed contours") {
    const VortexCase vc = global_vortex(synth::Balance::Geostrophic, 0.5);
    const Field z = spectral::truncate(vc.fields.z);
    const auto gw = balance::geostrophic_wind(z, f_plane_options());
    const Field dx = ddx(z), dy = ddy(z);
    double worst = 0.0;
    for_ring(vc, 1.0e5, 1.5e6, [&](int i, int j, double) {
        const double speed = std::hypot(gw.u(i, j), gw.v(i, j));
        const double grad = std::hypot(dx(i, j), dy(i, j));
        if (speed < 1.0) return;
        worst = std::max(worst, std::abs(gw.u(i, j) * dx(i, j) + gw.v(i, j) * dy(i, j)) / (speed * grad));
    });
    CHECK(worst < 1e-3);
}

TEST_CASE("contour_curvature: straight contours have no curvature") {
    // meridians are the great circles of a regular grid: Phi linear in longitude
    const GridSpec g = GridSpec::regional(60, 30, 300, 40, 0.5);
    Field phi;
    phi.grid = g;
    phi.variable = "z";
    phi.units = "m2 s-2";
    phi.level = Level::pressure(500);
    phi.values.resize(g.size());
    for (int i = 0; i < g.nlat; ++i)
        for (int j = 0; j < g.nlon; ++j) phi(i, j) = 30000.0 + 8.0e3 * (j * g.lon_step) * kDegToRad;
    BalanceOptions opt;
    opt.lmax = 0;
    const Field k = balance::contour_curvature(phi, opt);
    double worst = 0.0;
    int finite = 0;
    for (double v : k.values)
        if (!std::isnan(v)) {
            worst = std::max(worst, std::abs(v));
            ++finite;
        }
    CHECK(finite > 1000);
    CHECK(worst < 1e-8);
    CHECK_THROWS_AS(balance::contour_curvature(phi), Error);  // T106 needs a global grid
}

TEST_CASE("contour_curvature: circular contours give 1/r and positive cyclonic curvature") {
    const VortexCase vc = global_vortex(synth::Balance::Gradient);
    const Field k = balance::contour_curvature(vc.fields.z, f_plane_options());
    double worst = 0.0;
    for_ring(vc, 3.0e5, 1.0e6, [&](int i, int j, double r) {
        worst = std::max(worst, std::abs(k(i, j) * r - 1.0));
    });
    MESSAGE("max |K r - 1| on 300-1000 km: " << worst);
    CHECK(worst < 0.02);
    int positive = 0, total = 0;
    for_ring(vc, 5.0e4, 1.4e6, [&](int i, int j, double) {
        if (std::isnan(k(i, j))) return;
        ++total;
        positive += k(i, j) > 0.0;
    });
    CHECK(total > 1000);
    CHECK(positive == total);
}

TEST_CASE("motion_corrected_curvature: identities and trajectory oracle") {
    const GridSpec g = GridSpec::regional(60, 40, 0, 20, 1.0);
    Field k;
    k.grid = g;
    k.variable = "curv";
    k.units = "m-1";
    k.values.assign(g.size(), 2.0e-6);
    Field ug = Field::like(k, "u", "m s-1", 12.0);
    Field vg = Field::like(k, "v", "m s-1", -16.0);
    vg.values[0] = 0.3;
    ug.values[0] = 0.0;
    const Field same = balance::motion_corrected_curvature(k, ug, vg, {0.0, 0.0});
    CHECK(same.values[5] == k.values[5]);
    CHECK(std::isnan(same.values[0]));
    // c parallel to the flow with |c| = Vg / 2
    const Field half = balance::motion_corrected_curvature(k, ug, vg, {6.0, -8.0});
    CHECK(half.values[5] == doctest::Approx(1.0e-6).epsilon(1e-14));

    synth::VortexSpec spec;
    spec.balance = synth::Balance::Geostrophic;
    spec.amplitude = 6000.0;
    spec.radius_scale = 6.0e5;
    spec.translation = {17.7, 6.4};
    const GridSpec glob = GridSpec::global(0.25, true);
    const auto vf = synth::gaussian_low(spec, glob, parse_time("2023-11-01T00:00Z"), 0.0, kPc);
    const BalanceOptions opt = f_plane_options();
    const Field z = spectral::truncate(vf.z);
    const auto gw = balance::geostrophic_wind(z, opt);
    const Field kc = balance::motion_corrected_curvature(balance::curvature_from_wind(gw, opt), gw.u, gw.v,
                                                         spec.translation, opt);
    double worst = 0.0;
    for (double r_km = 300.0; r_km <= 1000.0; r_km += 175.0) {
        for (int b = 0; b < 8; ++b) {
            const LatLon p = destination_point(vf.center.lat, vf.center.lon, b * kPi / 4.0, r_km * 1e3, kPc.earth_radius);
            const int i = static_cast<int>(std::lround((glob.lat_start - p.lat) / 0.25));
            const int j = static_cast<int>(std::lround(wrap_lon(p.lon) / 0.25)) % glob.nlon;
            const double r = great_circle_distance(glob.lat(i), glob.lon(j), vf.center.lat, vf.center.lon, kPc.earth_radius);
            const double bearing = initial_bearing(glob.lat(i), glob.lon(j), vf.center.lat, vf.center.lon);
            const oracle::TranslatingVortex tv{spec.amplitude, spec.radius_scale, vf.f_plane, spec.translation.cx,
                                               spec.translation.cy, r * std::sin(bearing), r * std::cos(bearing)};
            const double expect = oracle::trajectory_curvature(tv);
            worst = std::max(worst, std::abs(kc(i, j) - expect) / std::abs(expect));
        }
    }
    MESSAGE("max relative trajectory-curvature error: " << worst);
    CHECK(worst < 0.05);
}

TEST_CASE("gradient_wind_speed masks and fallbacks") {
    const GridSpec g = GridSpec::global(1.0, true);
    Field vg = synth::harmonic_field(0, 0, g);
    vg.variable = "wsg";
    for (double& v : vg.values) v = 40.0;
    Field k = Field::like(vg, "curv", "m-1", 1.0 / 3.0e5);
    const int row = 40;  // 50 N
    k(row, 1) = -1.0 / 3.0e5;
    k(row, 2) = std::nan("");
    vg(row, 3) = 0.2;
    k(row, 3) = std::nan("");
    const auto gr = balance::gradient_wind_speed(vg, k);
    CHECK(gr.mask(row, 0) == 1.0);
    CHECK(gr.mask(row, 1) == 0.0);
    CHECK(std::isnan(gr.speed(row, 1)));
    CHECK(gr.mask(row, 2) == 0.0);
    CHECK(gr.mask(row, 3) == 1.0);
    CHECK(gr.speed(row, 3) == 0.2);
    CHECK(gr.mask(90, 0) == 0.0);   // equator
    CHECK(gr.mask(0, 0) == 0.0);    // pole
    const double f = kPc.coriolis(50.0);
    const double v = gr.speed(row, 0);
    CHECK(std::abs(k(row, 0) * v * v + f * v - f * 40.0) <= 1e-6 * std::max(1.0, f * 40.0));
}

TEST_CASE("balance bundles on synthetic vortices") {
    SUBCASE("gradient-balanced vortex closes") {
        const VortexCase vc = global_vortex(synth::Balance::Gradient);
        const auto b = balance::balance_from_fields(vc.fields.u, vc.fields.v, vc.fields.z, {}, false, f_plane_options());
        const double cell = 0.25 * kDegToRad * kPc.earth_radius;
        double worst = 0.0;
        int counted = 0;
        for_ring(vc, 2.0 * cell, 2.0e6, [&](int i, int j, double) {
            if (b.mask(i, j) != 1.0) return;
            ++counted;
            worst = std::max(worst, std::abs(b.diff(i, j)));
            if (b.K(i, j) > 0.0) CHECK(b.Vgr(i, j) <= b.Vg(i, j));
        });
        MESSAGE("max |V - Vgr|: " << worst << " over " << counted << " points");
        CHECK(counted > 10000);
        CHECK(worst < 0.5);
        CHECK(b.provenance()["coriolis"]["mode"] == "f-plane");
    }
    SUBCASE("geostrophic vortex is super-gradient in the core") {
        const VortexCase vc = global_vortex(synth::Balance::Geostrophic, 0.5);
        const auto b = balance::balance_from_fields(vc.fields.u, vc.fields.v, vc.fields.z, {}, true, f_plane_options());
        for_ring(vc, 1.0e5, 8.0e5, [&](int i, int j, double) {
            if (b.mask(i, j) == 1.0) CHECK(b.diff(i, j) > 0.0);
        });
    }
    SUBCASE("calm atmosphere") {
        const GridSpec g = GridSpec::global(0.5, false);
        Field z = synth::harmonic_field(0, 0, g);
        for (double& v : z.values) v = 14000.0;
        z.level = Level::pressure(850);
        const Field u = Field::like(z, "u", "m s-1"), v = Field::like(z, "v", "m s-1");
        const auto b = balance::balance_from_fields(u, v, z, {17.7, 6.4}, true);
        for (int i = 0; i < g.nlat; ++i) {
            if (std::abs(g.lat(i)) < 5.0) continue;
            for (int j = 0; j < g.nlon; j += 17) {
                CHECK(std::abs(b.V(i, j)) < 1e-9);
                CHECK(b.mask(i, j) == 1.0);
                CHECK(b.Vgr(i, j) == b.Vg(i, j));
                CHECK(std::abs(b.diff(i, j)) < 1e-9);
            }
        }
    }
}

TEST_CASE("T106 pre-smoothing reduces curvature variance on a noisy field") {
    const VortexCase vc = global_vortex(synth::Balance::Geostrophic, 0.5);
    synth::NoiseSpec noise;
    noise.amplitude = 0.5;
    const Field noisy = synth::noisy_field(vc.fields.z, noise);
    BalanceOptions raw = f_plane_options();
    raw.lmax = 0;
    const Field k_raw = balance::contour_curvature(noisy, raw);
    const Field k_smooth = balance::contour_curvature(noisy, f_plane_options());
    const auto variance = [&](const Field& k) {
        double s = 0, s2 = 0;
        int n = 0;
        for_ring(vc, 2.0e5, 1.2e6, [&](int i, int j, double) {
            const double v = k(i, j);
            if (std::isnan(v)) return;
            s += v;
            s2 += v * v;
            ++n;
        });
        return s2 / n - (s / n) * (s / n);
    };
    const double ratio = variance(k_raw) / variance(k_smooth);
    MESSAGE("curvature variance reduction factor: " << ratio);
    CHECK(ratio > 100.0);
}

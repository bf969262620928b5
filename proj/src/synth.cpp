#include "stormdiag/synth.hpp"

#include <cmath>
#include <random>

#include "stormdiag/error.hpp"
#include "stormdiag/geo.hpp"

namespace stormdiag::synth {

void VortexSpec::validate() const {
    if (!(radius_scale > 0.0)) throw Error("vortex radius_scale must be positive");
    if (!(amplitude > 0.0)) throw Error("vortex amplitude must be positive (a low)");
    const double alat = std::abs(center_lat);
    if (!(alat > 10.0 && alat < 80.0)) throw Error("vortex centre latitude must satisfy 10 < |lat| < 80");
    translation.validate();
}

// ---------------------------------------------------------------------------
// closed forms

double VortexAnalytic::phi_anomaly(double r) const {
    return -amplitude * std::exp(-r * r / (2.0 * radius_scale * radius_scale));
}

double VortexAnalytic::dphi_dr(double r) const {
    const double l2 = radius_scale * radius_scale;
    return amplitude * r / l2 * std::exp(-r * r / (2.0 * l2));
}

double VortexAnalytic::vg(double r, double f) const { return dphi_dr(r) / f; }

double VortexAnalytic::vgr(double r, double f) const {
    if (r <= 0.0) return 0.0;
    // K V^2 + f V - f Vg = 0 with K = 1/r; f Vg / r = A/L^2 exp(..) keeps this finite
    const double l2 = radius_scale * radius_scale;
    const double fvg_over_r = amplitude / l2 * std::exp(-r * r / (2.0 * l2));
    const double root = std::sqrt(f * f + 4.0 * fvg_over_r);
    return 0.5 * r * (root - f);
}

double VortexAnalytic::wind(double r, double f) const {
    return balance == Balance::Geostrophic ? vg(r, f) : vgr(r, f);
}

double VortexAnalytic::vorticity(double r, double f) const {
    const double l2 = radius_scale * radius_scale;
    const double e = std::exp(-r * r / (2.0 * l2));
    if (balance == Balance::Geostrophic) return amplitude / (f * l2) * e * (2.0 - r * r / l2);
    const double c = 4.0 * amplitude / l2 * e;
    const double root = std::sqrt(f * f + c);
    const double dg_dr = -c * r / l2;
    return (root - f) + r * dg_dr / (4.0 * root);
}

// ---------------------------------------------------------------------------
// vortex sampling

LatLon vortex_center(const VortexSpec& spec, double hours, const PhysicalConstants& pc) {
    const double t = hours * 3600.0;
    const double lat = spec.center_lat + spec.translation.cy * t / pc.earth_radius * kRadToDeg;
    const double lon = spec.center_lon + spec.translation.cx * t /
                                             (pc.earth_radius * std::cos(spec.center_lat * kDegToRad)) *
                                             kRadToDeg;
    return {lat, wrap_lon(lon)};
}

VortexFields gaussian_low(const VortexSpec& spec, const GridSpec& grid, TimePoint t, double hours,
                          const PhysicalConstants& pc) {
    spec.validate();
    grid.validate();
    const LatLon c = vortex_center(spec, hours, pc);
    const double footprint = 4.0 * spec.radius_scale / pc.earth_radius * kRadToDeg;
    if (c.lat + footprint > std::min(grid.lat_start, 89.0) ||
        c.lat - footprint < std::max(grid.lat_end(), -89.0)) {
        throw Error("vortex footprint does not fit inside the grid away from the poles");
    }

    VortexFields out;
    out.analytic = {spec.amplitude, spec.radius_scale, spec.balance};
    out.f_plane = pc.coriolis(spec.f_plane_lat);
    out.center = c;

    Field base;
    base.grid = grid;
    base.level = Level::pressure(spec.level_hpa);
    base.valid_time = t;
    base.values.assign(grid.size(), 0.0);
    out.z = Field::like(base, "z", "m2 s-2");
    out.u = Field::like(base, "u", "m s-1");
    out.v = Field::like(base, "v", "m s-1");
    base.level = Level::surface();
    out.msl = Field::like(base, "msl", "Pa");
    out.u10 = Field::like(base, "u10", "m s-1");
    out.v10 = Field::like(base, "v10", "m s-1");

    for (int i = 0; i < grid.nlat; ++i) {
        const double lat = grid.lat(i);
        const double f = spec.f_mode == CoriolisMode::FPlane ? out.f_plane : pc.coriolis(lat);
        for (int j = 0; j < grid.nlon; ++j) {
            const double lon = grid.lon(j);
            const double r = great_circle_distance(c.lat, c.lon, lat, lon, pc.earth_radius);
            const double anomaly = out.analytic.phi_anomaly(r);
            out.z(i, j) = spec.phi_env + anomaly;
            out.msl(i, j) = spec.msl_env + spec.msl_per_phi * anomaly;
            if (r <= 0.0) continue;
            // tangent (counter-clockwise) unit vector at the point
            const double beta = initial_bearing(lat, lon, c.lat, c.lon);
            const double te = std::cos(beta);
            const double tn = -std::sin(beta);
            const double speed = out.analytic.wind(r, std::abs(f));
            const double sense = f >= 0.0 ? 1.0 : -1.0;
            out.u(i, j) = sense * speed * te;
            out.v(i, j) = sense * speed * tn;
            out.u10(i, j) = spec.wind10_factor * out.u(i, j);
            out.v10(i, j) = spec.wind10_factor * out.v(i, j);
        }
    }
    return out;
}

std::vector<Field> gaussian_low_series(const VortexSpec& spec, const GridSpec& grid, TimePoint t0, int n_steps,
                                       double step_h, const PhysicalConstants& pc) {
    if (n_steps < 1 || !(step_h > 0.0)) throw Error("series needs n_steps >= 1 and a positive step");
    std::vector<Field> out;
    for (int k = 0; k < n_steps; ++k) {
        const double h = k * step_h;
        VortexFields vf = gaussian_low(spec, grid, hours_after(t0, h), h, pc);
        for (Field* f : {&vf.z, &vf.u, &vf.v, &vf.msl, &vf.u10, &vf.v10}) out.push_back(std::move(*f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// harmonics

namespace {

// Condon-Shortley normalized theta part, extended to negative m.
double theta_cs(int l, int m, double theta) {
    if (std::abs(m) > l) return 0.0;
    if (m < 0) {
        const double v = std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(-m), theta);
        return (m % 2 == 0) ? v : -v;
    }
    return std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(m), theta);
}

double phase_sign(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// Pbar(l, m) without Condon-Shortley phase.
double pbar(int l, int m, double theta) { return phase_sign(m) * theta_cs(l, m, theta); }

double dpbar_dtheta(int l, int m, double theta) {
    const double up = std::sqrt(double(l - m) * (l + m + 1)) * theta_cs(l, m + 1, theta);
    const double down = std::sqrt(double(l + m) * (l - m + 1)) * theta_cs(l, m - 1, theta);
    return phase_sign(m) * 0.5 * (up - down);
}

void check_degree(int l, int m) {
    if (l < 0 || m < 0 || m > l) {
        throw Error("invalid harmonic degree/order (" + std::to_string(l) + ", " + std::to_string(m) + ")");
    }
}

double lon_factor(int m, double lon_deg) {
    return m == 0 ? 1.0 : std::sqrt(2.0) * std::cos(m * lon_deg * kDegToRad);
}

}  // namespace

double harmonic_value(int l, int m, double lat_deg, double lon_deg) {
    check_degree(l, m);
    const double theta = (90.0 - lat_deg) * kDegToRad;
    return pbar(l, m, theta) * lon_factor(m, lon_deg);
}

double harmonic_ddx(int l, int m, double lat_deg, double lon_deg, double radius) {
    check_degree(l, m);
    if (m == 0) return 0.0;
    const double theta = (90.0 - lat_deg) * kDegToRad;
    const double dlon = -std::sqrt(2.0) * m * std::sin(m * lon_deg * kDegToRad);
    return pbar(l, m, theta) * dlon / (radius * std::cos(lat_deg * kDegToRad));
}

double harmonic_ddy(int l, int m, double lat_deg, double lon_deg, double radius) {
    check_degree(l, m);
    const double theta = (90.0 - lat_deg) * kDegToRad;
    // d/dlat = -d/dtheta
    return -dpbar_dtheta(l, m, theta) * lon_factor(m, lon_deg) / radius;
}

Field harmonic_field(int l, int m, const GridSpec& grid) {
    check_degree(l, m);
    grid.validate();
    Field f;
    f.grid = grid;
    f.variable = "z";
    f.units = "m2 s-2";
    f.level = Level::pressure(500.0);
    f.values.resize(grid.size());
    std::vector<double> lon_part(grid.nlon);
    for (int j = 0; j < grid.nlon; ++j) lon_part[j] = lon_factor(m, grid.lon(j));
    for (int i = 0; i < grid.nlat; ++i) {
        const double p = pbar(l, m, (90.0 - grid.lat(i)) * kDegToRad);
        for (int j = 0; j < grid.nlon; ++j) f(i, j) = p * lon_part[j];
    }
    return f;
}

Field noisy_field(const Field& base, const NoiseSpec& noise) {
    if (noise.lmin <= 106) throw Error("noise_lmin must exceed 106");
    if (noise.lmax < noise.lmin || noise.terms < 1) throw Error("invalid noise degree range");
    Field out = base;
    if (noise.amplitude == 0.0) return out;

    double sum = 0.0;
    double sum2 = 0.0;
    std::size_t n = 0;
    for (double v : base.values) {
        if (std::isnan(v)) continue;
        sum += v;
        sum2 += v * v;
        ++n;
    }
    const double mean = n ? sum / n : 0.0;
    const double var = n ? std::max(0.0, sum2 / n - mean * mean) : 0.0;
    const double scale = var > 0.0 ? std::sqrt(var) : std::abs(mean);

    std::mt19937_64 rng(noise.seed);
    std::uniform_int_distribution<int> pick_l(noise.lmin, noise.lmax);
    std::uniform_real_distribution<double> pick_unit(0.0, 1.0);
    std::normal_distribution<double> pick_amp(0.0, 1.0);

    struct Term {
        int l, m;
        double shift_deg, amp;
    };
    std::vector<Term> terms;
    double energy = 0.0;
    for (int k = 0; k < noise.terms; ++k) {
        const int l = pick_l(rng);
        const int m = std::min(l, static_cast<int>(pick_unit(rng) * (l + 1)));
        const double shift = pick_unit(rng) * 360.0;
        const double amp = pick_amp(rng);
        terms.push_back({l, m, shift, amp});
        energy += amp * amp;
    }
    // each real orthonormal term has mean square 1 / (4 pi) over the sphere
    const double norm = noise.amplitude * scale * std::sqrt(4.0 * kPi / energy);

    const GridSpec& g = base.grid;
    std::vector<double> theta_part(g.nlat);
    for (const Term& term : terms) {
        for (int i = 0; i < g.nlat; ++i) theta_part[i] = pbar(term.l, term.m, (90.0 - g.lat(i)) * kDegToRad);
        for (int j = 0; j < g.nlon; ++j) {
            const double lf = lon_factor(term.m, g.lon(j) - term.shift_deg) * term.amp * norm;
            for (int i = 0; i < g.nlat; ++i) out(i, j) += theta_part[i] * lf;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// parameterized cases

GridSpec grid_from_params(const nlohmann::json& j) {
    const double step = j.value("step", 1.0);
    if (j.value("global", false)) return GridSpec::global(step, j.value("with_poles", false));
    return GridSpec::regional(j.at("north").get<double>(), j.at("south").get<double>(), j.at("west").get<double>(),
                              j.at("east").get<double>(), step);
}

namespace {

VortexSpec vortex_from_params(const nlohmann::json& j) {
    VortexSpec s;
    s.center_lat = j.value("center_lat", s.center_lat);
    s.center_lon = j.value("center_lon", s.center_lon);
    s.amplitude = j.value("amplitude", s.amplitude);
    s.radius_scale = j.value("radius_scale", s.radius_scale);
    const std::string balance = j.value("balance", std::string("gradient"));
    if (balance == "gradient") s.balance = Balance::Gradient;
    else if (balance == "geostrophic") s.balance = Balance::Geostrophic;
    else throw Error("balance must be 'gradient' or 'geostrophic'");
    if (j.contains("translation")) {
        s.translation = {j["translation"].at(0).get<double>(), j["translation"].at(1).get<double>()};
    }
    const std::string mode = j.value("coriolis", std::string("f-plane"));
    if (mode == "f-plane") s.f_mode = CoriolisMode::FPlane;
    else if (mode == "sphere") s.f_mode = CoriolisMode::FullSphere;
    else throw Error("coriolis must be 'f-plane' or 'sphere'");
    s.f_plane_lat = j.value("f_plane_lat", s.center_lat);
    s.level_hpa = j.value("level_hPa", s.level_hpa);
    s.phi_env = j.value("phi_env", s.phi_env);
    s.msl_env = j.value("msl_env", s.msl_env);
    s.msl_per_phi = j.value("msl_per_phi", s.msl_per_phi);
    s.wind10_factor = j.value("wind10_factor", s.wind10_factor);
    return s;
}

NoiseSpec noise_from_params(const nlohmann::json& j) {
    NoiseSpec n;
    n.lmin = j.value("lmin", n.lmin);
    n.lmax = j.value("lmax", n.lmax);
    n.terms = j.value("terms", n.terms);
    n.amplitude = j.value("amplitude", n.amplitude);
    n.seed = j.value("seed", n.seed);
    return n;
}

}  // namespace

std::vector<Field> synth_case(const std::string& name, const nlohmann::json& params, const PhysicalConstants& pc) {
    try {
        const GridSpec grid = grid_from_params(params.value("grid", nlohmann::json::object()));
        const TimePoint t0 = parse_time(params.value("t0", std::string("2023-11-01T00:00Z")));
        if (name == "harmonic") {
            Field f = harmonic_field(params.value("l", 0), params.value("m", 0), grid);
            const double scale = params.value("scale", 1.0);
            for (double& v : f.values) v *= scale;
            f.level = Level::pressure(params.value("level_hPa", 500.0));
            f.valid_time = t0;
            return {f};
        }
        if (name == "gaussian-low" || name == "noisy") {
            const VortexSpec spec = vortex_from_params(params);
            std::vector<Field> out =
                gaussian_low_series(spec, grid, t0, params.value("steps", 1), params.value("step_h", 6.0), pc);
            if (name == "noisy") {
                const NoiseSpec noise = noise_from_params(params.value("noise", nlohmann::json::object()));
                for (Field& f : out)
                    if (f.variable == "z") f = noisy_field(f, noise);
            }
            return out;
        }
        throw Error("unknown synth case '" + name + "' (gaussian-low, harmonic, noisy)");
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed synth parameters: ") + e.what());
    }
}

}  // namespace stormdiag::synth

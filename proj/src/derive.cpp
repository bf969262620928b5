#include "stormdiag/derive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stormdiag/error.hpp"
#include "stormdiag/finite_diff.hpp"

namespace stormdiag::derive {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEpsilon = 0.622;  // Rd / Rv
constexpr double kKappa = 0.2854;   // Rd / cp (Bolton)
constexpr double kZeroC = 273.15;

void require_pair(const Field& a, const Field& b, const char* what) {
    require_coregistered(a, b, what);
}

}  // namespace

Field wind_speed(const Field& u, const Field& v) {
    require_pair(u, v, "wind_speed");
    Field out = Field::like(u, "ws", "m s-1");
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.values[k] = std::sqrt(u.values[k] * u.values[k] + v.values[k] * v.values[k]);
    }
    return out;
}

Field relative_vorticity(const Field& u, const Field& v, const PhysicalConstants& pc) {
    require_pair(u, v, "relative_vorticity");
    const GridSpec& g = u.grid;

    Field ucos = u;
    for (int i = 0; i < g.nlat; ++i) {
        const double c = std::cos(g.lat(i) * kDegToRad);
        for (int j = 0; j < g.nlon; ++j) ucos(i, j) *= c;
    }
    const Field dv_dx = ddx(v, pc);
    const Field ducos_dy = ddy(ucos, pc);

    Field out = Field::like(u, "vo", "s-1", kNaN);
    for (int i = 0; i < g.nlat; ++i) {
        if (g.is_pole_row(i) || i == 0 || i == g.nlat - 1) continue;
        const double c = std::cos(g.lat(i) * kDegToRad);
        const int j_lo = g.global_lon ? 0 : 1;
        const int j_hi = g.global_lon ? g.nlon : g.nlon - 1;
        for (int j = j_lo; j < j_hi; ++j) out(i, j) = dv_dx(i, j) - ducos_dy(i, j) / c;
    }
    return out;
}

double saturation_vapor_pressure(double t_k) {
    const double tc = t_k - kZeroC;
    return 6.112 * std::exp(17.67 * tc / (tc + 243.5));
}

double vapor_pressure_from_q(double q, double p_hpa) {
    const double w = q / (1.0 - q);
    return p_hpa * w / (kEpsilon + w);
}

double saturation_specific_humidity(double t_k, double p_hpa) {
    const double es = saturation_vapor_pressure(t_k);
    const double w = kEpsilon * es / (p_hpa - es);
    return w / (1.0 + w);
}

double dew_point(double e_hpa) {
    const double x = std::log(e_hpa / 6.112);
    return kZeroC + 243.5 * x / (17.67 - x);
}

double theta_e_bolton(double t_k, double e_hpa, double p_hpa) {
    const double r = 1000.0 * kEpsilon * e_hpa / (p_hpa - e_hpa);  // g/kg
    // below ~1e-10 g/kg the LCL fit degenerates; the moisture term is nil anyway
    if (r <= 1e-10) return t_k * std::pow(1000.0 / p_hpa, kKappa);
    const double td = dew_point(e_hpa);
    const double t_lcl = 1.0 / (1.0 / (td - 56.0) + std::log(t_k / td) / 800.0) + 56.0;
    return t_k * std::pow(1000.0 / p_hpa, kKappa * (1.0 - 0.28e-3 * r)) *
           std::exp((3.376 / t_lcl - 0.00254) * r * (1.0 + 0.81e-3 * r));
}

double theta_w_from_theta_e(double theta_e) {
    if (theta_e <= 173.15) return theta_e;
    const double x = theta_e / kZeroC;
    const double x2 = x * x;
    const double x3 = x2 * x;
    const double x4 = x3 * x;
    const double a = 7.101574 - 20.68208 * x + 16.11182 * x2 + 2.574631 * x3 - 5.205688 * x4;
    const double b = 1.0 - 3.552497 * x + 3.781782 * x2 - 0.6899655 * x3 - 0.5929340 * x4;
    return theta_e - std::exp(a / b);
}

namespace {

void check_temperature(double t_k) {
    if (!(t_k > 0.0)) throw Error("non-physical temperature " + std::to_string(t_k) + " K");
}

void check_rh(double rh) {
    if (rh < 0.0 || rh > 110.0) throw Error("non-physical relative humidity " + std::to_string(rh) + " %");
}

void check_q(double q) {
    if (q < 0.0 || q >= 1.0) throw Error("non-physical specific humidity " + std::to_string(q));
}

}  // namespace

double theta_w_point(double t_k, double rh_percent, double p_hpa) {
    check_temperature(t_k);
    check_rh(rh_percent);
    const double e = rh_percent / 100.0 * saturation_vapor_pressure(t_k);
    return theta_w_from_theta_e(theta_e_bolton(t_k, e, p_hpa));
}

Field theta_w(const Field& t, const Field& humidity, HumidityKind kind, double level_hpa) {
    require_pair(t, humidity, "theta_w");
    if (!(level_hpa > 0.0)) throw Error("theta_w: level must be a positive pressure");
    Field out = Field::like(t, "thw", "K", kNaN);
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        const double tk = t.values[k];
        const double h = humidity.values[k];
        if (std::isnan(tk) || std::isnan(h)) continue;
        check_temperature(tk);
        double e;
        if (kind == HumidityKind::RelativeHumidity) {
            check_rh(h);
            e = h / 100.0 * saturation_vapor_pressure(tk);
        } else {
            check_q(h);
            e = vapor_pressure_from_q(h, level_hpa);
        }
        out.values[k] = theta_w_from_theta_e(theta_e_bolton(tk, e, level_hpa));
    }
    return out;
}

Field rh_from_q(const Field& q, const Field& t, double level_hpa, RhDiagnostics* diagnostics) {
    require_pair(q, t, "rh_from_q");
    if (!(level_hpa > 0.0)) throw Error("rh_from_q: level must be a positive pressure");
    Field out = Field::like(q, "r_derived", "%", kNaN);
    RhDiagnostics local;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        const double qv = q.values[k];
        const double tk = t.values[k];
        if (std::isnan(qv) || std::isnan(tk)) continue;
        check_q(qv);
        check_temperature(tk);
        double rh = 100.0 * vapor_pressure_from_q(qv, level_hpa) / saturation_vapor_pressure(tk);
        if (rh < 0.0) {
            rh = 0.0;
            ++local.clipped_low;
        } else if (rh > kRhCeiling) {
            rh = kRhCeiling;
            ++local.clipped_high;
        }
        out.values[k] = rh;
    }
    if (diagnostics) *diagnostics = local;
    return out;
}

std::vector<Field> derive_available(const Dataset& ds, Level level, TimePoint t,
                                    const PhysicalConstants& pc) {
    std::vector<Field> out;
    if (level.is_surface()) {
        if (ds.contains("u10", level, t) && ds.contains("v10", level, t)) {
            Field ws = wind_speed(ds.get("u10", level, t), ds.get("v10", level, t));
            ws.variable = "ws10";
            out.push_back(std::move(ws));
        }
        return out;
    }
    if (ds.contains("u", level, t) && ds.contains("v", level, t)) {
        const Field& u = ds.get("u", level, t);
        const Field& v = ds.get("v", level, t);
        out.push_back(wind_speed(u, v));
        out.push_back(relative_vorticity(u, v, pc));
    }
    if (ds.contains("t", level, t)) {
        const Field& temp = ds.get("t", level, t);
        if (ds.contains("r", level, t)) {
            out.push_back(theta_w(temp, ds.get("r", level, t), HumidityKind::RelativeHumidity,
                                  level.hpa()));
        } else if (ds.contains("q", level, t)) {
            const Field& q = ds.get("q", level, t);
            out.push_back(theta_w(temp, q, HumidityKind::SpecificHumidity, level.hpa()));
            out.push_back(rh_from_q(q, temp, level.hpa()));
        }
    }
    return out;
}

}  // namespace stormdiag::derive

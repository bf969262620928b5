#include "stormdiag/track.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "stormdiag/derive.hpp"
#include "stormdiag/error.hpp"
#include "stormdiag/grid_ops.hpp"

namespace stormdiag::track {

namespace {

constexpr double kMinPlausibleHpa = 850.0;
constexpr double kMaxPlausibleHpa = 1100.0;

double to_hpa(double pa, const FieldKey& key) {
    const double hpa = pa / 100.0;
    if (!(hpa > kMinPlausibleHpa && hpa < kMaxPlausibleHpa)) {
        throw Error("implausible central pressure " + std::to_string(hpa) + " hPa in " + key.describe());
    }
    return hpa;
}

double hours_between(TimePoint a, TimePoint b) {
    return std::chrono::duration<double>(b - a).count() / 3600.0;
}

}  // namespace

Track track_cyclone(const Dataset& ds, const RegionBox& first_guess, TimePoint t0, TimePoint t1,
                    const TrackOptions& opt, const PhysicalConstants& pc) {
    first_guess.validate();
    if (t1 < t0) throw Error("track end precedes start");
    if (!(opt.search_radius_km > 0.0) || !(opt.speed_gate_m_s > 0.0)) throw Error("invalid tracking options");

    const Level sfc = Level::surface();
    std::vector<TimePoint> times;
    for (TimePoint t : ds.times("msl", sfc))
        if (t >= t0 && t <= t1) times.push_back(t);
    if (times.empty() || times.front() != t0) throw Error("missing msl at track start " + format_time(t0));
    if (times.back() != t1) throw Error("missing msl at track end " + format_time(t1));

    double step_h = 0.0;
    if (times.size() > 1) {
        step_h = hours_between(times[0], times[1]);
        for (std::size_t k = 1; k < times.size(); ++k) {
            const double gap = hours_between(times[k - 1], times[k]);
            if (std::abs(gap - step_h) > 1e-9) {
                throw Error("missing msl time step between " + format_time(times[k - 1]) + " and " +
                            format_time(times[k]));
            }
        }
        const double radius_km = opt.search_radius_km * step_h / 6.0;
        const double gate_km = opt.speed_gate_m_s * step_h * 3.6;
        if (radius_km > 1.1 * gate_km) {
            throw Error("search radius " + std::to_string(radius_km) + " km exceeds the " +
                        std::to_string(opt.speed_gate_m_s) + " m/s speed gate for a " + std::to_string(step_h) +
                        " h step");
        }
    }

    Track track;
    track.source_label = ds.label();
    {
        const Field& msl = ds.get("msl", sfc, times[0]);
        const GridPoint p = region_extremum(msl, first_guess, Extremum::Min);
        track.points.push_back({times[0], p.lat, p.lon, to_hpa(p.value, msl.key())});
    }
    const double radius_m = opt.search_radius_km * 1e3 * step_h / 6.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const Field& msl = ds.get("msl", sfc, times[k]);
        const TrackPoint& prev = track.points.back();
        const auto p = disk_extremum(msl, prev.lat, prev.lon, radius_m, Extremum::Min, pc);
        if (!p) {
            track.terminated_early = true;
            track.termination_reason = "no msl minimum within " + std::to_string(radius_m / 1e3) + " km at " +
                                       format_time(times[k]);
            break;
        }
        track.points.push_back({times[k], p->lat, p->lon, to_hpa(p->value, msl.key())});
    }
    return track;
}

double bergerons(double deepening_hpa, double window_h, double lat_deg) {
    const double rate24 = deepening_hpa * 24.0 / window_h;
    const double threshold = 24.0 * std::abs(std::sin(lat_deg * kDegToRad)) / std::sin(60.0 * kDegToRad);
    return rate24 / threshold;
}

IntensificationReport intensification(const Track& track, double window_h) {
    if (!(window_h > 0.0)) throw Error("intensification window must be positive");
    const auto& pts = track.points;
    if (pts.size() < 2 || hours_between(pts.front().time, pts.back().time) < window_h - 1e-9) {
        throw Error("track shorter than the " + std::to_string(window_h) + " h intensification window");
    }
    const auto lat_at = [&](TimePoint t) {
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (pts[k].time == t) return pts[k].lat;
            if (k + 1 < pts.size() && pts[k].time < t && t < pts[k + 1].time) {
                const double w = hours_between(pts[k].time, t) / hours_between(pts[k].time, pts[k + 1].time);
                return (1.0 - w) * pts[k].lat + w * pts[k + 1].lat;
            }
        }
        throw Error("time outside track: " + format_time(t));
    };

    std::optional<IntensificationReport> best;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dt = hours_between(pts[i].time, pts[j].time);
            if (std::abs(dt - window_h) > 1e-9) continue;
            const double deepening = pts[i].mslp_hpa - pts[j].mslp_hpa;
            if (best && deepening <= best->deepening_hpa) continue;
            IntensificationReport r;
            r.window_h = window_h;
            r.deepening_hpa = deepening;
            r.window_start = pts[i].time;
            r.reference_lat = lat_at(pts[i].time + std::chrono::seconds(static_cast<long long>(window_h * 1800.0)));
            best = r;
        }
    }
    if (!best) throw Error("no pair of track points is exactly " + std::to_string(window_h) + " h apart");
    best->bergerons = bergerons(best->deepening_hpa, window_h, best->reference_lat);
    best->is_bomb = best->bergerons >= 1.0;
    return *best;
}

std::vector<JetMax> jet_max_at_track_longitude(const Dataset& ds, const Track& track, double level_hpa,
                                               double lat_south, double lat_north) {
    if (!(lat_south < lat_north)) throw Error("invalid jet latitude band");
    const Level level = Level::pressure(level_hpa);
    std::vector<JetMax> out;
    for (const TrackPoint& p : track.points) {
        const Field speed = derive::wind_speed(ds.get("u", level, p.time), ds.get("v", level, p.time));
        const GridSpec& g = speed.grid;
        int col = -1;
        double best_gap = 1e9;
        for (int j = 0; j < g.nlon; ++j) {
            const double d = std::abs(wrap_lon(g.lon(j) - p.lon + 180.0) - 180.0);
            if (d < best_gap) {
                best_gap = d;
                col = j;
            }
        }
        if (best_gap > g.lon_step) throw Error("track longitude outside the wind grid at " + format_time(p.time));
        std::optional<JetMax> m;
        for (int i = 0; i < g.nlat; ++i) {
            const double lat = g.lat(i);
            if (lat < lat_south || lat > lat_north) continue;
            const double s = speed(i, col);
            if (std::isnan(s)) continue;
            if (!m || s > m->speed) m = JetMax{p.time, lat, g.lon(col), s};
        }
        if (!m) throw Error("no wind values in the jet band at " + format_time(p.time));
        out.push_back(*m);
    }
    return out;
}

Field surface_wind_speed(const Dataset& ds, TimePoint t) {
    const Level sfc = Level::surface();
    if (ds.contains("ws10", sfc, t)) return ds.get("ws10", sfc, t);
    Field s = derive::wind_speed(ds.get("u10", sfc, t), ds.get("v10", sfc, t));
    s.variable = "ws10";
    return s;
}

std::vector<IntensityRow> intensity_timeseries(const Dataset& ds, const Track& track, double radius_km,
                                               const PhysicalConstants& pc) {
    if (!(radius_km > 0.0)) throw Error("wind search radius must be positive");
    std::vector<IntensityRow> out;
    for (const TrackPoint& p : track.points) {
        const Field ws = surface_wind_speed(ds, p.time);
        const auto m = disk_extremum(ws, p.lat, p.lon, radius_km * 1e3, Extremum::Max, pc);
        if (!m) throw Error("no 10-m wind within " + std::to_string(radius_km) + " km at " + format_time(p.time));
        out.push_back({p.time, p.mslp_hpa, m->value, m->lat, m->lon});
    }
    return out;
}

nlohmann::json to_json(const Track& track) {
    nlohmann::json pts = nlohmann::json::array();
    for (const TrackPoint& p : track.points) {
        pts.push_back({{"time", format_time(p.time)}, {"lat", p.lat}, {"lon", p.lon}, {"mslp_hPa", p.mslp_hpa}});
    }
    nlohmann::json j = {{"source_label", track.source_label}, {"points", pts}};
    if (track.intensification) {
        const auto& r = *track.intensification;
        j["intensification"] = {{"window_h", r.window_h},
                                {"deepening_hPa", r.deepening_hpa},
                                {"window_start", format_time(r.window_start)},
                                {"reference_lat", r.reference_lat},
                                {"bergerons", r.bergerons},
                                {"is_bomb", r.is_bomb}};
    } else {
        j["intensification"] = nullptr;
    }
    j["terminated_early"] = track.terminated_early;
    if (track.terminated_early) j["termination_reason"] = track.termination_reason;
    return j;
}

Track track_from_json(const nlohmann::json& j) {
    try {
        Track t;
        t.source_label = j.value("source_label", "");
        for (const auto& p : j.at("points")) {
            t.points.push_back({parse_time(p.at("time").get<std::string>()), p.at("lat").get<double>(),
                                p.at("lon").get<double>(), p.at("mslp_hPa").get<double>()});
        }
        for (std::size_t k = 1; k < t.points.size(); ++k) {
            if (!(t.points[k - 1].time < t.points[k].time)) throw Error("track times must increase strictly");
        }
        if (j.contains("intensification") && !j["intensification"].is_null()) {
            const auto& r = j["intensification"];
            IntensificationReport rep;
            rep.window_h = r.at("window_h").get<double>();
            rep.deepening_hpa = r.at("deepening_hPa").get<double>();
            rep.window_start = parse_time(r.at("window_start").get<std::string>());
            rep.reference_lat = r.at("reference_lat").get<double>();
            rep.bergerons = r.at("bergerons").get<double>();
            rep.is_bomb = r.at("is_bomb").get<bool>();
            t.intensification = rep;
        }
        t.terminated_early = j.value("terminated_early", false);
        t.termination_reason = j.value("termination_reason", "");
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed track JSON: ") + e.what());
    }
}

void write_track(const std::filesystem::path& file, const Track& track) {
    std::ofstream out(file);
    if (!out) throw Error("cannot write " + file.string());
    out << to_json(track).dump(2) << "\n";
}

Track read_track(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot read track " + file.string());
    try {
        return track_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("malformed track JSON in " + file.string() + ": " + e.what());
    }
}

}  // namespace stormdiag::track

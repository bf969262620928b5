#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stormdiag/constants.hpp"
#include "stormdiag/dataset.hpp"
#include "stormdiag/grid.hpp"

namespace stormdiag::track {

struct TrackPoint {
    TimePoint time{};
    double lat = 0.0;
    double lon = 0.0;
    double mslp_hpa = 0.0;
};

struct IntensificationReport {
    double window_h = 24.0;
    double deepening_hpa = 0.0;  // largest p(t) - p(t + window)
    TimePoint window_start{};
    double reference_lat = 0.0;  // latitude at the window midpoint
    double bergerons = 0.0;
    bool is_bomb = false;
};

struct Track {
    std::string source_label;
    std::vector<TrackPoint> points;
    bool terminated_early = false;
    std::string termination_reason;
    std::optional<IntensificationReport> intensification;
};

struct TrackOptions {
    double search_radius_km = 900.0;  // per 6 h, scaled with the time step
    double speed_gate_m_s = 40.0;
};

/// Follows the MSLP minimum from the first-guess box at t0 through every
/// dataset time step up to t1. Each later centre is the minimum within the
/// search radius of the previous one. A step with no valid value inside the
/// radius ends the track early (flagged, not an error).
Track track_cyclone(const Dataset& ds, const RegionBox& first_guess, TimePoint t0, TimePoint t1,
                    const TrackOptions& opt = {}, const PhysicalConstants& pc = {});

/// Bergeron-normalized deepening: rate scaled to 24 h, divided by
/// 24 hPa * sin(lat) / sin(60).
double bergerons(double deepening_hpa, double window_h, double lat_deg);

/// Maximum deepening over sliding windows of `window_h` hours.
IntensificationReport intensification(const Track& track, double window_h = 24.0);

struct JetMax {
    TimePoint time{};
    double lat = 0.0;
    double lon = 0.0;
    double speed = 0.0;
};

/// Strongest wind at `level_hpa` along the grid meridian nearest each track
/// point, within [lat_south, lat_north]; ties go to the northernmost row.
std::vector<JetMax> jet_max_at_track_longitude(const Dataset& ds, const Track& track, double level_hpa = 250.0,
                                               double lat_south = 20.0, double lat_north = 75.0);

struct IntensityRow {
    TimePoint time{};
    double mslp_hpa = 0.0;
    double max_ws10 = 0.0;
    double max_ws10_lat = 0.0;
    double max_ws10_lon = 0.0;
};

/// Central MSLP from the track and the largest 10-m wind within
/// `radius_km` of each track point (ws10, or u10/v10 when ws10 is absent).
std::vector<IntensityRow> intensity_timeseries(const Dataset& ds, const Track& track, double radius_km,
                                               const PhysicalConstants& pc = {});

/// 10-m wind speed at t from ws10 or from u10/v10.
Field surface_wind_speed(const Dataset& ds, TimePoint t);

nlohmann::json to_json(const Track& track);
Track track_from_json(const nlohmann::json& j);
void write_track(const std::filesystem::path& file, const Track& track);
Track read_track(const std::filesystem::path& file);

}  // namespace stormdiag::track

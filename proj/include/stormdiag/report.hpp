#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stormdiag/balance.hpp"
#include "stormdiag/dataset.hpp"
#include "stormdiag/track.hpp"

namespace stormdiag::report {

// ---------------------------------------------------------------------------
// conveyor-belt peaks

/// Box given as offsets in degrees from a storm centre.
struct RelativeBox {
    double dlon_west = 0.0;
    double dlon_east = 0.0;
    double dlat_south = 0.0;
    double dlat_north = 0.0;

    RegionBox at(double lat, double lon) const;
};

/// Default cold-conveyor-belt box: south-west of the centre.
RelativeBox default_ccb_box();
/// Default warm-conveyor-belt box: east and south-east of the centre.
RelativeBox default_wcb_box();

struct Peak {
    bool defined = false;
    double value = 0.0;
    double lat = 0.0;
    double lon = 0.0;
};

struct PeakSummary {
    std::string source_label;
    TimePoint valid_time{};
    std::string region_label;
    Peak V, Vg, Vgr;
};

struct NamedBundle {
    std::string source_label;
    balance::BalanceBundle bundle;
};

/// Per source and region: maxima of V, Vg and Vgr (Vgr only where mask = 1).
/// Bundles must be smoothed and co-registered. A box that selects no grid
/// point is an error; a box where a field is all NaN yields an undefined peak.
std::vector<PeakSummary> peak_table(const std::vector<NamedBundle>& bundles,
                                    const std::vector<std::pair<std::string, RegionBox>>& boxes);

void write_peak_csv(std::ostream& out, const std::vector<PeakSummary>& rows);

// ---------------------------------------------------------------------------
// intercomparison

struct IntercomparisonOptions {
    double search_radius_km = 900.0;
    double wind_radius_km = 500.0;
};

struct IntercomparisonRow {
    std::string source_label;
    TimePoint time{};
    bool ok = false;
    std::string error;
    double lat = 0.0;
    double lon = 0.0;
    double mslp_hpa = 0.0;
    double max_ws10 = 0.0;
    double position_error_km = 0.0;
};

struct Intercomparison {
    std::vector<IntercomparisonRow> rows;
    std::vector<std::string> failed_sources;  // no time could be processed
};

/// Follows each source's own MSLP minimum from the reference track's
/// position at times[0] and compares it with the reference at every time.
/// Failures are recorded per source and time; other sources continue.
Intercomparison intercomparison(const std::vector<Dataset>& sources, const track::Track& reference,
                                const std::vector<TimePoint>& times, const IntercomparisonOptions& opt = {},
                                const PhysicalConstants& pc = {});

void write_intercomparison_csv(std::ostream& out, const Intercomparison& table);
void write_intensity_csv(std::ostream& out, const std::vector<track::IntensityRow>& rows);

// ---------------------------------------------------------------------------
// contours

struct Polyline {
    bool closed = false;
    std::vector<LatLon> points;
};

struct ContourLevel {
    double value = 0.0;
    std::vector<Polyline> lines;
};

struct ContourExport {
    std::string variable;
    std::string convention;
    std::string units;
    std::vector<ContourLevel> levels;

    nlohmann::json to_json() const;
};

/// Registered map conventions: "theta_w" (280 to 287.5 K every 2.5 K),
/// "vorticity" (3e-4 s-1, then every 2e-4 s-1 up to the field maximum),
/// "rh" (80 %), "jet_250" (65 m s-1).
std::vector<std::string> convention_keys();
std::vector<double> convention_levels(const std::string& key, const Field& f);

/// Marching-squares iso-lines at each level. Cells with a NaN corner are
/// skipped; periodic grids wrap in longitude. Polylines are assembled in
/// row-major order of their first cell, so output is deterministic.
std::vector<Polyline> iso_lines(const Field& f, double level);

ContourExport contour_export(const Field& f, const std::string& convention);

// ---------------------------------------------------------------------------
// config-driven report

struct ReportOutcome {
    std::vector<std::string> failed_sources;
    std::vector<std::string> written;
    nlohmann::json summary;
};

/// Runs a report described by `config` (see README) and writes CSV/JSON
/// outputs into `out_dir`. Relative dataset paths resolve against `base_dir`.
ReportOutcome run_report(const nlohmann::json& config, const std::filesystem::path& out_dir,
                         const std::filesystem::path& base_dir = {});

}  // namespace stormdiag::report

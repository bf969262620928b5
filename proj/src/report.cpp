#include "stormdiag/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "stormdiag/derive.hpp"
#include "stormdiag/error.hpp"
#include "stormdiag/geo.hpp"
#include "stormdiag/grid_ops.hpp"

namespace stormdiag::report {

namespace fs = std::filesystem;
using nlohmann::json;

RegionBox RelativeBox::at(double lat, double lon) const {
    RegionBox b{wrap_lon(lon + dlon_west), wrap_lon(lon + dlon_east), lat + dlat_south, lat + dlat_north};
    b.validate();
    return b;
}

RelativeBox default_ccb_box() { return {-8.0, -1.0, -6.0, -1.0}; }
RelativeBox default_wcb_box() { return {1.0, 8.0, -4.0, 3.0}; }

namespace {

Peak box_peak(const Field& f, const RegionBox& box, const std::string& what) {
    std::size_t selected = 0, valid = 0;
    for (int i = 0; i < f.grid.nlat; ++i) {
        for (int j = 0; j < f.grid.nlon; ++j) {
            if (!box.contains(f.grid.lat(i), f.grid.lon(j))) continue;
            ++selected;
            if (!std::isnan(f(i, j))) ++valid;
        }
    }
    if (selected == 0) throw Error("box selects no grid points for " + what);
    if (valid == 0) return {};
    const GridPoint p = region_extremum(f, box, Extremum::Max);
    return {true, p.value, p.lat, p.lon};
}

// Vgr restricted to points where the gradient-wind solution is valid.
Field masked_vgr(const balance::BalanceBundle& b) {
    Field out = b.Vgr;
    for (std::size_t n = 0; n < out.values.size(); ++n) {
        if (b.mask.values[n] != 1.0) out.values[n] = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

std::string peak_cells(const Peak& p) {
    if (!p.defined) return ",,";
    return num(p.value) + "," + num(p.lat) + "," + num(p.lon);
}

}  // namespace

std::vector<PeakSummary> peak_table(const std::vector<NamedBundle>& bundles,
                                    const std::vector<std::pair<std::string, RegionBox>>& boxes) {
    if (bundles.empty()) throw Error("peak table needs at least one bundle");
    const auto& first = bundles.front().bundle;
    for (const auto& nb : bundles) {
        const auto& b = nb.bundle;
        if (!b.smoothed) throw Error("peak table requires smoothed bundles (" + nb.source_label + ")");
        require_coregistered(first.V, b.V, "peak table bundle " + nb.source_label);
    }
    std::vector<PeakSummary> rows;
    for (const auto& nb : bundles) {
        const Field vgr = masked_vgr(nb.bundle);
        for (const auto& [label, box] : boxes) {
            box.validate();
            const std::string what = nb.source_label + " " + label;
            PeakSummary s;
            s.source_label = nb.source_label;
            s.valid_time = nb.bundle.valid_time;
            s.region_label = label;
            s.V = box_peak(nb.bundle.V, box, what);
            s.Vg = box_peak(nb.bundle.Vg, box, what);
            s.Vgr = box_peak(vgr, box, what);
            rows.push_back(s);
        }
    }
    return rows;
}

void write_peak_csv(std::ostream& out, const std::vector<PeakSummary>& rows) {
    out << "source,valid_time,region,peak_V,V_lat,V_lon,peak_Vg,Vg_lat,Vg_lon,peak_Vgr,Vgr_lat,Vgr_lon\n";
    for (const auto& r : rows) {
        out << r.source_label << ',' << format_time(r.valid_time) << ',' << r.region_label << ','
            << peak_cells(r.V) << ',' << peak_cells(r.Vg) << ',' << peak_cells(r.Vgr) << '\n';
    }
}

Intercomparison intercomparison(const std::vector<Dataset>& sources, const track::Track& reference,
                                const std::vector<TimePoint>& times, const IntercomparisonOptions& opt,
                                const PhysicalConstants& pc) {
    if (times.empty()) throw Error("intercomparison needs at least one time");
    if (!(opt.search_radius_km > 0.0) || !(opt.wind_radius_km > 0.0)) throw Error("invalid intercomparison radii");
    const auto ref_at = [&](TimePoint t) -> const track::TrackPoint* {
        for (const auto& p : reference.points)
            if (p.time == t) return &p;
        return nullptr;
    };

    Intercomparison table;
    const Level sfc = Level::surface();
    for (const Dataset& ds : sources) {
        std::optional<LatLon> prev;
        bool any_ok = false;
        for (TimePoint t : times) {
            IntercomparisonRow row;
            row.source_label = ds.label();
            row.time = t;
            try {
                const track::TrackPoint* ref = ref_at(t);
                if (!ref) throw Error("reference track has no point at " + format_time(t));
                if (!prev) prev = LatLon{ref->lat, ref->lon};
                const Field& msl = ds.get("msl", sfc, t);
                const auto c = disk_extremum(msl, prev->lat, prev->lon, opt.search_radius_km * 1e3, Extremum::Min, pc);
                if (!c) throw Error("no msl minimum within search radius at " + format_time(t));
                prev = LatLon{c->lat, c->lon};
                const Field ws = track::surface_wind_speed(ds, t);
                const auto w = disk_extremum(ws, c->lat, c->lon, opt.wind_radius_km * 1e3, Extremum::Max, pc);
                if (!w) throw Error("no 10-m wind within wind radius at " + format_time(t));
                row.lat = c->lat;
                row.lon = c->lon;
                row.mslp_hpa = c->value / 100.0;
                row.max_ws10 = w->value;
                row.position_error_km =
                    great_circle_distance(ref->lat, ref->lon, c->lat, c->lon, pc.earth_radius) / 1e3;
                row.ok = true;
                any_ok = true;
            } catch (const Error& e) {
                row.error = e.what();
            }
            table.rows.push_back(row);
        }
        if (!any_ok) table.failed_sources.push_back(ds.label());
    }
    return table;
}

void write_intercomparison_csv(std::ostream& out, const Intercomparison& table) {
    out << "source,time,status,lat,lon,mslp_hPa,max_ws10,position_error_km,error\n";
    for (const auto& r : table.rows) {
        out << r.source_label << ',' << format_time(r.time) << ',';
        if (r.ok) {
            out << "ok," << num(r.lat) << ',' << num(r.lon) << ',' << num(r.mslp_hpa) << ',' << num(r.max_ws10)
                << ',' << num(r.position_error_km) << ",\n";
        } else {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), '"', '\'');
            out << "failed,,,,,,\"" << msg << "\"\n";
        }
    }
}

void write_intensity_csv(std::ostream& out, const std::vector<track::IntensityRow>& rows) {
    out << "time,mslp_hPa,max_ws10,max_ws10_lat,max_ws10_lon\n";
    for (const auto& r : rows) {
        out << format_time(r.time) << ',' << num(r.mslp_hpa) << ',' << num(r.max_ws10) << ','
            << num(r.max_ws10_lat) << ',' << num(r.max_ws10_lon) << '\n';
    }
}

// ---------------------------------------------------------------------------
// contours

json ContourExport::to_json() const {
    json lv = json::array();
    for (const auto& level : levels) {
        json lines = json::array();
        for (const auto& pl : level.lines) {
            json pts = json::array();
            for (const auto& p : pl.points) pts.push_back({p.lat, p.lon});
            lines.push_back({{"closed", pl.closed}, {"points", pts}});
        }
        lv.push_back({{"value", level.value}, {"polylines", lines}});
    }
    return {{"variable", variable}, {"convention", convention}, {"units", units}, {"levels", lv}};
}

std::vector<std::string> convention_keys() { return {"theta_w", "vorticity", "rh", "jet_250"}; }

std::vector<double> convention_levels(const std::string& key, const Field& f) {
    if (key == "theta_w") return {280.0, 282.5, 285.0, 287.5};
    if (key == "rh") return {80.0};
    if (key == "jet_250") return {65.0};
    if (key == "vorticity") {
        double vmax = -std::numeric_limits<double>::infinity();
        for (double v : f.values)
            if (!std::isnan(v)) vmax = std::max(vmax, v);
        std::vector<double> out{3e-4};
        for (int k = 1; k < 1000; ++k) {
            const double v = 3e-4 + k * 2e-4;
            if (v > vmax) break;
            out.push_back(v);
        }
        return out;
    }
    throw Error("unknown contour convention '" + key + "'");
}

namespace {

struct Segment {
    long long a, b;  // edge ids
};

}  // namespace

std::vector<Polyline> iso_lines(const Field& f, double level) {
    const GridSpec& g = f.grid;
    const int ncols = g.global_lon ? g.nlon : g.nlon - 1;
    // edge id: 2 * node index + (0 for the edge to the east, 1 for the edge to the south)
    const auto h_edge = [&](int i, int j) { return 2LL * static_cast<long long>(g.index(i, j)); };
    const auto v_edge = [&](int i, int j) { return 2LL * static_cast<long long>(g.index(i, j)) + 1; };

    const auto edge_point = [&](long long id) {
        const long long node = id / 2;
        const int i = static_cast<int>(node / g.nlon);
        const int j = static_cast<int>(node % g.nlon);
        const double a = f(i, j);
        if (id % 2 == 0) {
            const double b = f(i, (j + 1) % g.nlon);
            const double t = (level - a) / (b - a);
            return LatLon{g.lat(i), g.lon(j) + t * g.lon_step};
        }
        const double b = f(i + 1, j);
        const double t = (level - a) / (b - a);
        return LatLon{g.lat(i) + t * g.lat_step, g.lon(j)};
    };

    std::vector<Segment> segs;
    for (int i = 0; i + 1 < g.nlat; ++i) {
        for (int j = 0; j < ncols; ++j) {
            const int j1 = (j + 1) % g.nlon;
            const double va = f(i, j), vb = f(i, j1), vc = f(i + 1, j1), vd = f(i + 1, j);
            if (std::isnan(va) || std::isnan(vb) || std::isnan(vc) || std::isnan(vd)) continue;
            const bool a = va >= level, b = vb >= level, c = vc >= level, d = vd >= level;
            const long long e0 = h_edge(i, j), e1 = v_edge(i, j1), e2 = h_edge(i + 1, j), e3 = v_edge(i, j);
            std::vector<long long> cross;
            if (a != b) cross.push_back(e0);
            if (b != c) cross.push_back(e1);
            if (c != d) cross.push_back(e2);
            if (d != a) cross.push_back(e3);
            if (cross.size() == 2) {
                segs.push_back({cross[0], cross[1]});
            } else if (cross.size() == 4) {
                const bool centre = 0.25 * (va + vb + vc + vd) >= level;
                if (centre == a) {
                    segs.push_back({e0, e1});
                    segs.push_back({e2, e3});
                } else {
                    segs.push_back({e3, e0});
                    segs.push_back({e1, e2});
                }
            }
        }
    }

    std::unordered_map<long long, std::vector<std::size_t>> at_edge;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        at_edge[segs[s].a].push_back(s);
        at_edge[segs[s].b].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);
    const auto next_from = [&](long long edge) -> std::optional<std::size_t> {
        for (std::size_t s : at_edge[edge])
            if (!used[s]) return s;
        return std::nullopt;
    };

    std::vector<Polyline> out;
    for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
        if (used[s0]) continue;
        used[s0] = true;
        std::vector<long long> chain{segs[s0].a, segs[s0].b};
        bool closed = false;
        while (auto s = next_from(chain.back())) {
            used[*s] = true;
            const long long other = segs[*s].a == chain.back() ? segs[*s].b : segs[*s].a;
            if (other == chain.front()) {
                closed = true;
                chain.push_back(other);
                break;
            }
            chain.push_back(other);
        }
        if (!closed) {
            std::vector<long long> head;
            long long tip = chain.front();
            while (auto s = next_from(tip)) {
                used[*s] = true;
                tip = segs[*s].a == tip ? segs[*s].b : segs[*s].a;
                head.push_back(tip);
            }
            chain.insert(chain.begin(), head.rbegin(), head.rend());
        }
        Polyline pl;
        pl.closed = closed;
        for (long long e : chain) pl.points.push_back(edge_point(e));
        out.push_back(std::move(pl));
    }
    return out;
}

ContourExport contour_export(const Field& f, const std::string& convention) {
    if (f.values.empty() || f.grid.size() == 0) throw Error("contour export of an empty field");
    ContourExport ex;
    ex.variable = f.variable;
    ex.convention = convention;
    ex.units = f.units;
    for (double v : convention_levels(convention, f)) ex.levels.push_back({v, iso_lines(f, v)});
    return ex;
}

// ---------------------------------------------------------------------------
// config-driven report

namespace {

RegionBox box_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 4) throw Error(what + " must be [west, east, south, north]");
    RegionBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    b.validate();
    return b;
}

RelativeBox relbox_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 4) throw Error(what + " must be [dlon_west, dlon_east, dlat_south, dlat_north]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Field find_field(const Dataset& ds, const std::string& variable, Level level, TimePoint t,
                 const PhysicalConstants& pc) {
    if (ds.contains(variable, level, t)) return ds.get(variable, level, t);
    for (Field& f : derive::derive_available(ds, level, t, pc))
        if (f.variable == variable) return std::move(f);
    throw Error("field " + variable + " at " + level.label() + " " + format_time(t) + " not available in " +
                ds.label());
}

Level level_from_json(const json& j) {
    if (j.is_string() && j.get<std::string>() == "sfc") return Level::surface();
    return Level::pressure(j.get<double>());
}

void write_text(const fs::path& file, const std::string& text, ReportOutcome& outcome) {
    std::ofstream out(file);
    if (!out) throw Error("cannot write " + file.string());
    out << text;
    outcome.written.push_back(file.filename().string());
}

}  // namespace

ReportOutcome run_report(const json& config, const fs::path& out_dir, const fs::path& base_dir) {
    try {
        ReportOutcome outcome;
        json summary = {{"errors", json::object()}};
        fs::create_directories(out_dir);
        const PhysicalConstants pc;

        // datasets, in config order
        const json& dsj = config.at("datasets");
        if (!dsj.is_object() || dsj.empty()) throw Error("config 'datasets' must be a non-empty object");
        std::vector<Dataset> sources;
        for (const auto& [label, path] : dsj.items()) {
            fs::path p = path.get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            try {
                Dataset ds = load_dataset(p);
                ds.set_label(label);
                sources.push_back(std::move(ds));
            } catch (const Error& e) {
                summary["errors"][label] = e.what();
                outcome.failed_sources.push_back(label);
            }
        }
        const auto source = [&](const std::string& label) -> const Dataset* {
            for (const auto& ds : sources)
                if (ds.label() == label) return &ds;
            return nullptr;
        };

        // reference track
        const std::string ref_label = config.at("reference").get<std::string>();
        const Dataset* ref = source(ref_label);
        if (!ref) throw Error("reference dataset '" + ref_label + "' is unavailable");
        track::TrackOptions topt;
        topt.search_radius_km = config.value("search_radius_km", topt.search_radius_km);
        topt.speed_gate_m_s = config.value("speed_gate_m_s", topt.speed_gate_m_s);
        track::Track ref_track =
            track::track_cyclone(*ref, box_from_json(config.at("first_guess"), "first_guess"),
                                 parse_time(config.at("t0").get<std::string>()),
                                 parse_time(config.at("t1").get<std::string>()), topt, pc);
        try {
            ref_track.intensification = track::intensification(ref_track, config.value("window_h", 24.0));
        } catch (const Error& e) {
            summary["intensification_error"] = e.what();
        }
        track::write_track(out_dir / "reference_track.json", ref_track);
        outcome.written.push_back("reference_track.json");
        summary["reference_track"] = track::to_json(ref_track);

        // intercomparison
        std::vector<TimePoint> times;
        if (config.contains("times")) {
            for (const auto& t : config["times"]) times.push_back(parse_time(t.get<std::string>()));
        } else {
            for (const auto& p : ref_track.points) times.push_back(p.time);
        }
        IntercomparisonOptions iopt;
        iopt.search_radius_km = topt.search_radius_km;
        iopt.wind_radius_km = config.value("wind_radius_km", iopt.wind_radius_km);
        const Intercomparison table = intercomparison(sources, ref_track, times, iopt, pc);
        {
            std::ostringstream s;
            write_intercomparison_csv(s, table);
            write_text(out_dir / "intercomparison.csv", s.str(), outcome);
        }
        for (const auto& f : table.failed_sources) outcome.failed_sources.push_back(f);

        // intensity series along the reference track, per source
        for (const auto& ds : sources) {
            try {
                std::ostringstream s;
                write_intensity_csv(s, track::intensity_timeseries(ds, ref_track, iopt.wind_radius_km, pc));
                write_text(out_dir / ("intensity_" + ds.label() + ".csv"), s.str(), outcome);
            } catch (const Error& e) {
                summary["errors"]["intensity_" + ds.label()] = e.what();
            }
        }

        // conveyor-belt peaks
        if (config.contains("balance")) {
            const json& bj = config["balance"];
            const TimePoint t = parse_time(bj.at("time").get<std::string>());
            const double level = bj.at("level").get<double>();
            CycloneVelocity c;
            if (bj.contains("cyclone_velocity")) {
                c = {bj["cyclone_velocity"].at(0).get<double>(), bj["cyclone_velocity"].at(1).get<double>()};
            }
            balance::BalanceOptions bopt;
            bopt.lmax = bj.value("truncation", bopt.lmax);
            const track::TrackPoint* centre = nullptr;
            for (const auto& p : ref_track.points)
                if (p.time == t) centre = &p;
            if (!centre) throw Error("reference track has no point at balance time " + format_time(t));
            std::vector<std::pair<std::string, RegionBox>> boxes;
            RelativeBox ccb = default_ccb_box(), wcb = default_wcb_box();
            if (bj.contains("boxes")) {
                if (bj["boxes"].contains("CCB")) ccb = relbox_from_json(bj["boxes"]["CCB"], "boxes.CCB");
                if (bj["boxes"].contains("WCB")) wcb = relbox_from_json(bj["boxes"]["WCB"], "boxes.WCB");
            }
            boxes.emplace_back("CCB", ccb.at(centre->lat, centre->lon));
            boxes.emplace_back("WCB", wcb.at(centre->lat, centre->lon));

            std::vector<NamedBundle> bundles;
            for (const auto& ds : sources) {
                try {
                    bundles.push_back({ds.label(), balance::balance_bundle(ds, t, level, c, true, bopt, pc)});
                } catch (const Error& e) {
                    summary["errors"]["balance_" + ds.label()] = e.what();
                }
            }
            if (!bundles.empty()) {
                std::ostringstream s;
                write_peak_csv(s, peak_table(bundles, boxes));
                write_text(out_dir / "peaks.csv", s.str(), outcome);
                json bx = json::object();
                for (const auto& [label, b] : boxes) bx[label] = {b.lon_west, b.lon_east, b.lat_south, b.lat_north};
                summary["balance_boxes"] = bx;
                summary["balance_provenance"] = bundles.front().bundle.provenance();
            }
        }

        // contour exports
        if (config.contains("contours")) {
            for (const auto& cj : config["contours"]) {
                const std::string src = cj.at("source").get<std::string>();
                const std::string var = cj.at("variable").get<std::string>();
                const std::string conv = cj.at("convention").get<std::string>();
                convention_levels(conv, Field{});  // reject unknown keys before touching data
                const Level level = level_from_json(cj.at("level"));
                const TimePoint t = parse_time(cj.at("time").get<std::string>());
                const std::string name =
                    "contours_" + src + "_" + var + "_" + level.label() + "_" + compact_time(t) + ".json";
                try {
                    const Dataset* ds = source(src);
                    if (!ds) throw Error("dataset '" + src + "' is unavailable");
                    const Field f = find_field(*ds, var, level, t, pc);
                    write_text(out_dir / name, contour_export(f, conv).to_json().dump() + "\n", outcome);
                } catch (const Error& e) {
                    summary["errors"][name] = e.what();
                }
            }
        }

        std::sort(outcome.failed_sources.begin(), outcome.failed_sources.end());
        outcome.failed_sources.erase(std::unique(outcome.failed_sources.begin(), outcome.failed_sources.end()),
                                     outcome.failed_sources.end());
        summary["failed_sources"] = outcome.failed_sources;
        summary["written"] = outcome.written;
        {
            std::ofstream out(out_dir / "report_summary.json");
            if (!out) throw Error("cannot write report_summary.json");
            out << summary.dump(2) << "\n";
        }
        outcome.summary = std::move(summary);
        return outcome;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed report config: ") + e.what());
    }
}

}  // namespace stormdiag::report

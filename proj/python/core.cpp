#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stormdiag/balance.hpp"
#include "stormdiag/dataset.hpp"
#include "stormdiag/error.hpp"
#include "stormdiag/geo.hpp"
#include "stormdiag/report.hpp"
#include "stormdiag/spectral.hpp"
#include "stormdiag/synth.hpp"
#include "stormdiag/track.hpp"

namespace py = pybind11;
using namespace stormdiag;
namespace fs = std::filesystem;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array field_values(const Field& f) {
    Array a({f.grid.nlat, f.grid.nlon});
    std::copy(f.values.begin(), f.values.end(), a.mutable_data());
    return a;
}

Field field_from_array(const Array& values, const GridSpec& grid, const std::string& variable,
                       const std::string& units) {
    grid.validate();
    if (values.ndim() != 2 || values.shape(0) != grid.nlat || values.shape(1) != grid.nlon) {
        throw Error("array shape does not match the grid");
    }
    Field f;
    f.grid = grid;
    f.variable = variable;
    f.units = units;
    f.values.assign(values.data(), values.data() + values.size());
    return f;
}

Level level_from(const py::object& level) {
    if (py::isinstance<py::str>(level)) {
        if (level.cast<std::string>() != "sfc") throw Error("level must be a number or 'sfc'");
        return Level::surface();
    }
    return Level::pressure(level.cast<double>());
}

nlohmann::json parse(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "stormdiag C++ core";
    py::register_exception<Error>(m, "StormdiagError", PyExc_ValueError);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_static("global_grid", &GridSpec::global, py::arg("step"), py::arg("with_poles") = false)
        .def_static("regional", &GridSpec::regional, py::arg("lat_north"), py::arg("lat_south"),
                    py::arg("lon_west"), py::arg("lon_east"), py::arg("step"))
        .def_readwrite("nlat", &GridSpec::nlat)
        .def_readwrite("nlon", &GridSpec::nlon)
        .def_readwrite("lat_start", &GridSpec::lat_start)
        .def_readwrite("lat_step", &GridSpec::lat_step)
        .def_readwrite("lon_start", &GridSpec::lon_start)
        .def_readwrite("lon_step", &GridSpec::lon_step)
        .def_readwrite("includes_poles", &GridSpec::includes_poles)
        .def_readwrite("global_lon", &GridSpec::global_lon)
        .def("is_global", &GridSpec::is_global)
        .def("lats", [](const GridSpec& g) {
            std::vector<double> v;
            for (int i = 0; i < g.nlat; ++i) v.push_back(g.lat(i));
            return v;
        })
        .def("lons", [](const GridSpec& g) {
            std::vector<double> v;
            for (int j = 0; j < g.nlon; ++j) v.push_back(g.lon(j));
            return v;
        })
        .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; });

    py::class_<Field>(m, "Field")
        .def_readonly("grid", &Field::grid)
        .def_readonly("variable", &Field::variable)
        .def_readonly("units", &Field::units)
        .def_property_readonly("level", [](const Field& f) { return f.level.label(); })
        .def_property_readonly("valid_time", [](const Field& f) { return format_time(f.valid_time); })
        .def_property_readonly("values", &field_values);

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("label", &Dataset::label)
        .def("__len__", &Dataset::size)
        .def("keys", [](const Dataset& ds) {
            std::vector<std::tuple<std::string, std::string, std::string>> out;
            for (const auto& [k, f] : ds.fields()) out.emplace_back(k.variable, k.level.label(), format_time(k.valid_time));
            return out;
        })
        .def("times", [](const Dataset& ds, const std::string& var, const py::object& level) {
            std::vector<std::string> out;
            for (TimePoint t : ds.times(var, level_from(level))) out.push_back(format_time(t));
            return out;
        }, py::arg("variable"), py::arg("level"))
        .def("get", [](const Dataset& ds, const std::string& var, const py::object& level, const std::string& t) {
            return ds.get(var, level_from(level), parse_time(t));
        }, py::arg("variable"), py::arg("level"), py::arg("time"));

    m.def("load_dataset", &load_dataset, py::arg("path"));

    m.def("synth", [](const std::string& name, const std::string& params, const fs::path& out) {
        const auto j = parse(params);
        const PhysicalConstants pc;
        const auto fields = synth::synth_case(name, j, pc);
        write_fields(out, fields, pc, j.value("source_label", "synthetic-" + name), false);
        return fields.size();
    }, py::arg("case"), py::arg("params_json"), py::arg("out"));

    m.def("track", [](const fs::path& dataset, std::array<double, 4> fg, const std::string& t0, const std::string& t1,
                      double search_radius_km, double window_h) {
        const Dataset ds = load_dataset(dataset);
        track::TrackOptions opt;
        opt.search_radius_km = search_radius_km;
        track::Track t =
            track::track_cyclone(ds, RegionBox{fg[0], fg[1], fg[2], fg[3]}, parse_time(t0), parse_time(t1), opt);
        try {
            t.intensification = track::intensification(t, window_h);
        } catch (const Error&) {
        }
        return track::to_json(t).dump();
    }, py::arg("dataset"), py::arg("first_guess"), py::arg("t0"), py::arg("t1"), py::arg("search_radius_km") = 900.0,
       py::arg("window_h") = 24.0);

    m.def("bergerons", &track::bergerons, py::arg("deepening_hpa"), py::arg("window_h"), py::arg("lat_deg"));

    m.def("balance", [](const fs::path& dataset, const std::string& time, double level, std::array<double, 2> c,
                        int truncation, bool smoothed, const std::optional<fs::path>& out) {
        const Dataset ds = load_dataset(dataset);
        balance::BalanceOptions opt;
        opt.lmax = truncation;
        const auto b = balance::balance_bundle(ds, parse_time(time), level, CycloneVelocity{c[0], c[1]}, smoothed, opt);
        if (out) balance::write_bundle(*out, b, ds.label());
        py::dict fields;
        for (const Field& f : b.fields()) fields[py::str(f.variable)] = field_values(f);
        return py::make_tuple(fields, b.provenance().dump());
    }, py::arg("dataset"), py::arg("time"), py::arg("level") = 850.0, py::arg("cyclone_velocity") = std::array{0.0, 0.0},
       py::arg("truncation") = 106, py::arg("smoothed") = true, py::arg("out") = py::none());

    m.def("solve_gradient_wind", [](double f, double k, double vg) -> py::object {
        const auto r = balance::solve_gradient_wind(f, k, vg);
        if (!r.defined) return py::none();
        return py::float_(r.value);
    }, py::arg("f"), py::arg("k"), py::arg("vg"));

    m.def("truncate", [](const Array& values, const GridSpec& grid, int lmax) {
        return field_values(spectral::truncate(field_from_array(values, grid, "z", "m2 s-2"), lmax));
    }, py::arg("values"), py::arg("grid"), py::arg("lmax") = 106);

    m.def("contour_export", [](const Array& values, const GridSpec& grid, const std::string& convention,
                               const std::string& variable, const std::string& units) {
        return report::contour_export(field_from_array(values, grid, variable, units), convention).to_json().dump();
    }, py::arg("values"), py::arg("grid"), py::arg("convention"), py::arg("variable") = "", py::arg("units") = "");

    m.def("run_report", [](const std::string& config, const fs::path& out, const fs::path& base_dir) {
        const auto outcome = report::run_report(parse(config), out, base_dir);
        return py::make_tuple(outcome.failed_sources, outcome.summary.dump());
    }, py::arg("config_json"), py::arg("out"), py::arg("base_dir") = fs::path{});

    m.def("great_circle_km", [](double lat1, double lon1, double lat2, double lon2) {
        return great_circle_distance(lat1, lon1, lat2, lon2, PhysicalConstants{}.earth_radius) / 1e3;
    });
}

#include "stormdiag/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>

#include <json.hpp>

#include "stormdiag/error.hpp"

namespace stormdiag {

namespace fs = std::filesystem;
using json = nlohmann::json;

void Dataset::add(Field field) {
    auto key = field.key();
    if (fields_.contains(key)) throw Error("duplicate field " + key.describe());
    fields_.emplace(std::move(key), std::move(field));
}

const Field& Dataset::get(const FieldKey& key) const {
    auto it = fields_.find(key);
    if (it == fields_.end()) {
        throw Error("field " + key.describe() + " not present in dataset '" + label_ + "'");
    }
    return it->second;
}

std::vector<TimePoint> Dataset::times(const std::string& variable, Level level) const {
    std::vector<TimePoint> out;
    for (const auto& [key, field] : fields_) {
        if (key.variable == variable && key.level == level) out.push_back(key.valid_time);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// payloads

namespace {

std::uint32_t to_little(std::uint32_t bits) {
    if constexpr (std::endian::native == std::endian::big) {
        return ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) |
               (bits >> 24);
    }
    return bits;
}

}  // namespace

void write_payload(const fs::path& file, const std::vector<double>& values) {
    std::vector<std::uint32_t> raw(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const float v = static_cast<float>(values[k]);
        raw[k] = to_little(std::bit_cast<std::uint32_t>(v));
    }
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + file.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));
    if (!out) throw Error("write failed for '" + file.string() + "'");
}

std::vector<double> read_payload(const fs::path& file, std::size_t count) {
    std::error_code ec;
    const auto bytes = fs::file_size(file, ec);
    if (ec) throw Error("missing field file '" + file.string() + "'");
    if (bytes != count * sizeof(float)) {
        throw Error("field file '" + file.string() + "' has " + std::to_string(bytes) +
                    " bytes, expected " + std::to_string(count * sizeof(float)));
    }
    std::vector<std::uint32_t> raw(count);
    std::ifstream in(file, std::ios::binary);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw Error("read failed for '" + file.string() + "'");
    std::vector<double> values(count);
    for (std::size_t k = 0; k < count; ++k) {
        values[k] = static_cast<double>(std::bit_cast<float>(to_little(raw[k])));
    }
    return values;
}

std::string payload_file_name(const FieldKey& key) {
    return key.variable + "_" + key.level.label() + "_" + compact_time(key.valid_time) + ".f32";
}

// ---------------------------------------------------------------------------
// manifest

namespace {

json grid_to_json(const GridSpec& g) {
    return {{"nlat", g.nlat},
            {"nlon", g.nlon},
            {"lat_start", g.lat_start},
            {"lat_step", g.lat_step},
            {"lon_start", g.lon_start},
            {"lon_step", g.lon_step},
            {"includes_poles", g.includes_poles},
            {"global_lon", g.global_lon}};
}

GridSpec grid_from_json(const json& j) {
    GridSpec g;
    g.nlat = j.at("nlat").get<int>();
    g.nlon = j.at("nlon").get<int>();
    g.lat_start = j.at("lat_start").get<double>();
    g.lat_step = j.at("lat_step").get<double>();
    g.lon_start = j.at("lon_start").get<double>();
    g.lon_step = j.at("lon_step").get<double>();
    g.includes_poles = j.at("includes_poles").get<bool>();
    g.global_lon = j.at("global_lon").get<bool>();
    g.validate();
    return g;
}

json level_to_json(const Level& level) {
    if (level.is_surface()) return "sfc";
    return level.hpa();
}

Level level_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "sfc") return Level::surface();
        throw Error("level_hPa must be a number or \"sfc\"");
    }
    const double hpa = j.get<double>();
    if (!(hpa > 0.0)) throw Error("level_hPa must be positive");
    return Level::pressure(hpa);
}

json entry_to_json(const Field& f, const std::string& file) {
    return {{"variable", f.variable},     {"level_hPa", level_to_json(f.level)},
            {"valid_time", format_time(f.valid_time)}, {"file", file},
            {"units", f.units},           {"grid", grid_to_json(f.grid)}};
}

const json& manifest_entries(const json& manifest) {
    if (manifest.is_array()) return manifest;
    if (manifest.is_object() && manifest.contains("entries") && manifest["entries"].is_array()) {
        return manifest["entries"];
    }
    throw Error("manifest must be an array or an object with an 'entries' array");
}

json read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing manifest '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error("malformed manifest '" + path.string() + "': " + e.what());
    }
}

void check_values(const Field& f, const std::string& where) {
    for (double v : f.values) {
        if (std::isinf(v)) throw Error("non-finite value in " + where);
    }
}

}  // namespace

Dataset load_dataset(const fs::path& manifest_or_dir) {
    fs::path manifest_path = manifest_or_dir;
    if (fs::is_directory(manifest_path)) manifest_path /= "manifest.json";
    const fs::path root = manifest_path.parent_path();
    const json manifest = read_manifest(manifest_path);

    Dataset ds;
    if (manifest.is_object() && manifest.contains("source_label")) {
        ds.set_label(manifest["source_label"].get<std::string>());
    } else {
        ds.set_label(root.filename().string());
    }

    std::size_t index = 0;
    for (const json& entry : manifest_entries(manifest)) {
        const std::string where = "manifest entry " + std::to_string(index++);
        Field f;
        std::string file;
        try {
            f.variable = entry.at("variable").get<std::string>();
            f.level = level_from_json(entry.at("level_hPa"));
            f.valid_time = parse_time(entry.at("valid_time").get<std::string>());
            f.units = entry.at("units").get<std::string>();
            f.grid = grid_from_json(entry.at("grid"));
            file = entry.at("file").get<std::string>();
        } catch (const json::exception& e) {
            throw Error("malformed " + where + ": " + e.what());
        } catch (const Error& e) {
            throw Error("malformed " + where + ": " + e.what());
        }
        const std::string key = f.key().describe();
        const auto expected_units = canonical_units(f.variable);
        if (!expected_units) throw Error("unknown variable in field " + key);
        if (*expected_units != f.units) {
            throw Error("field " + key + " has units '" + f.units + "', expected '" +
                        std::string(*expected_units) + "'");
        }
        if (ds.contains(f.key())) throw Error("duplicate field " + key);
        try {
            f.values = read_payload(root / file, f.grid.size());
        } catch (const Error& e) {
            throw Error("field " + key + ": " + e.what());
        }
        check_values(f, "field " + key);
        ds.add(std::move(f));
    }
    return ds;
}

void write_fields(const fs::path& dir, const std::vector<Field>& fields,
                  const PhysicalConstants& constants, const std::string& source_label, bool merge) {
    fs::create_directories(dir);
    const fs::path manifest_path = dir / "manifest.json";

    json entries = json::array();
    std::string label = source_label;
    if (merge && fs::exists(manifest_path)) {
        const json existing = read_manifest(manifest_path);
        std::set<std::string> replaced;
        for (const auto& f : fields) replaced.insert(payload_file_name(f.key()));
        for (const json& e : manifest_entries(existing)) {
            if (!replaced.contains(e.at("file").get<std::string>())) entries.push_back(e);
        }
        if (label.empty() && existing.is_object() && existing.contains("source_label")) {
            label = existing["source_label"].get<std::string>();
        }
    }

    std::set<FieldKey> seen;
    for (const auto& f : fields) {
        if (f.values.size() != f.grid.size()) {
            throw Error("field " + f.key().describe() + " has wrong value count");
        }
        if (!seen.insert(f.key()).second) throw Error("duplicate field " + f.key().describe());
        const std::string file = payload_file_name(f.key());
        write_payload(dir / file, f.values);
        entries.push_back(entry_to_json(f, file));
    }

    json manifest = {{"format", "fgrid"},
                     {"version", 1},
                     {"source_label", label.empty() ? dir.filename().string() : label},
                     {"constants",
                      {{"earth_radius_m", constants.earth_radius},
                       {"omega_s-1", constants.omega},
                       {"gravity_m_s-2", constants.gravity}}},
                     {"entries", entries}};
    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) throw Error("cannot write '" + manifest_path.string() + "'");
    out << manifest.dump(2) << "\n";
}

void write_dataset(const fs::path& dir, const Dataset& dataset, const PhysicalConstants& constants) {
    std::vector<Field> fields;
    fields.reserve(dataset.size());
    for (const auto& [key, field] : dataset.fields()) fields.push_back(field);
    write_fields(dir, fields, constants, dataset.label(), false);
}

}  // namespace stormdiag

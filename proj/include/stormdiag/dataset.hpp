#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stormdiag/constants.hpp"
#include "stormdiag/grid.hpp"

namespace stormdiag {

/// Manifest-indexed collection of fields from one model or analysis source.
/// Payloads are loaded eagerly; fields are immutable once inserted.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::string label) : label_(std::move(label)) {}

    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    /// Throws on duplicate key.
    void add(Field field);

    bool contains(const FieldKey& key) const { return fields_.contains(key); }
    bool contains(const std::string& variable, Level level, TimePoint t) const {
        return contains(FieldKey{variable, level, t});
    }

    /// Throws stormdiag::Error naming the key when absent.
    const Field& get(const FieldKey& key) const;
    const Field& get(const std::string& variable, Level level, TimePoint t) const {
        return get(FieldKey{variable, level, t});
    }

    /// Sorted distinct valid times present for (variable, level).
    std::vector<TimePoint> times(const std::string& variable, Level level) const;

    std::size_t size() const { return fields_.size(); }
    const std::map<FieldKey, Field>& fields() const { return fields_; }

private:
    std::string label_;
    std::map<FieldKey, Field> fields_;
};

/// Loads a dataset from a directory holding manifest.json, or from the
/// manifest path itself. Validates byte lengths, units and duplicate keys.
Dataset load_dataset(const std::filesystem::path& manifest_or_dir);

/// Writes `fields` as raw little-endian binary32 files plus manifest.json in
/// `dir`. When `merge` is set, entries already in an existing manifest are
/// kept unless replaced by a field with the same key.
void write_fields(const std::filesystem::path& dir, const std::vector<Field>& fields,
                  const PhysicalConstants& constants, const std::string& source_label = {},
                  bool merge = true);

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                   const PhysicalConstants& constants);

/// Raw payload I/O. Values are cast to binary32 on write; reads widen to
/// double, so write(read(bytes)) reproduces the bytes exactly.
void write_payload(const std::filesystem::path& file, const std::vector<double>& values);
std::vector<double> read_payload(const std::filesystem::path& file, std::size_t count);

/// File name used for a field inside an fgrid directory.
std::string payload_file_name(const FieldKey& key);

}  // namespace stormdiag

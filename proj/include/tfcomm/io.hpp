#pragma once

// CSV and JSON interchange formats.
//
//   window        index,re,im
//   profile       m,l,intensity          (nonzero cells, centered indices)
//   grid          <row>,<col>,re,im      (all cells)
//   preset        {"kind": ..., "n_dim": ..., kind-specific keys}
//
// CSV is UTF-8 with a header row; fields are quoted per RFC 4180 when they
// contain a comma, quote, or line break. Reals are written with 17
// significant digits so files round-trip exactly.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tfcomm/channel_models.hpp"
#include "tfcomm/types.hpp"

namespace tfcomm::io {

std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& row(const std::vector<std::string>& fields);
    CsvWriter& row(const std::vector<double>& values);

    const std::string& str() const noexcept { return text_; }
    void save(const std::filesystem::path& path) const;

private:
    std::size_t columns_;
    std::string text_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

std::string pulse_csv(const Pulse& p);
Pulse pulse_from_csv(const CsvTable& table);

std::string profile_csv(const ScatteringProfile& profile);
ScatteringProfile profile_from_csv(const CsvTable& table, std::size_t n);

std::string grid_csv(const CMatrix& grid, const std::string& row_name, const std::string& col_name);
CMatrix grid_from_csv(const CsvTable& table);

nlohmann::json preset_to_json(PresetKind kind, const PresetParams& params);
/// Unknown keys raise InvalidInput.
std::pair<PresetKind, PresetParams> preset_from_json(const nlohmann::json& j);

}  // namespace tfcomm::io

#include "tfcomm/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tfcomm::io {

namespace {

std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw InvalidInput("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw InvalidInput("not a number: '" + s + "'");
    return v;
}

std::int64_t to_int(const std::string& s) {
    const double v = to_double(s);
    if (v != static_cast<double>(static_cast<std::int64_t>(v))) throw InvalidInput("not an integer: '" + s + "'");
    return static_cast<std::int64_t>(v);
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw InvalidInput("unknown key '" + key + "' in " + where);
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    if (header.empty()) throw InvalidInput("CSV header must not be empty");
    row(header);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw InvalidInput("CSV row has the wrong number of fields");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) text_ += ',';
        text_ += quote(fields[i]);
    }
    text_ += "\r\n";
    return *this;
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> fields;
    fields.reserve(values.size());
    for (const double v : values) fields.push_back(format_double(v));
    return row(fields);
}

void CsvWriter::save(const std::filesystem::path& path) const { write_text(path, text_); }

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw InvalidInput("CSV column '" + name + "' not found");
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"': in_quotes = true; field_started = true; break;
        case ',':
            record.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r': break;
        case '\n':
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            field_started = false;
            break;
        default: field += c; field_started = true;
        }
    }
    if (in_quotes) throw InvalidInput("unterminated quoted CSV field");
    if (field_started || !field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (records.empty()) throw InvalidInput("CSV has no header row");
    CsvTable table;
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size())
            throw InvalidInput("CSV row " + std::to_string(r) + " has the wrong number of fields");
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
    out << text;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

std::string pulse_csv(const Pulse& p) {
    CsvWriter w({"index", "re", "im"});
    for (Eigen::Index i = 0; i < p.samples().size(); ++i)
        w.row(std::vector<double>{static_cast<double>(i), p.samples()(i).real(), p.samples()(i).imag()});
    return w.str();
}

Pulse pulse_from_csv(const CsvTable& t) {
    const auto ci = t.column("index"), cr = t.column("re"), cm = t.column("im");
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    CVector samples = CVector::Zero(n);
    std::vector<bool> seen(t.rows.size(), false);
    for (const auto& r : t.rows) {
        const auto i = to_int(r[ci]);
        if (i < 0 || i >= n || seen[static_cast<std::size_t>(i)]) throw InvalidInput("window indices must be a permutation of 0..N-1");
        seen[static_cast<std::size_t>(i)] = true;
        samples(i) = Complex(to_double(r[cr]), to_double(r[cm]));
    }
    return Pulse(std::move(samples));
}

std::string profile_csv(const ScatteringProfile& profile) {
    CsvWriter w({"m", "l", "intensity"});
    const auto n = profile.dim();
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t l = 0; l < n; ++l) {
            const double v = profile.intensities()(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l));
            if (v > 0.0)
                w.row(std::vector<double>{static_cast<double>(centered_index(static_cast<std::int64_t>(m), n)),
                                          static_cast<double>(centered_index(static_cast<std::int64_t>(l), n)), v});
        }
    return w.str();
}

ScatteringProfile profile_from_csv(const CsvTable& t, std::size_t n) {
    if (n == 0) throw InvalidDimension("dimension must be positive");
    const auto cm = t.column("m"), cl = t.column("l"), cv = t.column("intensity");
    const auto nn = static_cast<Eigen::Index>(n);
    RMatrix c = RMatrix::Zero(nn, nn);
    for (const auto& r : t.rows)
        c(static_cast<Eigen::Index>(wrap_index(to_int(r[cm]), n)), static_cast<Eigen::Index>(wrap_index(to_int(r[cl]), n))) +=
            to_double(r[cv]);
    return ScatteringProfile(std::move(c));
}

std::string grid_csv(const CMatrix& grid, const std::string& row_name, const std::string& col_name) {
    CsvWriter w({row_name, col_name, "re", "im"});
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
        for (Eigen::Index j = 0; j < grid.cols(); ++j)
            w.row(std::vector<double>{static_cast<double>(i), static_cast<double>(j), grid(i, j).real(), grid(i, j).imag()});
    return w.str();
}

CMatrix grid_from_csv(const CsvTable& t) {
    if (t.header.size() != 4) throw InvalidInput("grid CSV needs four columns");
    const auto cr = t.column("re"), ci = t.column("im");
    std::int64_t rows = 0, cols = 0;
    for (const auto& r : t.rows) {
        rows = std::max(rows, to_int(r[0]) + 1);
        cols = std::max(cols, to_int(r[1]) + 1);
    }
    CMatrix g = CMatrix::Zero(rows, cols);
    for (const auto& r : t.rows) {
        const auto i = to_int(r[0]), j = to_int(r[1]);
        if (i < 0 || j < 0) throw InvalidInput("grid indices must be nonnegative");
        g(i, j) = Complex(to_double(r[cr]), to_double(r[ci]));
    }
    return g;
}

nlohmann::json preset_to_json(PresetKind kind, const PresetParams& p) {
    nlohmann::json j{{"kind", to_string(kind)}, {"n_dim", p.n_dim}, {"normalize", p.normalize}};
    switch (kind) {
    case PresetKind::flat_rect:
        j["delay_min"] = p.delay_min;
        j["delay_max"] = p.delay_max;
        j["doppler_min"] = p.doppler_min;
        j["doppler_max"] = p.doppler_max;
        break;
    case PresetKind::exponential_jakes:
        j["delay_decay"] = p.delay_decay;
        j["delay_extent"] = p.delay_extent;
        j["max_doppler"] = p.max_doppler;
        break;
    case PresetKind::drm_like:
        j["echo_delays"] = p.echo_delays;
        j["echo_powers"] = p.echo_powers;
        j["echo_doppler_shifts"] = p.echo_doppler_shifts;
        j["doppler_spread"] = p.doppler_spread;
        break;
    }
    return j;
}

std::pair<PresetKind, PresetParams> preset_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidInput("preset descriptor must be an object");
    if (!j.contains("kind")) throw InvalidInput("preset descriptor needs 'kind'");
    const auto kind = parse_preset_kind(get_or<std::string>(j, "kind", ""));
    static const std::map<PresetKind, std::set<std::string>> keys{
        {PresetKind::flat_rect, {"delay_min", "delay_max", "doppler_min", "doppler_max"}},
        {PresetKind::exponential_jakes, {"delay_decay", "delay_extent", "max_doppler"}},
        {PresetKind::drm_like, {"echo_delays", "echo_powers", "echo_doppler_shifts", "doppler_spread"}},
    };
    auto allowed = keys.at(kind);
    allowed.insert({"kind", "n_dim", "normalize"});
    reject_unknown(j, allowed, "preset '" + to_string(kind) + "'");

    PresetParams p;
    p.n_dim = get_or<std::size_t>(j, "n_dim", p.n_dim);
    p.normalize = get_or<bool>(j, "normalize", p.normalize);
    p.delay_min = get_or<std::int64_t>(j, "delay_min", p.delay_min);
    p.delay_max = get_or<std::int64_t>(j, "delay_max", p.delay_max);
    p.doppler_min = get_or<std::int64_t>(j, "doppler_min", p.doppler_min);
    p.doppler_max = get_or<std::int64_t>(j, "doppler_max", p.doppler_max);
    p.delay_decay = get_or<double>(j, "delay_decay", p.delay_decay);
    p.delay_extent = get_or<std::int64_t>(j, "delay_extent", p.delay_extent);
    p.max_doppler = get_or<double>(j, "max_doppler", p.max_doppler);
    p.echo_delays = get_or<std::vector<std::int64_t>>(j, "echo_delays", p.echo_delays);
    p.echo_powers = get_or<std::vector<double>>(j, "echo_powers", p.echo_powers);
    p.echo_doppler_shifts = get_or<std::vector<double>>(j, "echo_doppler_shifts", p.echo_doppler_shifts);
    p.doppler_spread = get_or<double>(j, "doppler_spread", p.doppler_spread);
    return {kind, p};
}

}  // namespace tfcomm::io

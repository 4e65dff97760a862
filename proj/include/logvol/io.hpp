#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "logvol/error.hpp"

namespace logvol {

inline constexpr const char* kLibraryVersion = "1.0.0";

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

using Cell = std::variant<double, std::int64_t, std::string, bool>;

inline std::string cell_text(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return format_number(*d);
    if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (auto b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return std::get<std::string>(c);
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return format_number(*d);
    }
    if (auto i = std::get_if<std::int64_t>(&c)) return *i;
    if (auto b = std::get_if<bool>(&c)) return *b;
    return std::get<std::string>(c);
}

// RFC 4180 quoting.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// Experiment output: a header block of key/value lines, then columns and rows.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void note(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw domain_error("Table: row width does not match header");
        rows.push_back(std::move(row));
    }
};

inline std::string to_csv(const Table& t) {
    std::ostringstream os;
    for (const auto& [k, v] : t.meta) {
        std::string flat = v;
        for (auto& ch : flat)
            if (ch == '\n' || ch == '\r') ch = ' ';
        os << "# " << k << ": " << flat << "\n";
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(row[i]));
        os << "\n";
    }
    return os.str();
}

inline nlohmann::ordered_json to_json_value(const Table& t) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) meta[k] = v;
    j["meta"] = meta;
    j["columns"] = t.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        rows.push_back(r);
    }
    j["rows"] = rows;
    return j;
}

inline std::string to_json(const Table& t) { return to_json_value(t).dump(2) + "\n"; }

inline std::string render(const Table& t, const std::string& format) {
    if (format == "csv") return to_csv(t);
    if (format == "json") return to_json(t);
    throw config_error("unknown output format '" + format + "' (expected csv or json)");
}

inline void write_file(const std::string& path, const std::string& payload) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open output file '" + path + "'");
    f << payload;
}

// Numeric column `name` of a CSV file, skipping '#' header-block lines.
inline std::vector<double> read_csv_column(const std::string& path, const std::string& name) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open input file '" + path + "'");
    std::string line;
    int col = -1;
    std::vector<double> out;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) fields.push_back(cell);
        if (col < 0) {
            for (std::size_t i = 0; i < fields.size(); ++i)
                if (fields[i] == name) col = static_cast<int>(i);
            if (col < 0) throw config_error("column '" + name + "' not found in '" + path + "'");
            continue;
        }
        if (col >= static_cast<int>(fields.size())) throw config_error("short row in '" + path + "'");
        double v = 0.0;
        const auto& s = fields[col];
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc()) throw config_error("non-numeric value '" + s + "' in '" + path + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace logvol

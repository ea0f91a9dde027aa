#include "icsim/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace icsim {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

bool needs_quoting(const std::string& cell) {
    return cell.find_first_of(",\"\n\r") != std::string::npos;
}

void append_cell(std::string& out, const std::string& cell) {
    if (!needs_quoting(cell)) {
        out += cell;
        return;
    }
    out += '"';
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void append_row(std::string& out, const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        append_cell(out, row[i]);
    }
    out += '\n';
}

}  // namespace

std::string report_csv(const Report& r) {
    std::string out;
    append_row(out, r.columns);
    for (const auto& row : r.rows) append_row(out, row);
    return out;
}

std::string report_json_sidecar(const Report& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = r.kind;
    j["version"] = kVersion;
    j["wall_seconds"] = r.wall_seconds;
    j["rows"] = r.rows.size();
    j["columns"] = r.columns;
    j["config"] = r.config_json.empty() ? nlohmann::json::object()
                                        : nlohmann::json::parse(r.config_json);
    return j.dump(2) + "\n";
}

void write_report(const Report& r, const std::string& out_base) {
    const std::string csv_path = out_base + ".csv";
    const std::string json_path = out_base + ".json";
    {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + csv_path);
        f << report_csv(r);
        if (!f) throw std::runtime_error("write failed: " + csv_path);
    }
    {
        std::ofstream f(json_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + json_path);
        f << report_json_sidecar(r);
        if (!f) throw std::runtime_error("write failed: " + json_path);
    }
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool cell_started = false;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                cell_started = true;
                break;
            case ',':
                row.push_back(cell);
                cell.clear();
                cell_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (cell_started || !cell.empty() || !row.empty()) {
                    row.push_back(cell);
                    rows.push_back(row);
                }
                row.clear();
                cell.clear();
                cell_started = false;
                break;
            default:
                cell += c;
        }
    }
    if (cell_started || !cell.empty() || !row.empty()) {
        row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace icsim

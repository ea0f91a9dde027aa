#pragma once

#include <string>
#include <vector>

namespace icsim {

inline constexpr const char* kVersion = "0.1.0";

// Shortest round-trippable decimal form of a double.
std::string format_g17(double v);

// Tabular experiment output. Data rows carry no wall-clock or host state, so
// a rerun with the same config and seed reproduces the CSV byte for byte;
// timing and run metadata live in the JSON sidecar instead.
struct Report {
    std::string kind;         // hideseek | regret | sparsepca | stochopt | verify | enumerate
    std::string config_json;  // resolved configuration echo (JSON text)
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    double wall_seconds = 0.0;
};

std::string report_csv(const Report& r);
std::string report_json_sidecar(const Report& r);

// Writes <out_base>.csv and <out_base>.json; throws on IO failure, naming the path.
void write_report(const Report& r, const std::string& out_base);

// Reads a CSV written by write_report back into rows (header row first).
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace icsim

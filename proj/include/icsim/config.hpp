#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icsim/report.hpp"

namespace icsim {

inline constexpr int kConfigSchemaVersion = 1;

// Resolved experiment configuration: one global block plus the block for the
// active kind. JSON layout mirrors this struct; see config_to_json.
struct CliConfig {
    std::string kind;  // hideseek | regret | sparsepca | stochopt | verify | enumerate
    uint64_t seed = 1;
    int64_t trials = 0;  // 0 = per-kind default
    int threads = 1;
    std::string out_base;  // empty = don't write files

    struct Hideseek {
        std::string family = "v1";       // v1 | v2
        std::string algorithm = "full";  // full | scan (scan is v1-only)
        int d = 64;
        double rho = 0.1;
        int b = 0;  // scan only: 0 sizes the scan from the trial budget, >0 fixes the message width
        int segment_size = 16;
        double delta = 0.1;
        int64_t m = 2100;  // per-trial sample budget
        bool threshold_search = false;
        double target = 0.9;
        int64_t m_lo = 1;
        int64_t m_hi = 0;  // 0 = auto bracket
    } hideseek;

    struct Regret {
        int d = 32;
        int T = 20000;
        double rho = -1.0;  // < 0 = recipe min{1/4, sqrt(d/(b*T))}
        int b = 1;
        int j = 1;  // biased arm
        std::vector<int> checkpoints;  // empty = quartiles of T
    } regret;

    struct SparsePca {
        std::string algorithm = "plugin";  // plugin | pairscan
        int d = 9;
        double rho = 0.25;
        int64_t m = 0;  // 0 = plug-in success budget ceil(6 ln(d^2/delta) / tau^2)
        int segment_size = 16;
        double delta = 0.1;
    } sparsepca;

    struct Stochopt {
        int d = 32;
        double beta = 0.0;
        int pair_i = 1;
        int pair_j = 2;
        int64_t m = 10000;
    } stochopt;

    struct Enumerate {
        std::string family = "v1";      // v1 | v2
        std::string protocol = "sweep"; // sweep (all 1-bit 2-round tables) | scan
        int d = 2;
        double rho = 0.1;
        int segment_size = 1;  // scan only
        int64_t window = 2;    // scan only: instances per segment
    } enumerate_;
};

// Baseline config for a kind (also the CLI defaults).
CliConfig default_config(const std::string& kind);

// Applies a JSON config file on top of `cfg`. Unknown keys, type mismatches,
// wrong schema_version, or a "kind" that contradicts cfg.kind throw
// ConfigError. Returns the updated config.
CliConfig apply_config_json(CliConfig cfg, const std::string& json_text);

// Full echo of the resolved config (globals + the active kind's block, with
// the distribution spec nested as a {variant, ...} object).
std::string config_to_json(const CliConfig& cfg);

struct ExperimentOutcome {
    Report report;
    bool ok = true;  // false = verify/enumerate found a violated bound
};

// Runs the experiment described by `cfg` and builds its report (CSV rows +
// config echo). Pure in (config, seed): data rows are byte-identical across
// reruns and thread counts.
ExperimentOutcome run_experiment(const CliConfig& cfg);

}  // namespace icsim

#include "icsim/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "icsim/errors.hpp"
#include "icsim/harness.hpp"
#include "icsim/infotheory.hpp"
#include "icsim/spec_json.hpp"

namespace icsim {

namespace {

using nlohmann::json;

const std::vector<std::string> kKinds{"hideseek", "regret",   "sparsepca",
                                      "stochopt", "verify",   "enumerate"};

int64_t default_trials(const std::string& kind) {
    if (kind == "hideseek") return 500;
    if (kind == "regret") return 50;
    if (kind == "sparsepca") return 100;
    if (kind == "stochopt") return 100;
    return 1;  // verify / enumerate run once
}

// ---- JSON helpers ----

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

template <typename T>
void read_field(const json& j, const std::string& where, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": bad value for \"" + std::string(key) + "\"");
    }
}

// Reads the block's "dist" object; returns true if present.
bool take_dist(const json& block, const std::string& where, json& out) {
    if (!block.contains("dist")) return false;
    out = block["dist"];
    if (!out.is_object()) throw ConfigError(where + ": \"dist\" must be an object");
    return true;
}

// ---- CSV cell formatting ----

std::string cell(double v) { return format_g17(v); }
std::string cell(int64_t v) { return std::to_string(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "1" : "0"; }

WilsonInterval safe_wilson(int64_t successes, int64_t trials) {
    if (trials < 1) return WilsonInterval{0.0, 1.0};
    return wilson_interval(successes, trials);
}

// Success-report rows shared by hideseek and sparsepca. `target_name(rank)`
// labels the per-target rows.
template <typename NameFn>
void success_rows(Report& rep, const SuccessEstimate& est, int64_t m, NameFn&& target_name) {
    rep.columns = {"scope", "m", "trials", "successes", "p_hat", "wilson_lo", "wilson_hi"};
    auto push = [&](const std::string& scope, int64_t trials, int64_t successes) {
        const double p = trials > 0 ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
        const WilsonInterval ci = safe_wilson(successes, trials);
        rep.rows.push_back({scope, cell(m), cell(trials), cell(successes), cell(p), cell(ci.lo), cell(ci.hi)});
    };
    push("mean-over-targets", est.trials, est.successes);

    // Worst visited target (the adversary's pick), ties to the lowest rank.
    int64_t worst = -1;
    double worst_p = 2.0;
    for (size_t r = 0; r < est.target_trials.size(); ++r) {
        if (est.target_trials[r] == 0) continue;
        const double p = static_cast<double>(est.target_successes[r]) /
                         static_cast<double>(est.target_trials[r]);
        if (p < worst_p) {
            worst_p = p;
            worst = static_cast<int64_t>(r);
        }
    }
    if (worst >= 0)
        push("min-over-targets", est.target_trials[worst], est.target_successes[worst]);
    for (size_t r = 0; r < est.target_trials.size(); ++r)
        push(target_name(static_cast<int64_t>(r)), est.target_trials[r], est.target_successes[r]);
}

// ---- Per-kind experiment runners (fill rows; config echo/wall time added by the caller) ----

void run_hideseek(CliConfig& cfg, Report& rep) {
    auto& hs = cfg.hideseek;
    if (hs.family != "v1" && hs.family != "v2")
        throw ConfigError("hideseek: family must be \"v1\" or \"v2\"");
    if (hs.algorithm != "full" && hs.algorithm != "scan")
        throw ConfigError("hideseek: algorithm must be \"full\" or \"scan\"");
    if (hs.family == "v2" && hs.algorithm == "scan")
        throw ConfigError("hideseek: the scan detector works on the sign family (v1) only");

    DetectionFamily family = hs.family == "v1"
                                 ? family_of(HideSeekV1Spec{hs.d, hs.rho, kNone})
                                 : family_of(HideSeekV2Spec{hs.d, hs.rho, kNone});
    Detector det = hs.algorithm == "full" ? full_info_detector(hs.d)
                   : hs.b == 0 ? scan_detector_budget(hs.d, hs.segment_size, hs.rho)
                               : scan_detector_delta(hs.d, hs.b, hs.rho, hs.delta);

    if (!hs.threshold_search) {
        const SuccessEstimate est =
            estimate_success_prob(family, det, hs.m, cfg.trials, cfg.seed, cfg.threads);
        success_rows(rep, est, hs.m,
                     [](int64_t r) { return "target-" + std::to_string(r + 1); });
        return;
    }

    if (hs.m_hi == 0) {
        // Auto bracket: a multiple of the closed-form sample bound, scaled up
        // for the scan (one window per segment) and for the sparse family
        // (per-coordinate signal shrinks from 2*rho to 2*rho/d).
        int64_t base = v1_sample_bound(hs.d, hs.rho, hs.delta);
        if (hs.family == "v2") base *= hs.d;
        if (hs.algorithm == "scan")
            base *= (hs.d + hs.segment_size - 1) / hs.segment_size;
        hs.m_hi = 4 * base;
    }
    const ThresholdResult res = find_sample_threshold(family, det, hs.target, hs.m_lo, hs.m_hi,
                                                      cfg.trials, cfg.seed, cfg.threads);
    rep.columns = {"record", "m", "trials", "successes", "p_hat"};
    for (const ThresholdProbe& p : res.probes)
        rep.rows.push_back({"probe", cell(p.m), cell(p.trials), cell(p.successes), cell(p.p_hat)});
    rep.rows.push_back({"bracket-lo", cell(res.bracket_lo), cell(int64_t{0}), cell(int64_t{0}), cell(0.0)});
    rep.rows.push_back({"bracket-hi", cell(res.bracket_hi), cell(int64_t{0}), cell(int64_t{0}), cell(0.0)});
    rep.rows.push_back({"m-star", cell(res.m_star), cell(int64_t{0}), cell(int64_t{0}), cell(0.0)});
    rep.rows.push_back({"monotone", cell(int64_t{res.monotone ? 1 : 0}), cell(int64_t{0}),
                        cell(int64_t{0}), cell(0.0)});
}

void run_regret(CliConfig& cfg, Report& rep) {
    auto& rg = cfg.regret;
    if (rg.rho < 0.0) rg.rho = bandit_rho_recipe(rg.d, rg.b, rg.T);
    RegretConfig rc;
    rc.spec = BanditLossSpec{rg.d, rg.rho, rg.j};
    rc.T = rg.T;
    rc.trials = cfg.trials;
    rc.checkpoints = rg.checkpoints;
    rc.seed = cfg.seed;
    rc.threads = cfg.threads;
    const RegretExperimentResult res = run_regret_experiment(rc);
    rg.checkpoints = res.config.checkpoints;  // echo the resolved grid

    rep.columns = {"record", "t", "hedge_mean", "hedge_se", "bandit_mean", "bandit_se"};
    for (const RegretCurvePoint& pt : res.curve)
        rep.rows.push_back({"vs-biased", cell(pt.t), cell(pt.hedge_vs_biased.mean),
                            cell(pt.hedge_vs_biased.se), cell(pt.bandit_vs_biased.mean),
                            cell(pt.bandit_vs_biased.se)});
    rep.rows.push_back({"final-vs-best", cell(rg.T), cell(res.hedge_vs_best.mean),
                        cell(res.hedge_vs_best.se), cell(res.bandit_vs_best.mean),
                        cell(res.bandit_vs_best.se)});
}

void run_sparsepca(CliConfig& cfg, Report& rep) {
    auto& sp = cfg.sparsepca;
    if (sp.algorithm != "plugin" && sp.algorithm != "pairscan")
        throw ConfigError("sparsepca: algorithm must be \"plugin\" or \"pairscan\"");
    const SparsePcaSpec spec{sp.d, sp.rho, 1, 2};
    if (sp.m == 0) sp.m = pca_sample_bound(sp.d, spec.tau(), sp.delta);
    Detector det = sp.algorithm == "plugin" ? pca_plugin_detector(sp.d)
                                            : pair_scan_detector_budget(sp.d, sp.segment_size, sp.rho);
    const SuccessEstimate est =
        estimate_success_prob(family_of(spec), det, sp.m, cfg.trials, cfg.seed, cfg.threads);
    success_rows(rep, est, sp.m, [&](int64_t r) {
        auto [i, j] = pair_unrank(sp.d, r);
        return "pair-" + std::to_string(i) + "-" + std::to_string(j);
    });
}

void run_stochopt(CliConfig& cfg, Report& rep) {
    const auto& so = cfg.stochopt;
    const MatrixOptSpec spec{so.d, so.beta, so.pair_i, so.pair_j};
    validate(spec);
    const int64_t m = so.m;
    std::vector<StochoptResult> slots =
        run_trials<StochoptResult>(cfg.trials, cfg.threads, [&](int64_t t) {
            SamplerSource src = make_source(spec, CounterRng(cfg.seed, static_cast<uint64_t>(t)));
            return stochopt_plugin(src, m, spec);
        });

    rep.columns = {"record", "trial", "entry_i", "entry_j", "empirical_min",
                   "population_value", "population_min", "gap"};
    double mean_emp = 0.0, mean_val = 0.0, mean_gap = 0.0;
    for (size_t t = 0; t < slots.size(); ++t) {
        const StochoptResult& r = slots[t];
        rep.rows.push_back({"trial", cell(static_cast<int64_t>(t + 1)), cell(r.entry.i),
                            cell(r.entry.j), cell(r.empirical_min), cell(r.population_value),
                            cell(r.population_min), cell(r.gap)});
        mean_emp += r.empirical_min;
        mean_val += r.population_value;
        mean_gap += r.gap;
    }
    const double n = static_cast<double>(slots.size());
    rep.rows.push_back({"mean", cell(int64_t{0}), cell(int64_t{0}), cell(int64_t{0}),
                        cell(mean_emp / n), cell(mean_val / n), cell(slots.front().population_min),
                        cell(mean_gap / n)});
}

bool run_verify(const CliConfig& cfg, Report& rep) {
    const VerifyReport res = run_verify_suite(cfg.seed, cfg.threads);
    rep.columns = {"id", "kind", "cases", "quantity", "bound", "margin", "holds"};
    for (const VerifyRow& r : res.rows)
        rep.rows.push_back({r.id, r.kind, cell(r.cases), cell(r.quantity), cell(r.bound),
                            cell(r.margin), cell(r.holds)});
    return res.all_hold;
}

void push_check_rows(Report& rep, int64_t protocol_id, const KlBoundCheck& c) {
    rep.rows.push_back({cell(protocol_id), cell(int64_t{0}), cell(c.lhs_nats),
                        cell(c.tightest_rhs), cell(c.margin)});
    for (size_t j = 0; j < c.per_j_kl_nats.size(); ++j)
        rep.rows.push_back({cell(protocol_id), cell(static_cast<int64_t>(j + 1)),
                            cell(c.per_j_kl_nats[j]), cell(c.tightest_rhs), cell(c.margin)});
}

bool run_enumerate(const CliConfig& cfg, Report& rep) {
    const auto& en = cfg.enumerate_;
    if (en.family != "v1" && en.family != "v2")
        throw ConfigError("enumerate: family must be \"v1\" or \"v2\"");
    if (en.protocol != "sweep" && en.protocol != "scan")
        throw ConfigError("enumerate: protocol must be \"sweep\" or \"scan\"");
    // Aggregate row first (j = 0: the bound's left-hand side), then per-j KLs.
    rep.columns = {"protocol_id", "j", "kl_nats", "bound", "margin"};

    if (en.protocol == "sweep") {
        SweepOutcome out = en.family == "v1"
                               ? sweep_onebit_tworound(HideSeekV1Spec{en.d, en.rho, kNone}, en.rho)
                               : sweep_onebit_tworound(HideSeekV2Spec{en.d, en.rho, kNone}, en.rho);
        for (size_t id = 0; id < out.checks.size(); ++id)
            push_check_rows(rep, static_cast<int64_t>(id), out.checks[id]);
        return out.all_hold;
    }

    if (en.family != "v1")
        throw ConfigError("enumerate: the scan protocol runs on the sign family (v1) only");
    ScanParams prm;
    prm.ambient_d = en.d;
    prm.pairs = false;
    prm.num_coords = en.d;
    prm.segment_size = en.segment_size;
    prm.per_segment_n = en.window;
    prm.threshold = en.rho;
    prm.unit = 1.0;
    ScanProtocol probe(prm);  // validates the shape
    const ProtocolSpec pspec = probe.protocol_spec();
    const KlBoundCheck check = transcript_kl_bound_check(
        [&prm]() { return std::make_unique<ScanProtocol>(prm); }, pspec,
        HideSeekV1Spec{en.d, en.rho, kNone}, en.rho);
    push_check_rows(rep, 0, check);
    return check.holds;
}

}  // namespace

CliConfig default_config(const std::string& kind) {
    if (std::find(kKinds.begin(), kKinds.end(), kind) == kKinds.end())
        throw ConfigError("unknown experiment kind \"" + kind + "\"");
    CliConfig cfg;
    cfg.kind = kind;
    return cfg;
}

CliConfig apply_config_json(CliConfig cfg, const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON: ") + e.what());
    }
    check_keys(j, "config", {"schema_version", "kind", "seed", "trials", "threads", "out",
                             "hideseek", "regret", "sparsepca", "stochopt", "verify", "enumerate"});
    if (j.contains("schema_version")) {
        int v = -1;
        read_field(j, "config", "schema_version", v);
        if (v != kConfigSchemaVersion)
            throw ConfigError("config: schema_version " + std::to_string(v) + " unsupported (need " +
                              std::to_string(kConfigSchemaVersion) + ")");
    }
    if (j.contains("kind")) {
        std::string k;
        read_field(j, "config", "kind", k);
        if (k != cfg.kind)
            throw ConfigError("config: kind \"" + k + "\" does not match the \"" + cfg.kind +
                              "\" subcommand");
    }
    for (const std::string& other : kKinds)
        if (other != cfg.kind && j.contains(other))
            throw ConfigError("config: block \"" + other + "\" does not match kind \"" + cfg.kind + "\"");

    read_field(j, "config", "seed", cfg.seed);
    read_field(j, "config", "trials", cfg.trials);
    read_field(j, "config", "threads", cfg.threads);
    read_field(j, "config", "out", cfg.out_base);

    if (!j.contains(cfg.kind)) return cfg;
    const json& blk = j[cfg.kind];
    const std::string where = cfg.kind;

    if (cfg.kind == "hideseek") {
        check_keys(blk, where, {"algorithm", "dist", "b", "segment_size", "delta", "m",
                                "threshold_search", "target", "m_lo", "m_hi"});
        json dist;
        if (take_dist(blk, where, dist)) {
            const std::string variant = dist.value("variant", "");
            if (variant == "hideseek-v1") {
                const HideSeekV1Spec s = v1_spec_from_json(dist);
                cfg.hideseek.family = "v1";
                cfg.hideseek.d = s.d;
                cfg.hideseek.rho = s.rho;
            } else if (variant == "hideseek-v2") {
                const HideSeekV2Spec s = v2_spec_from_json(dist);
                cfg.hideseek.family = "v2";
                cfg.hideseek.d = s.d;
                cfg.hideseek.rho = s.rho;
            } else {
                throw ConfigError("hideseek: dist variant must be hideseek-v1 or hideseek-v2");
            }
        }
        read_field(blk, where, "algorithm", cfg.hideseek.algorithm);
        read_field(blk, where, "b", cfg.hideseek.b);
        read_field(blk, where, "segment_size", cfg.hideseek.segment_size);
        read_field(blk, where, "delta", cfg.hideseek.delta);
        read_field(blk, where, "m", cfg.hideseek.m);
        read_field(blk, where, "threshold_search", cfg.hideseek.threshold_search);
        read_field(blk, where, "target", cfg.hideseek.target);
        read_field(blk, where, "m_lo", cfg.hideseek.m_lo);
        read_field(blk, where, "m_hi", cfg.hideseek.m_hi);
    } else if (cfg.kind == "regret") {
        check_keys(blk, where, {"dist", "T", "b", "checkpoints"});
        json dist;
        if (take_dist(blk, where, dist)) {
            const BanditLossSpec s = bandit_spec_from_json(dist);
            cfg.regret.d = s.d;
            cfg.regret.rho = s.rho;
            cfg.regret.j = s.j;
        }
        read_field(blk, where, "T", cfg.regret.T);
        read_field(blk, where, "b", cfg.regret.b);
        read_field(blk, where, "checkpoints", cfg.regret.checkpoints);
    } else if (cfg.kind == "sparsepca") {
        check_keys(blk, where, {"algorithm", "dist", "m", "segment_size", "delta"});
        json dist;
        if (take_dist(blk, where, dist)) {
            const SparsePcaSpec s = pca_spec_from_json(dist);
            cfg.sparsepca.d = s.d;
            cfg.sparsepca.rho = s.rho;
        }
        read_field(blk, where, "algorithm", cfg.sparsepca.algorithm);
        read_field(blk, where, "m", cfg.sparsepca.m);
        read_field(blk, where, "segment_size", cfg.sparsepca.segment_size);
        read_field(blk, where, "delta", cfg.sparsepca.delta);
    } else if (cfg.kind == "stochopt") {
        check_keys(blk, where, {"dist", "m"});
        json dist;
        if (take_dist(blk, where, dist)) {
            const MatrixOptSpec s = matrixopt_spec_from_json(dist);
            cfg.stochopt.d = s.d;
            cfg.stochopt.beta = s.beta;
            cfg.stochopt.pair_i = s.pair_i;
            cfg.stochopt.pair_j = s.pair_j;
        }
        read_field(blk, where, "m", cfg.stochopt.m);
    } else if (cfg.kind == "verify") {
        check_keys(blk, where, {});
    } else {  // enumerate
        check_keys(blk, where, {"protocol", "dist", "segment_size", "window"});
        json dist;
        if (take_dist(blk, where, dist)) {
            const std::string variant = dist.value("variant", "");
            if (variant == "hideseek-v1") {
                const HideSeekV1Spec s = v1_spec_from_json(dist);
                cfg.enumerate_.family = "v1";
                cfg.enumerate_.d = s.d;
                cfg.enumerate_.rho = s.rho;
            } else if (variant == "hideseek-v2") {
                const HideSeekV2Spec s = v2_spec_from_json(dist);
                cfg.enumerate_.family = "v2";
                cfg.enumerate_.d = s.d;
                cfg.enumerate_.rho = s.rho;
            } else {
                throw ConfigError("enumerate: dist variant must be hideseek-v1 or hideseek-v2");
            }
        }
        read_field(blk, where, "protocol", cfg.enumerate_.protocol);
        read_field(blk, where, "segment_size", cfg.enumerate_.segment_size);
        read_field(blk, where, "window", cfg.enumerate_.window);
    }
    return cfg;
}

std::string config_to_json(const CliConfig& cfg) {
    json j{{"schema_version", kConfigSchemaVersion},
           {"kind", cfg.kind},
           {"seed", cfg.seed},
           {"trials", cfg.trials},
           {"threads", cfg.threads},
           {"out", cfg.out_base}};
    if (cfg.kind == "hideseek") {
        const auto& hs = cfg.hideseek;
        json dist = hs.family == "v1" ? spec_to_json(HideSeekV1Spec{hs.d, hs.rho, kNone})
                                      : spec_to_json(HideSeekV2Spec{hs.d, hs.rho, kNone});
        j["hideseek"] = {{"algorithm", hs.algorithm},
                         {"dist", dist},
                         {"b", hs.b},
                         {"segment_size", hs.segment_size},
                         {"delta", hs.delta},
                         {"m", hs.m},
                         {"threshold_search", hs.threshold_search},
                         {"target", hs.target},
                         {"m_lo", hs.m_lo},
                         {"m_hi", hs.m_hi}};
    } else if (cfg.kind == "regret") {
        const auto& rg = cfg.regret;
        j["regret"] = {{"dist", spec_to_json(BanditLossSpec{rg.d, rg.rho, rg.j})},
                       {"T", rg.T},
                       {"b", rg.b},
                       {"checkpoints", rg.checkpoints}};
    } else if (cfg.kind == "sparsepca") {
        const auto& sp = cfg.sparsepca;
        j["sparsepca"] = {{"algorithm", sp.algorithm},
                          {"dist", spec_to_json(SparsePcaSpec{sp.d, sp.rho, 1, 2})},
                          {"m", sp.m},
                          {"segment_size", sp.segment_size},
                          {"delta", sp.delta}};
    } else if (cfg.kind == "stochopt") {
        const auto& so = cfg.stochopt;
        j["stochopt"] = {
            {"dist", spec_to_json(MatrixOptSpec{so.d, so.beta, so.pair_i, so.pair_j})},
            {"m", so.m}};
    } else if (cfg.kind == "verify") {
        j["verify"] = json::object();
    } else if (cfg.kind == "enumerate") {
        const auto& en = cfg.enumerate_;
        json dist = en.family == "v1" ? spec_to_json(HideSeekV1Spec{en.d, en.rho, kNone})
                                      : spec_to_json(HideSeekV2Spec{en.d, en.rho, kNone});
        j["enumerate"] = {{"protocol", en.protocol},
                          {"dist", dist},
                          {"segment_size", en.segment_size},
                          {"window", en.window}};
    } else {
        throw ConfigError("unknown experiment kind \"" + cfg.kind + "\"");
    }
    return j.dump(2);
}

ExperimentOutcome run_experiment(const CliConfig& cfg_in) {
    CliConfig cfg = cfg_in;
    if (std::find(kKinds.begin(), kKinds.end(), cfg.kind) == kKinds.end())
        throw ConfigError("unknown experiment kind \"" + cfg.kind + "\"");
    if (cfg.trials <= 0) cfg.trials = default_trials(cfg.kind);
    if (cfg.threads < 0) cfg.threads = 0;  // 0 = library default thread count

    ExperimentOutcome out;
    out.report.kind = cfg.kind;
    const auto start = std::chrono::steady_clock::now();

    if (cfg.kind == "hideseek") {
        run_hideseek(cfg, out.report);
    } else if (cfg.kind == "regret") {
        run_regret(cfg, out.report);
    } else if (cfg.kind == "sparsepca") {
        run_sparsepca(cfg, out.report);
    } else if (cfg.kind == "stochopt") {
        run_stochopt(cfg, out.report);
    } else if (cfg.kind == "verify") {
        out.ok = run_verify(cfg, out.report);
    } else {
        out.ok = run_enumerate(cfg, out.report);
    }

    const auto stop = std::chrono::steady_clock::now();
    out.report.wall_seconds = std::chrono::duration<double>(stop - start).count();
    out.report.config_json = config_to_json(cfg);  // echo the resolved config
    return out;
}

}  // namespace icsim

#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "icsim/config.hpp"
#include "icsim/errors.hpp"
#include "icsim/report.hpp"

namespace {

using icsim::CliConfig;

// Flag precedence: defaults < JSON config file < explicit CLI flags. Each
// option records how to re-copy its parsed value on top of a file-loaded
// config, applied only when the flag was actually given.
struct SubState {
    CLI::App* sub = nullptr;
    CliConfig cfg;
    std::string config_path;
    std::vector<std::pair<CLI::Option*, std::function<void(CliConfig&, const CliConfig&)>>> binds;
};

void add_globals(SubState& st) {
    st.sub->add_option("--config", st.config_path, "JSON config file (schema_version 1)");
    auto* seed = st.sub->add_option("--seed", st.cfg.seed, "random seed (64-bit)");
    st.binds.emplace_back(seed, [](CliConfig& d, const CliConfig& s) { d.seed = s.seed; });
    auto* trials = st.sub->add_option("--trials", st.cfg.trials, "Monte Carlo trials (0 = per-kind default)");
    st.binds.emplace_back(trials, [](CliConfig& d, const CliConfig& s) { d.trials = s.trials; });
    auto* out = st.sub->add_option("--out", st.cfg.out_base, "output base path (writes <out>.csv and <out>.json)");
    st.binds.emplace_back(out, [](CliConfig& d, const CliConfig& s) { d.out_base = s.out_base; });
    auto* threads = st.sub->add_option("--threads", st.cfg.threads, "worker threads (1 = serial reference)");
    st.binds.emplace_back(threads, [](CliConfig& d, const CliConfig& s) { d.threads = s.threads; });
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw icsim::ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in.good() && !in.eof()) throw icsim::ConfigError("cannot read config file: " + path);
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation toolkit for information-constrained estimation protocols"};
    app.require_subcommand(1);

    std::vector<SubState> subs(6);

    {  // hideseek: detection success / sample-complexity search on the hidden-coordinate families
        SubState& st = subs[0];
        st.cfg = icsim::default_config("hideseek");
        st.sub = app.add_subcommand("hideseek", "hidden-coordinate detection experiments");
        add_globals(st);
        auto& hs = st.cfg.hideseek;
        auto B = [&st](CLI::Option* o, auto copy) { st.binds.emplace_back(o, copy); };
        B(st.sub->add_option("--family", hs.family, "distribution family: v1 (signs) or v2 (signed basis)"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.family = s.hideseek.family; });
        B(st.sub->add_option("--algorithm", hs.algorithm, "detector: full or scan"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.algorithm = s.hideseek.algorithm; });
        B(st.sub->add_option("--d", hs.d, "dimension"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.d = s.hideseek.d; });
        B(st.sub->add_option("--rho", hs.rho, "bias of the hidden coordinate"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.rho = s.hideseek.rho; });
        B(st.sub->add_option("--b", hs.b, "scan message budget in bits (0 = size from the trial budget)"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.b = s.hideseek.b; });
        B(st.sub->add_option("--segment-size", hs.segment_size, "coordinates per scan segment"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.segment_size = s.hideseek.segment_size; });
        B(st.sub->add_option("--delta", hs.delta, "scan failure budget"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.delta = s.hideseek.delta; });
        B(st.sub->add_option("--m", hs.m, "sample budget per trial"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.m = s.hideseek.m; });
        B(st.sub->add_flag("--threshold-search", hs.threshold_search, "bisect for the sample budget reaching --target"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.threshold_search = s.hideseek.threshold_search; });
        B(st.sub->add_option("--target", hs.target, "target success probability for the search"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.target = s.hideseek.target; });
        B(st.sub->add_option("--m-lo", hs.m_lo, "search bracket: lower sample budget"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.m_lo = s.hideseek.m_lo; });
        B(st.sub->add_option("--m-hi", hs.m_hi, "search bracket: upper sample budget (0 = auto)"),
          [](CliConfig& d, const CliConfig& s) { d.hideseek.m_hi = s.hideseek.m_hi; });
    }

    {  // regret: Hedge vs the 1-bit bandit learner on the biased-arm loss distribution
        SubState& st = subs[1];
        st.cfg = icsim::default_config("regret");
        st.sub = app.add_subcommand("regret", "full-information vs bit-constrained bandit regret");
        add_globals(st);
        auto& rg = st.cfg.regret;
        auto B = [&st](CLI::Option* o, auto copy) { st.binds.emplace_back(o, copy); };
        B(st.sub->add_option("--d", rg.d, "number of arms"),
          [](CliConfig& d, const CliConfig& s) { d.regret.d = s.regret.d; });
        B(st.sub->add_option("--T", rg.T, "rounds"),
          [](CliConfig& d, const CliConfig& s) { d.regret.T = s.regret.T; });
        B(st.sub->add_option("--rho", rg.rho, "bias of the good arm (negative = recipe min{1/4, sqrt(d/(b*T))})"),
          [](CliConfig& d, const CliConfig& s) { d.regret.rho = s.regret.rho; });
        B(st.sub->add_option("--b", rg.b, "bits of feedback per round"),
          [](CliConfig& d, const CliConfig& s) { d.regret.b = s.regret.b; });
        B(st.sub->add_option("--j", rg.j, "index of the biased arm"),
          [](CliConfig& d, const CliConfig& s) { d.regret.j = s.regret.j; });
        B(st.sub->add_option("--checkpoints", rg.checkpoints, "regret snapshot rounds (comma separated)")->delimiter(','),
          [](CliConfig& d, const CliConfig& s) { d.regret.checkpoints = s.regret.checkpoints; });
    }

    {  // sparsepca
        SubState& st = subs[2];
        st.cfg = icsim::default_config("sparsepca");
        st.sub = app.add_subcommand("sparsepca", "planted-pair detection in the spiked sign model");
        add_globals(st);
        auto& sp = st.cfg.sparsepca;
        auto B = [&st](CLI::Option* o, auto copy) { st.binds.emplace_back(o, copy); };
        B(st.sub->add_option("--algorithm", sp.algorithm, "detector: plugin or pairscan"),
          [](CliConfig& d, const CliConfig& s) { d.sparsepca.algorithm = s.sparsepca.algorithm; });
        B(st.sub->add_option("--d", sp.d, "dimension"),
          [](CliConfig& d, const CliConfig& s) { d.sparsepca.d = s.sparsepca.d; });
        B(st.sub->add_option("--rho", sp.rho, "sign-agreement bias of the planted pair"),
          [](CliConfig& d, const CliConfig& s) { d.sparsepca.rho = s.sparsepca.rho; });
        B(st.sub->add_option("--m", sp.m, "sample budget per trial (0 = plug-in success budget)"),
          [](CliConfig& d, const CliConfig& s) { d.sparsepca.m = s.sparsepca.m; });
        B(st.sub->add_option("--segment-size", sp.segment_size, "pair counters per scan segment"),
          [](CliConfig& d, const CliConfig& s) { d.sparsepca.segment_size = s.sparsepca.segment_size; });
        B(st.sub->add_option("--delta", sp.delta, "failure budget for the plug-in sample size"),
          [](CliConfig& d, const CliConfig& s) { d.sparsepca.delta = s.sparsepca.delta; });
    }

    {  // stochopt
        SubState& st = subs[3];
        st.cfg = icsim::default_config("stochopt");
        st.sub = app.add_subcommand("stochopt", "empirical-minimum plug-in on the random matrix game");
        add_globals(st);
        auto& so = st.cfg.stochopt;
        auto B = [&st](CLI::Option* o, auto copy) { st.binds.emplace_back(o, copy); };
        B(st.sub->add_option("--d", so.d, "matrix dimension"),
          [](CliConfig& d, const CliConfig& s) { d.stochopt.d = s.stochopt.d; });
        B(st.sub->add_option("--beta", so.beta, "mean of the planted entry"),
          [](CliConfig& d, const CliConfig& s) { d.stochopt.beta = s.stochopt.beta; });
        B(st.sub->add_option("--pair-i", so.pair_i, "planted entry row"),
          [](CliConfig& d, const CliConfig& s) { d.stochopt.pair_i = s.stochopt.pair_i; });
        B(st.sub->add_option("--pair-j", so.pair_j, "planted entry column"),
          [](CliConfig& d, const CliConfig& s) { d.stochopt.pair_j = s.stochopt.pair_j; });
        B(st.sub->add_option("--m", so.m, "samples per trial"),
          [](CliConfig& d, const CliConfig& s) { d.stochopt.m = s.stochopt.m; });
    }

    {  // verify
        SubState& st = subs[4];
        st.cfg = icsim::default_config("verify");
        st.sub = app.add_subcommand("verify", "run every inequality and bound check");
        add_globals(st);
    }

    {  // enumerate
        SubState& st = subs[5];
        st.cfg = icsim::default_config("enumerate");
        st.sub = app.add_subcommand("enumerate", "exact transcript-KL reports for small protocols");
        add_globals(st);
        auto& en = st.cfg.enumerate_;
        auto B = [&st](CLI::Option* o, auto copy) { st.binds.emplace_back(o, copy); };
        B(st.sub->add_option("--family", en.family, "distribution family: v1 or v2"),
          [](CliConfig& d, const CliConfig& s) { d.enumerate_.family = s.enumerate_.family; });
        B(st.sub->add_option("--protocol", en.protocol, "sweep (all 1-bit 2-round tables) or scan"),
          [](CliConfig& d, const CliConfig& s) { d.enumerate_.protocol = s.enumerate_.protocol; });
        B(st.sub->add_option("--d", en.d, "dimension (sweep needs alphabet <= 4)"),
          [](CliConfig& d, const CliConfig& s) { d.enumerate_.d = s.enumerate_.d; });
        B(st.sub->add_option("--rho", en.rho, "bias of the hidden coordinate"),
          [](CliConfig& d, const CliConfig& s) { d.enumerate_.rho = s.enumerate_.rho; });
        B(st.sub->add_option("--segment-size", en.segment_size, "scan: coordinates per segment"),
          [](CliConfig& d, const CliConfig& s) { d.enumerate_.segment_size = s.enumerate_.segment_size; });
        B(st.sub->add_option("--window", en.window, "scan: instances per segment"),
          [](CliConfig& d, const CliConfig& s) { d.enumerate_.window = s.enumerate_.window; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are config errors
    }

    try {
        SubState* st = nullptr;
        for (SubState& s : subs)
            if (s.sub->parsed()) st = &s;
        if (st == nullptr) throw icsim::ConfigError("no subcommand given");

        CliConfig cfg = st->cfg;
        if (!st->config_path.empty()) {
            CliConfig from_file =
                icsim::apply_config_json(icsim::default_config(st->cfg.kind), read_file(st->config_path));
            for (const auto& [opt, copy] : st->binds)
                if (opt->count() > 0) copy(from_file, st->cfg);
            cfg = from_file;
        }

        const icsim::ExperimentOutcome out = icsim::run_experiment(cfg);
        if (cfg.out_base.empty()) {
            std::cout << icsim::report_csv(out.report);
        } else {
            icsim::write_report(out.report, cfg.out_base);
            std::cout << "wrote " << cfg.out_base << ".csv and " << cfg.out_base << ".json ("
                      << out.report.rows.size() << " rows)\n";
        }
        if (!out.ok) std::cerr << cfg.kind << ": at least one bound check failed\n";
        return out.ok ? 0 : 1;
    } catch (const icsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "icsim/distributions.hpp"
#include "icsim/estimators.hpp"
#include "icsim/protocol.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace icsim {

// ---- Deterministic parallel trial loop ----
//
// Results land in slot arrays indexed by trial id and every per-trial rng is a
// pure function of (seed, trial id), so the aggregate is byte-identical no
// matter how many threads run. threads: 1 = serial reference path, >1 = that
// many OpenMP threads, <=0 = the OpenMP default.

template <typename Body>
void parallel_for(int64_t count, int threads, Body&& body) {
    if (count <= 0) return;
#ifdef _OPENMP
    int nt = threads;
    if (nt <= 0) nt = omp_get_max_threads();
    if (nt > 1) {
        std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(nt)
        for (int64_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        return;
    }
#endif
    for (int64_t i = 0; i < count; ++i) body(i);
}

template <typename T, typename Fn>
std::vector<T> run_trials(int64_t count, int threads, Fn&& fn) {
    std::vector<T> out(static_cast<size_t>(count));
    parallel_for(count, threads, [&](int64_t i) { out[static_cast<size_t>(i)] = fn(i); });
    return out;
}

// ---- Success-probability estimation ----

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

// 95% by default (z = Phi^{-1}(0.975)).
WilsonInterval wilson_interval(int64_t successes, int64_t trials, double z = 1.959963984540054);

// A detection algorithm under test: consumes up to `budget` instances from the
// source and answers. The rng is the algorithm's private randomness.
using Detector = std::function<Detection(InstanceSource&, int64_t budget, CounterRng&)>;

// One hidden-target family: `instantiate(rank)` yields the sampler with target
// number `rank` planted plus the detection that counts as success.
struct FamilyInstance {
    std::function<void(CounterRng&, Instance&)> sampler;
    Detection target;
};

struct DetectionFamily {
    std::string name;
    int64_t num_targets = 0;
    std::function<FamilyInstance(int64_t rank)> instantiate;
};

DetectionFamily family_of(HideSeekV1Spec base);   // targets: coordinates 1..d
DetectionFamily family_of(HideSeekV2Spec base);   // targets: coordinates 1..d
DetectionFamily family_of(SparsePcaSpec base);    // targets: pairs i<j

// Stock detectors. The *_budget forms size themselves from the per-trial
// budget (and report a guaranteed miss when it cannot fit even one window);
// the delta forms have a fixed shape and must be given at least their own
// sample size.
Detector full_info_detector(int d);
Detector pca_plugin_detector(int d);
Detector scan_detector_budget(int d, int segment_size, double rho);
Detector scan_detector_delta(int d, int b, double rho, double delta);
Detector pair_scan_detector_budget(int d, int segment_size, double rho_pca);
Detector pair_scan_detector_delta(int d, int b, double rho_pca, double delta);

struct SuccessEstimate {
    int64_t trials = 0;
    int64_t successes = 0;
    double p_hat = 0.0;
    WilsonInterval ci;
    // Per hidden target (indexed by rank): the adversary picks the worst one,
    // so reports expose the full breakdown, not just the average.
    std::vector<int64_t> target_trials;
    std::vector<int64_t> target_successes;
};

SuccessEstimate estimate_success_prob(const DetectionFamily& family, const Detector& algorithm,
                                      int64_t budget, int64_t trials, uint64_t seed,
                                      int threads = 1);

// ---- Sample-complexity threshold search ----

struct ThresholdProbe {
    int64_t m = 0;
    int64_t successes = 0;
    int64_t trials = 0;
    double p_hat = 0.0;
};

struct ThresholdResult {
    int64_t m_star = 0;      // bracket midpoint
    int64_t bracket_lo = 0;  // success < target here (unless met immediately)
    int64_t bracket_hi = 0;  // success >= target here
    std::vector<ThresholdProbe> probes;
    bool monotone = true;  // probes non-decreasing in m (informational)
};

// Bisection on the sample budget until the bracket width is <= 10% of its
// midpoint. Probes share the same seed, so a larger budget replays the same
// streams for longer (paired probes). Target met at m_lo returns m_lo; target
// missed at m_hi throws TargetNotBracketed.
ThresholdResult find_sample_threshold(const DetectionFamily& family, const Detector& algorithm,
                                      double target, int64_t m_lo, int64_t m_hi,
                                      int64_t trials_per_probe, uint64_t seed, int threads = 1);

// ---- Theory-side closed forms ----

double v1_success_lower_bound(int d, int64_t mn, double rho);   // 1 - 2d exp(-mn rho^2 / 2)
int64_t v1_sample_bound(int d, double rho, double delta);       // ceil(2 ln(2d/delta) / rho^2)
double pca_success_lower_bound(int d, int64_t m, double tau);   // 1 - d^2 exp(-m tau^2 / 6)
int64_t pca_sample_bound(int d, double tau, double delta);      // ceil(6 ln(d^2/delta) / tau^2)
double hedge_regret_cap(int d, int T);                          // 2 sqrt(T ln d)
double bandit_regret_floor(int d, int T);                       // 0.05 sqrt(d T)

// ---- Regret experiment (both learners on the same loss draws) ----

struct RegretConfig {
    BanditLossSpec spec;           // j is the biased (best) arm
    int T = 1000;
    int64_t trials = 50;
    std::vector<int> checkpoints;  // ascending; empty -> {T/4, T/2, 3T/4, T}
    uint64_t seed = 1;
    int threads = 1;
};

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

struct RegretCurvePoint {
    int t = 0;
    MeanSe hedge_vs_biased;
    MeanSe bandit_vs_biased;
};

struct RegretExperimentResult {
    RegretConfig config;
    MeanSe hedge_vs_best, hedge_vs_biased;
    MeanSe bandit_vs_best, bandit_vs_biased;
    std::vector<RegretCurvePoint> curve;
};

RegretExperimentResult run_regret_experiment(const RegretConfig& cfg);

// ---- Exhaustive protocol sweeps ----

// Deterministic protocol for enumeration sweeps: round t's message value is a
// table lookup on (instance index, previous message value); finish maps the
// last value through `decision` (empty decision = constant coordinate 1).
class TableProtocol : public Protocol {
  public:
    using Indexer = std::function<int64_t(const Instance&)>;
    TableProtocol(Indexer indexer, int bits, std::vector<std::vector<uint8_t>> tables,
                  std::vector<int> decision = {});
    Message step(std::span<const Instance> batch, const std::vector<Message>& prior,
                 CounterRng& rng) override;
    Detection finish(const std::vector<Message>& messages) override;

  private:
    Indexer indexer_;
    int bits_;
    std::vector<std::vector<uint8_t>> tables_;
    std::vector<int> decision_;
};

// Every deterministic 1-bit two-round protocol on a tiny family (alphabet a:
// 2^a first-round tables x 2^(2a) second-round tables), each checked against
// the transcript-KL bounds. Feasible for a <= 4, i.e. V1 with d=2 (4096
// protocols) or V2 with d=2.
struct SweepOutcome {
    int64_t protocols = 0;
    double max_lhs = 0.0;
    double min_margin = 0.0;
    bool all_hold = true;
    int64_t worst_id = -1;       // protocol id with the smallest margin
    std::vector<KlBoundCheck> checks;  // indexed by protocol id
};

SweepOutcome sweep_onebit_tworound(const HideSeekV1Spec& family, double rho);
SweepOutcome sweep_onebit_tworound(const HideSeekV2Spec& family, double rho);

// ---- Inequality verification suite ----

struct VerifyRow {
    std::string id;
    std::string kind;  // "exact" or "monte-carlo"
    int64_t cases = 0;
    double quantity = 0.0;  // worst observed left-hand side (or MC estimate + 3 SE)
    double bound = 0.0;
    double margin = 0.0;  // bound - quantity
    bool holds = false;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool all_hold = false;
};

// Runs every inequality check once: the message-KL detection bound (formula +
// exact random-protocol sweep), the KL/chi-square ratio inequalities, Pinsker,
// log-sum, the balls-in-bins moment bound, the per-source information budget
// sweep, and the exhaustive transcript-KL sweeps on both tiny families.
VerifyReport run_verify_suite(uint64_t seed, int threads = 1);

}  // namespace icsim

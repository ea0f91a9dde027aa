#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "icsim/distributions.hpp"
#include "icsim/protocol.hpp"
#include "icsim/rng.hpp"

namespace icsim {

// ---- Constraint-free detectors ----

// Coordinate with the highest empirical mean; ties to the lowest index.
Detection full_info_argmax(std::span<const Instance> samples, int d);
Detection full_info_argmax(InstanceSource& src, int64_t m, int d);

// Mode of an action sequence; ties to the lowest index.
Detection most_common_action(std::span<const int> actions, int d);

// Pair (i<j) with the highest empirical mean of x_i * x_j; ties to the
// lexicographically smallest pair. Pairs never touched by a sample have
// empirical mean 0 and participate in the argmax.
Detection pca_plugin(std::span<const Instance> samples, int d);
Detection pca_plugin(InstanceSource& src, int64_t m, int d);

// ---- Memory-limited scan detectors ----

// A scan partitions `num_coords` (real or virtual) coordinates into segments
// of `segment_size` and walks them left to right, spending `per_segment_n`
// fresh instances per segment. Counters are exact integer sums of ±1
// observations; the protocol state is exactly the packed counters plus
// bookkeeping, so the b-bit budget is literal. A coordinate is recorded when
// its window mean strictly exceeds `threshold`; the scan keeps the crossing
// coordinate with the largest window mean (ties to the lowest index) and

// falls back to the first coordinate if nothing ever crosses.
struct ScanParams {
    int ambient_d = 1;       // instance dimension
    bool pairs = false;      // scan the d(d-1)/2 pair products instead of coordinates
    int num_coords = 1;
    int segment_size = 1;
    int64_t per_segment_n = 1;
    double threshold = 0.0;
    double unit = 1.0;       // observation magnitude: 1 for signs, d/2 for pair products

    int num_segments() const;
    int64_t total_instances() const;
    int required_bits() const;
};

// Stock parameterizations. The delta forms size the window by Hoeffding plus
// a union bound over all scanned coordinates; the budget forms spread a total
// instance budget evenly over the segments (used by threshold searches).
ScanParams dense_scan_params(int d, int b, double rho, double delta);
ScanParams dense_scan_params_budget(int d, int segment_size, double rho, int64_t total_budget);
ScanParams pair_scan_params(int d, int b, double rho_pca, double delta);
ScanParams pair_scan_params_budget(int d, int segment_size, double rho_pca, int64_t total_budget);

class ScanProtocol : public Protocol {
  public:
    explicit ScanProtocol(const ScanParams& prm);
    Message step(std::span<const Instance> batch, const std::vector<Message>& prior, CounterRng& rng) override;
    Detection finish(const std::vector<Message>& messages) override;
    ProtocolSpec protocol_spec() const;  // (required_bits, 1, total_instances)

  private:
    struct State {
        int64_t pos = 0;
        int seg = 0;
        int best = 0;  // 0 = none, else 1-based coordinate / pair rank
        int64_t best_units = 0;
        std::vector<int64_t> counters;
    };
    State decode(const Message& m) const;
    Message encode(const State& s) const;
    void absorb(const Instance& x, State& s) const;

    ScanParams prm_;
    int w_pos_, w_seg_, w_best_, w_units_;
};

// One-call scan detectors; both drive the protocol through run_protocol
// so the bit budget b is enforced, not assumed.
Detection segment_scan(InstanceSource& src, int d, int b, double rho, double delta);
Detection pair_segment_scan(InstanceSource& src, int d, int b, double rho_pca, double delta);
Detection run_scan(const ScanParams& prm, InstanceSource& src);

// ---- Online learners on the loss construction ----

struct RegretSnapshot {
    int t = 0;
    double cum_chosen = 0.0;
    std::vector<double> loss_sums;  // per action, cumulative at t
};

struct RegretTrace {
    std::vector<int> actions;           // 1-based, one per round
    std::vector<double> chosen_losses;  // observed loss of the action played
    std::vector<double> final_loss_sums;
    double cum_chosen = 0.0;
    std::vector<RegretSnapshot> snapshots;
    std::vector<std::vector<double>> per_round_losses;  // kept only on request

    double regret_vs(int j) const { return cum_chosen - final_loss_sums[j - 1]; }
    double regret_vs_best() const;
    int best_fixed_action() const;  // argmin of final loss sums, ties low
};

struct RegretOptions {
    std::vector<int> checkpoints;  // rounds at which to snapshot (ascending)
    bool keep_losses = false;
};

double hedge_default_eta(int d, int T);       // sqrt(8 ln d / T)
double bandit_gamma(int d, int T);            // min(1, sqrt(d ln d / T))
double bandit_rho_recipe(int d, int b, int T);  // min(1/4, sqrt(d/(b*T)))

// Action distribution of exponential weights at cumulative losses L:
// p_i proportional to exp(-eta * L_i).
std::vector<double> softmax_distribution(std::span<const double> cum_losses, double eta);

// Full-information exponential weights; draws its losses from `spec` unless a
// pre-drawn loss sequence is supplied (used to run both learners on the same
// data).
RegretTrace run_hedge(const BanditLossSpec& spec, int T, double eta, CounterRng& rng,
                      const RegretOptions& opt = {});
RegretTrace run_hedge(std::span<const Instance> losses, int d, double eta, CounterRng& rng,
                      const RegretOptions& opt = {});

// Exp3-style learner run as a (1,1,T) protocol: each round it picks an arm,
// and the only data reaching it is the observed loss bit, carried by the
// 1-bit message that run_protocol audits.
RegretTrace run_coordinate_bandit(const BanditLossSpec& spec, int T, CounterRng& rng,
                                  const RegretOptions& opt = {});
RegretTrace run_coordinate_bandit(std::span<const Instance> losses, int d, CounterRng& rng,
                                  const RegretOptions& opt = {});

// Debug export: one row per round, regret measured against the final best
// fixed action. Requires keep_losses.
std::string regret_trace_csv(const RegretTrace& trace);

// JSON form of a detection: {"index": i} for coordinates, {"pair": [i, j]}
// for pairs/entries (same convention as transcript_to_json).
std::string detection_to_json(const Detection& det);

// ---- Bilinear matrix game plug-in ----

struct StochoptResult {
    Detection entry;          // argmin of empirical entry means (lexicographic ties)
    double empirical_min = 0.0;
    double population_value = 0.0;  // E[Z] at the detected entry
    double population_min = 0.0;    // min over entries of E[Z]
    double gap = 0.0;               // population_value - population_min
};

StochoptResult stochopt_plugin(std::span<const Instance> samples, const MatrixOptSpec& spec);
StochoptResult stochopt_plugin(InstanceSource& src, int64_t m, const MatrixOptSpec& spec);

}  // namespace icsim

#pragma once

#include <cstdint>
#include <vector>

#include "icsim/rng.hpp"

namespace icsim {

// Every information quantity carries its log base explicitly. Entropy and
// mutual information default to bits; KL in bound checks is computed in nats
// because the bound constants come from natural-log derivations.
enum class LogBase { bits, nats };

// Finite distribution. Construction rejects (never renormalizes) anything that
// is not a distribution: negative entries, or total off 1 by more than 1e-12.
struct Pmf {
    std::vector<double> p;
    LogBase base = LogBase::bits;

    Pmf(std::vector<double> probs, LogBase b);
    int size() const { return static_cast<int>(p.size()); }
};

// Joint distribution over a tuple of finite axes, flat row-major with the last
// axis varying fastest. Axis 0 is W and axes 1..d are the sources Z_j in the
// information-budget check.
struct JointPmf {
    std::vector<int> sizes;
    std::vector<double> p;

    JointPmf(std::vector<int> axis_sizes, std::vector<double> table);
    int axes() const { return static_cast<int>(sizes.size()); }
    std::vector<double> marginal(int axis) const;
    // Flat sizes[a] x sizes[b] table, row index from axis a.
    std::vector<double> pair_marginal(int a, int b) const;
};

double entropy(const Pmf& p);

// KL(p||q); +infinity when p puts mass where q has none. Requires matching
// sizes and base tags.
double kl(const Pmf& p, const Pmf& q);

double chi2(const Pmf& p, const Pmf& q);

// L1 distance, in [0,2].
double total_variation(const Pmf& p, const Pmf& q);

double mutual_information(const JointPmf& joint, int axis_a, int axis_b, LogBase base = LogBase::bits);

struct InfoBudgetResult {
    double value_bits = 0.0;
    double bound_bits = 0.0;
    double value_nats = 0.0;
    double bound_nats = 0.0;
    bool holds = false;
};

// Checks (1/d) * sum_j I(W;Z_j) <= b/d for a joint over W x Z_1 x ... x Z_d with
// mutually independent Z's (validated) and a W alphabet of at most 2^b values.
InfoBudgetResult avg_info_budget(const JointPmf& joint, int b);

struct DragomirResult {
    double c = 1.0;
    double kl_pq_nats = 0.0;
    double kl_qp_nats = 0.0;
    double chi2_pq = 0.0;
    bool ratio_holds = false;   // KL(p||q) <= c * KL(q||p)
    bool sandwich_holds = false;   // KL(p||q) <= chi2(p||q) <= 2c * KL(p||q)
    double ratio_margin = 0.0;
    double sandwich_lower_margin = 0.0;
    double sandwich_upper_margin = 0.0;
};

// c = max_x p(x)/q(x) over the common support; requires mutual absolute
// continuity. All KL values in nats.
DragomirResult dragomir_check(const Pmf& p, const Pmf& q);

struct MomentEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int64_t trials = 0;
};

// Monte Carlo estimate of E[exp(epsilon * max_j K_j)] where K is the bin-count
// profile of n balls thrown uniformly into d bins.
MomentEstimate balls_bins_moment(int n, int d, double epsilon, int64_t trials, CounterRng& rng);

struct DetectionBound {
    double B = 0.0;
    double bound = 0.0;  // min(1, 3/d + 2B)
};

// per_j_kls holds KL(Pr0-transcript || Prj-transcript) in nats, one entry per
// hidden coordinate; B = sqrt((2/d) * sum).
DetectionBound detection_prob_bound(const std::vector<double>& per_j_kls_nats);

}  // namespace icsim

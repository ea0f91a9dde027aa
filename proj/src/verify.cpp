#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "icsim/errors.hpp"
#include "icsim/harness.hpp"
#include "icsim/infotheory.hpp"

namespace icsim {

namespace {

constexpr double kExactTol = 1e-9;

// Strictly positive random pmf with bounded entry ratios, so every ratio-based
// inequality stays finite.
std::vector<double> random_pmf(CounterRng& rng, int k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        w[i] = 0.05 + rng.next_double();
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

VerifyRow exact_row(std::string id, int64_t cases, double worst_violation) {
    VerifyRow r;
    r.id = std::move(id);
    r.kind = "exact";
    r.cases = cases;
    r.quantity = worst_violation;   // max over cases of lhs - rhs
    r.bound = 0.0;
    r.margin = -worst_violation + 0.0;  // + 0.0 keeps a zero margin from printing as -0
    r.holds = r.margin >= -kExactTol;
    return r;
}

double worst_of(const std::vector<double>& violations) {
    double w = -std::numeric_limits<double>::infinity();
    for (double v : violations) w = std::max(w, v);
    return w;
}

// ---- Individual checks ----

// min(1, 3/d + 2B) must reproduce the worked example: d = 10 transcripts at
// KL 0.02 nats each gives B = 0.2 and bound 0.7.
VerifyRow check_detection_bound_formula() {
    const DetectionBound got = detection_prob_bound(std::vector<double>(10, 0.02));
    VerifyRow r;
    r.id = "min-detection-bound-formula";
    r.kind = "exact";
    r.cases = 1;
    r.quantity = got.bound;
    r.bound = 0.7;
    r.margin = -std::abs(got.bound - r.bound) - std::abs(got.B - 0.2);
    r.holds = r.margin >= -kExactTol;
    return r;
}

// Random single-message protocols on the signed-basis family, exactly
// evaluated: the worst-case detection probability min_j Pr_j(answer = j)
// never exceeds min(1, 3/d + 2B) computed from the exact message KLs.
VerifyRow check_detection_bound_protocols(uint64_t seed, int threads) {
    constexpr int d = 4;
    constexpr int64_t kCases = 2000;
    HideSeekV2Spec base{d, 0.1, kNone};
    const int64_t a = alphabet_size(base);  // 2d letters
    constexpr int kMsgValues = 4;           // 2-bit message

    std::vector<double> violations = run_trials<double>(kCases, threads, [&](int64_t t) {
        CounterRng rng(seed, 1000000 + static_cast<uint64_t>(t));
        std::vector<int> g(static_cast<size_t>(a));
        for (auto& v : g) v = static_cast<int>(rng.uniform_int(kMsgValues));
        std::vector<int> dec(kMsgValues);
        for (auto& v : dec) v = 1 + static_cast<int>(rng.uniform_int(d));

        auto message_pmf = [&](int j) {
            HideSeekV2Spec s = base;
            s.j = j;
            std::vector<double> pw(kMsgValues, 0.0);
            for (int64_t x = 0; x < a; ++x) pw[g[static_cast<size_t>(x)]] += prob_of_index(s, x);
            return pw;
        };

        const std::vector<double> p0 = message_pmf(kNone);
        std::vector<double> kls(d);
        double min_success = 1.0;
        for (int j = 1; j <= d; ++j) {
            const std::vector<double> pj = message_pmf(j);
            kls[j - 1] = kl(Pmf(p0, LogBase::nats), Pmf(pj, LogBase::nats));
            HideSeekV2Spec s = base;
            s.j = j;
            double succ = 0.0;
            for (int64_t x = 0; x < a; ++x)
                if (dec[g[static_cast<size_t>(x)]] == j) succ += prob_of_index(s, x);
            min_success = std::min(min_success, succ);
        }
        return min_success - detection_prob_bound(kls).bound;
    });
    return exact_row("min-detection-bound-protocols", kCases, worst_of(violations));
}

// KL(p||q) <= c KL(q||p) and KL <= chi^2 <= 2c KL on random pmf pairs.
VerifyRow check_kl_ratio_sandwich(uint64_t seed, int threads) {
    constexpr int64_t kCases = 10000;
    std::vector<double> violations = run_trials<double>(kCases, threads, [&](int64_t t) {
        CounterRng rng(seed, 2000000 + static_cast<uint64_t>(t));
        const int k = 2 + static_cast<int>(rng.uniform_int(7));
        Pmf p(random_pmf(rng, k), LogBase::nats);
        Pmf q(random_pmf(rng, k), LogBase::nats);
        const DragomirResult r = dragomir_check(p, q);
        return std::max({-r.ratio_margin, -r.sandwich_lower_margin, -r.sandwich_upper_margin});
    });
    return exact_row("kl-ratio-sandwich-random", kCases, worst_of(violations));
}

// sum |p - q| <= sqrt(2 KL(p||q) in nats) on random pmf pairs.
VerifyRow check_pinsker(uint64_t seed, int threads) {
    constexpr int64_t kCases = 10000;
    std::vector<double> violations = run_trials<double>(kCases, threads, [&](int64_t t) {
        CounterRng rng(seed, 3000000 + static_cast<uint64_t>(t));
        const int k = 2 + static_cast<int>(rng.uniform_int(7));
        Pmf p(random_pmf(rng, k), LogBase::nats);
        Pmf q(random_pmf(rng, k), LogBase::nats);
        return total_variation(p, q) - std::sqrt(2.0 * kl(p, q));
    });
    return exact_row("pinsker-random", kCases, worst_of(violations));
}

// (sum a) ln(sum a / sum b) <= sum a_i ln(a_i / b_i) on random positive vectors.
VerifyRow check_log_sum(uint64_t seed, int threads) {
    constexpr int64_t kCases = 10000;
    std::vector<double> violations = run_trials<double>(kCases, threads, [&](int64_t t) {
        CounterRng rng(seed, 4000000 + static_cast<uint64_t>(t));
        const int k = 2 + static_cast<int>(rng.uniform_int(7));
        double sa = 0.0, sb = 0.0, rhs = 0.0;
        std::vector<double> a(k), b(k);
        for (int i = 0; i < k; ++i) {
            a[i] = 0.05 + 3.0 * rng.next_double();
            b[i] = 0.05 + 3.0 * rng.next_double();
            sa += a[i];
            sb += b[i];
        }
        for (int i = 0; i < k; ++i) rhs += a[i] * std::log(a[i] / b[i]);
        return sa * std::log(sa / sb) - rhs;
    });
    return exact_row("log-sum-random", kCases, worst_of(violations));
}

// Monte Carlo: E[exp(eps * max bin load)] < 13 for 12 balls in 8 bins at
// eps = 1/6; quantity is the estimate plus three standard errors.
VerifyRow check_balls_bins(uint64_t seed) {
    constexpr int64_t kTrials = 100000;
    CounterRng rng(seed, 5000000);
    const MomentEstimate e = balls_bins_moment(12, 8, 1.0 / 6.0, kTrials, rng);
    VerifyRow r;
    r.id = "max-bin-load-moment-mc";
    r.kind = "monte-carlo";
    r.cases = kTrials;
    r.quantity = e.estimate + 3.0 * e.std_error;
    r.bound = 13.0;
    r.margin = r.bound - r.quantity;
    r.holds = r.margin >= -kExactTol;
    return r;
}

// Random channels W = ch(Z) on three fair source bits: the average per-source
// information (1/d) sum_j I(W;Z_j) never exceeds b/d. Half the channels are
// deterministic, half stochastic.
VerifyRow check_info_budget(uint64_t seed, int threads, int b) {
    constexpr int64_t kCases = 500;
    const int nw = 1 << b;
    std::vector<double> violations = run_trials<double>(kCases, threads, [&](int64_t t) {
        CounterRng rng(seed, 6000000 + static_cast<uint64_t>(b) * 100000 + static_cast<uint64_t>(t));
        std::vector<double> ch(static_cast<size_t>(nw) * 8, 0.0);  // ch[w*8+z]
        if (t % 2 == 0) {
            for (int z = 0; z < 8; ++z) ch[rng.uniform_int(nw) * 8 + z] = 1.0;
        } else {
            for (int z = 0; z < 8; ++z) {
                double total = 0.0;
                for (int w = 0; w < nw; ++w) {
                    ch[static_cast<size_t>(w) * 8 + z] = 0.05 + rng.next_double();
                    total += ch[static_cast<size_t>(w) * 8 + z];
                }
                for (int w = 0; w < nw; ++w) ch[static_cast<size_t>(w) * 8 + z] /= total;
            }
        }
        std::vector<double> table(static_cast<size_t>(nw) * 8);
        for (int w = 0; w < nw; ++w)
            for (int z = 0; z < 8; ++z)
                table[static_cast<size_t>(w) * 8 + z] = 0.125 * ch[static_cast<size_t>(w) * 8 + z];
        const JointPmf joint({nw, 2, 2, 2}, table);
        const InfoBudgetResult res = avg_info_budget(joint, b);
        return res.value_bits - res.bound_bits;
    });
    return exact_row("avg-info-budget-channels-b" + std::to_string(b), kCases, worst_of(violations));
}

template <typename Spec>
VerifyRow check_sweep(std::string id, const Spec& family, double rho) {
    const SweepOutcome out = sweep_onebit_tworound(family, rho);
    VerifyRow r;
    r.id = std::move(id);
    r.kind = "exact";
    r.cases = out.protocols;
    const KlBoundCheck& worst = out.checks[static_cast<size_t>(out.worst_id)];
    r.quantity = worst.lhs_nats;
    r.bound = worst.tightest_rhs;
    r.margin = out.min_margin;
    r.holds = out.all_hold;
    return r;
}

}  // namespace

VerifyReport run_verify_suite(uint64_t seed, int threads) {
    VerifyReport rep;
    rep.rows.push_back(check_detection_bound_formula());
    rep.rows.push_back(check_detection_bound_protocols(seed, threads));
    rep.rows.push_back(check_kl_ratio_sandwich(seed, threads));
    rep.rows.push_back(check_pinsker(seed, threads));
    rep.rows.push_back(check_log_sum(seed, threads));
    rep.rows.push_back(check_balls_bins(seed));
    rep.rows.push_back(check_info_budget(seed, threads, 1));
    rep.rows.push_back(check_info_budget(seed, threads, 2));
    rep.rows.push_back(check_sweep("sign-family-transcript-sweep", HideSeekV1Spec{2, 0.1, kNone}, 0.1));
    rep.rows.push_back(check_sweep("basis-family-transcript-sweep", HideSeekV2Spec{2, 0.03, kNone}, 0.03));

    // Coverage lock: a silently dropped or renamed check must fail loudly.
    const std::vector<std::string> expected{
        "min-detection-bound-formula", "min-detection-bound-protocols",
        "kl-ratio-sandwich-random",    "pinsker-random",
        "log-sum-random",              "max-bin-load-moment-mc",
        "avg-info-budget-channels-b1", "avg-info-budget-channels-b2",
        "sign-family-transcript-sweep", "basis-family-transcript-sweep"};
    if (rep.rows.size() != expected.size())
        throw std::logic_error("verify suite: row count drifted from the catalog");
    for (size_t i = 0; i < expected.size(); ++i)
        if (rep.rows[i].id != expected[i])
            throw std::logic_error("verify suite: check catalog drifted at " + expected[i]);

    rep.all_hold = true;
    for (const VerifyRow& r : rep.rows) rep.all_hold = rep.all_hold && r.holds;
    return rep;
}

}  // namespace icsim

#include "icsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "icsim/errors.hpp"

namespace icsim {

WilsonInterval wilson_interval(int64_t successes, int64_t trials, double z) {
    if (trials < 1) throw std::invalid_argument("wilson_interval: trials must be >= 1");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: successes out of range");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
    // At p-hat = 0 or 1 the endpoint is exactly 0 or 1 algebraically; keep it so.
    if (successes == 0) w.lo = 0.0;
    if (successes == trials) w.hi = 1.0;
    return w;
}

DetectionFamily family_of(HideSeekV1Spec base) {
    base.j = kNone;
    validate(base);
    DetectionFamily f;
    f.name = "hideseek-v1";
    f.num_targets = base.d;
    f.instantiate = [base](int64_t rank) {
        HideSeekV1Spec s = base;
        s.j = static_cast<int>(rank) + 1;
        FamilyInstance fi;
        fi.sampler = [s](CounterRng& rng, Instance& out) { sample_v1(s, rng, out); };
        fi.target = Detection{s.j, 0};
        return fi;
    };
    return f;
}

DetectionFamily family_of(HideSeekV2Spec base) {
    base.j = kNone;
    validate(base);
    DetectionFamily f;
    f.name = "hideseek-v2";
    f.num_targets = base.d;
    f.instantiate = [base](int64_t rank) {
        HideSeekV2Spec s = base;
        s.j = static_cast<int>(rank) + 1;
        FamilyInstance fi;
        fi.sampler = [s](CounterRng& rng, Instance& out) { sample_v2(s, rng, out); };
        fi.target = Detection{s.j, 0};
        return fi;
    };
    return f;
}

DetectionFamily family_of(SparsePcaSpec base) {
    base.pair_i = 1;
    base.pair_j = 2;
    validate(base);
    DetectionFamily f;
    f.name = "sparse-pca";
    f.num_targets = pair_count(base.d);
    f.instantiate = [base](int64_t rank) {
        SparsePcaSpec s = base;
        auto [i, j] = pair_unrank(s.d, rank);
        s.pair_i = i;
        s.pair_j = j;
        FamilyInstance fi;
        fi.sampler = [s](CounterRng& rng, Instance& out) { sample_sparse_pca(s, rng, out); };
        fi.target = Detection{i, j};
        return fi;
    };
    return f;
}

Detector full_info_detector(int d) {
    return [d](InstanceSource& src, int64_t budget, CounterRng&) {
        return full_info_argmax(src, budget, d);
    };
}

Detector pca_plugin_detector(int d) {
    return [d](InstanceSource& src, int64_t budget, CounterRng&) {
        return pca_plugin(src, budget, d);
    };
}

Detector scan_detector_budget(int d, int segment_size, double rho) {
    return [d, segment_size, rho](InstanceSource& src, int64_t budget, CounterRng&) -> Detection {
        ScanParams prm;
        try {
            prm = dense_scan_params_budget(d, segment_size, rho, budget);
        } catch (const InsufficientData&) {
            return Detection{0, 0};  // budget below one instance per segment: guaranteed miss
        }
        return run_scan(prm, src);
    };
}

Detector scan_detector_delta(int d, int b, double rho, double delta) {
    const ScanParams prm = dense_scan_params(d, b, rho, delta);
    return [prm, b](InstanceSource& src, int64_t budget, CounterRng&) -> Detection {
        if (budget < prm.total_instances())
            throw InsufficientData("scan needs " + std::to_string(prm.total_instances()) +
                                   " instances, budget is " + std::to_string(budget));
        ScanProtocol proto(prm);
        ProtocolSpec spec = proto.protocol_spec();
        spec.b = b;
        CounterRng poisoned = CounterRng::poisoned();
        return run_protocol(proto, spec, src, poisoned).final_output;
    };
}

Detector pair_scan_detector_budget(int d, int segment_size, double rho_pca) {
    return [d, segment_size, rho_pca](InstanceSource& src, int64_t budget,
                                      CounterRng&) -> Detection {
        ScanParams prm;
        try {
            prm = pair_scan_params_budget(d, segment_size, rho_pca, budget);
        } catch (const InsufficientData&) {
            return Detection{0, 0};
        }
        return run_scan(prm, src);
    };
}

Detector pair_scan_detector_delta(int d, int b, double rho_pca, double delta) {
    const ScanParams prm = pair_scan_params(d, b, rho_pca, delta);
    return [prm, b](InstanceSource& src, int64_t budget, CounterRng&) -> Detection {
        if (budget < prm.total_instances())
            throw InsufficientData("pair scan needs " + std::to_string(prm.total_instances()) +
                                   " instances, budget is " + std::to_string(budget));
        ScanProtocol proto(prm);
        ProtocolSpec spec = proto.protocol_spec();
        spec.b = b;
        CounterRng poisoned = CounterRng::poisoned();
        return run_protocol(proto, spec, src, poisoned).final_output;
    };
}

SuccessEstimate estimate_success_prob(const DetectionFamily& family, const Detector& algorithm,
                                      int64_t budget, int64_t trials, uint64_t seed, int threads) {
    if (family.num_targets < 1)
        throw std::invalid_argument("estimate_success_prob: family has no targets");
    if (trials < 1) throw std::invalid_argument("estimate_success_prob: trials must be >= 1");

    struct Slot {
        int64_t rank = 0;
        bool ok = false;
    };
    // Streams 3t / 3t+1 / 3t+2: target draw, data, algorithm randomness. Each
    // trial is a pure function of (seed, t), so any thread count gives the
    // same slots.
    std::vector<Slot> slots = run_trials<Slot>(trials, threads, [&](int64_t t) -> Slot {
        const uint64_t u = static_cast<uint64_t>(t);
        CounterRng pick(seed, 3 * u);
        const int64_t rank = pick.uniform_int(family.num_targets);
        FamilyInstance inst = family.instantiate(rank);
        SamplerSource src(inst.sampler, CounterRng(seed, 3 * u + 1));
        CounterRng algo_rng(seed, 3 * u + 2);
        const Detection got = algorithm(src, budget, algo_rng);
        return Slot{rank, got == inst.target};
    });

    SuccessEstimate est;
    est.trials = trials;
    est.target_trials.assign(family.num_targets, 0);
    est.target_successes.assign(family.num_targets, 0);
    for (const Slot& s : slots) {
        ++est.target_trials[s.rank];
        if (s.ok) {
            ++est.successes;
            ++est.target_successes[s.rank];
        }
    }
    est.p_hat = static_cast<double>(est.successes) / static_cast<double>(trials);
    est.ci = wilson_interval(est.successes, trials);
    return est;
}

ThresholdResult find_sample_threshold(const DetectionFamily& family, const Detector& algorithm,
                                      double target, int64_t m_lo, int64_t m_hi,
                                      int64_t trials_per_probe, uint64_t seed, int threads) {
    if (m_lo < 1 || m_hi < m_lo)
        throw std::invalid_argument("find_sample_threshold: need 1 <= m_lo <= m_hi");
    if (!(target > 0.0) || !(target < 1.0))
        throw std::invalid_argument("find_sample_threshold: target must lie in (0,1)");

    ThresholdResult res;
    auto probe = [&](int64_t m) {
        SuccessEstimate e = estimate_success_prob(family, algorithm, m, trials_per_probe, seed, threads);
        res.probes.push_back(ThresholdProbe{m, e.successes, e.trials, e.p_hat});
        return e.p_hat;
    };

    if (probe(m_lo) >= target) {
        res.m_star = res.bracket_lo = res.bracket_hi = m_lo;
    } else {
        if (probe(m_hi) < target)
            throw TargetNotBracketed("success at m_hi=" + std::to_string(m_hi) +
                                     " is below the target");
        int64_t lo = m_lo, hi = m_hi;
        while ((hi - lo) * 20 > (hi + lo)) {  // bracket width > 10% of midpoint
            const int64_t mid = lo + (hi - lo) / 2;
            if (mid == lo || mid == hi) break;
            if (probe(mid) >= target) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        res.bracket_lo = lo;
        res.bracket_hi = hi;
        res.m_star = (lo + hi) / 2;
    }

    std::vector<ThresholdProbe> sorted = res.probes;
    std::sort(sorted.begin(), sorted.end(),
              [](const ThresholdProbe& a, const ThresholdProbe& b) { return a.m < b.m; });
    res.monotone = true;
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].p_hat < sorted[i - 1].p_hat) res.monotone = false;
    return res;
}

double v1_success_lower_bound(int d, int64_t mn, double rho) {
    return 1.0 - 2.0 * d * std::exp(-0.5 * static_cast<double>(mn) * rho * rho);
}

int64_t v1_sample_bound(int d, double rho, double delta) {
    if (!(rho > 0.0) || !(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("v1_sample_bound: need rho > 0 and delta in (0,1)");
    return static_cast<int64_t>(std::ceil(2.0 * std::log(2.0 * d / delta) / (rho * rho)));
}

double pca_success_lower_bound(int d, int64_t m, double tau) {
    return 1.0 - static_cast<double>(d) * d * std::exp(-static_cast<double>(m) * tau * tau / 6.0);
}

int64_t pca_sample_bound(int d, double tau, double delta) {
    if (!(tau > 0.0) || !(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("pca_sample_bound: need tau > 0 and delta in (0,1)");
    return static_cast<int64_t>(
        std::ceil(6.0 * std::log(static_cast<double>(d) * d / delta) / (tau * tau)));
}

double hedge_regret_cap(int d, int T) {
    return 2.0 * std::sqrt(static_cast<double>(T) * std::log(static_cast<double>(d)));
}

double bandit_regret_floor(int d, int T) {
    return 0.05 * std::sqrt(static_cast<double>(d) * static_cast<double>(T));
}

namespace {

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe r;
    const size_t n = xs.size();
    if (n == 0) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - r.mean) * (x - r.mean);
        r.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return r;
}

}  // namespace

RegretExperimentResult run_regret_experiment(const RegretConfig& cfg) {
    validate(cfg.spec);
    if (cfg.T < 1) throw std::invalid_argument("regret experiment: T must be >= 1");
    if (cfg.trials < 1) throw std::invalid_argument("regret experiment: trials must be >= 1");

    std::vector<int> cps = cfg.checkpoints;
    if (cps.empty()) {
        for (int k = 1; k <= 4; ++k) {
            const int t = static_cast<int>((static_cast<int64_t>(cfg.T) * k) / 4);
            if (t >= 1 && (cps.empty() || cps.back() != t)) cps.push_back(t);
        }
    }
    for (size_t i = 0; i < cps.size(); ++i) {
        if (cps[i] < 1 || cps[i] > cfg.T || (i > 0 && cps[i] <= cps[i - 1]))
            throw std::invalid_argument("regret experiment: checkpoints must be ascending in 1..T");
    }

    const int d = cfg.spec.d;
    const double eta = hedge_default_eta(d, cfg.T);
    const int biased = cfg.spec.j;

    struct Slot {
        double hedge_best = 0, hedge_biased = 0, bandit_best = 0, bandit_biased = 0;
        std::vector<double> cp_hedge, cp_bandit;  // vs the biased arm
    };
    RegretOptions opt;
    opt.checkpoints = cps;

    std::vector<Slot> slots = run_trials<Slot>(cfg.trials, cfg.threads, [&](int64_t t) -> Slot {
        const uint64_t u = static_cast<uint64_t>(t);
        CounterRng data(cfg.seed, 3 * u);
        std::vector<Instance> losses(cfg.T);
        for (int r = 0; r < cfg.T; ++r) sample_bandit_loss(cfg.spec, data, losses[r]);

        CounterRng hedge_rng(cfg.seed, 3 * u + 1);
        RegretTrace h = run_hedge(std::span<const Instance>(losses), d, eta, hedge_rng, opt);
        CounterRng bandit_rng(cfg.seed, 3 * u + 2);
        RegretTrace b = run_coordinate_bandit(std::span<const Instance>(losses), d, bandit_rng, opt);

        Slot s;
        s.hedge_best = h.regret_vs_best();
        s.hedge_biased = h.regret_vs(biased);
        s.bandit_best = b.regret_vs_best();
        s.bandit_biased = b.regret_vs(biased);
        s.cp_hedge.reserve(cps.size());
        s.cp_bandit.reserve(cps.size());
        for (size_t k = 0; k < cps.size(); ++k) {
            s.cp_hedge.push_back(h.snapshots[k].cum_chosen - h.snapshots[k].loss_sums[biased - 1]);
            s.cp_bandit.push_back(b.snapshots[k].cum_chosen - b.snapshots[k].loss_sums[biased - 1]);
        }
        return s;
    });

    auto collect = [&](auto&& get) {
        std::vector<double> v;
        v.reserve(slots.size());
        for (const Slot& s : slots) v.push_back(get(s));
        return mean_se(v);
    };

    RegretExperimentResult res;
    res.config = cfg;
    res.config.checkpoints = cps;
    res.hedge_vs_best = collect([](const Slot& s) { return s.hedge_best; });
    res.hedge_vs_biased = collect([](const Slot& s) { return s.hedge_biased; });
    res.bandit_vs_best = collect([](const Slot& s) { return s.bandit_best; });
    res.bandit_vs_biased = collect([](const Slot& s) { return s.bandit_biased; });
    for (size_t k = 0; k < cps.size(); ++k) {
        RegretCurvePoint pt;
        pt.t = cps[k];
        pt.hedge_vs_biased = collect([k](const Slot& s) { return s.cp_hedge[k]; });
        pt.bandit_vs_biased = collect([k](const Slot& s) { return s.cp_bandit[k]; });
        res.curve.push_back(pt);
    }
    return res;
}

TableProtocol::TableProtocol(Indexer indexer, int bits, std::vector<std::vector<uint8_t>> tables,
                             std::vector<int> decision)
    : indexer_(std::move(indexer)),
      bits_(bits),
      tables_(std::move(tables)),
      decision_(std::move(decision)) {
    if (bits_ < 1 || bits_ > 16) throw std::invalid_argument("table protocol: bits must be 1..16");
    if (tables_.empty()) throw std::invalid_argument("table protocol: needs at least one table");
}

Message TableProtocol::step(std::span<const Instance> batch, const std::vector<Message>& prior,
                            CounterRng&) {
    if (batch.size() != 1) throw std::invalid_argument("table protocol handles batches of 1 only");
    const size_t t = prior.size();
    if (t >= tables_.size()) throw std::invalid_argument("table protocol: more rounds than tables");
    const int64_t x = indexer_(batch[0]);
    size_t slot = static_cast<size_t>(x);
    if (t > 0) {
        const uint64_t w_prev = prior.back().read_bits(0, bits_);
        slot = slot * (size_t(1) << bits_) + w_prev;
    }
    if (slot >= tables_[t].size()) throw std::out_of_range("table protocol: lookup out of range");
    Message m;
    m.append_bits(tables_[t][slot], bits_);
    return m;
}

Detection TableProtocol::finish(const std::vector<Message>& messages) {
    if (decision_.empty() || messages.empty()) return Detection{1, 0};
    const uint64_t w = messages.back().read_bits(0, bits_);
    if (w >= decision_.size()) return Detection{1, 0};
    return Detection{decision_[w], 0};
}

namespace {

template <typename Spec>
SweepOutcome sweep_core(const Spec& family, double rho) {
    Spec ref = family;
    ref.j = kNone;
    validate(ref);
    const int64_t a = alphabet_size(ref);
    if (a > 4)
        throw EnumerationTooLarge("sweep enumerates 2^(3a) protocols; needs alphabet <= 4");
    const int64_t n1 = int64_t(1) << a;
    const int64_t n2 = int64_t(1) << (2 * a);

    SweepOutcome out;
    out.protocols = n1 * n2;
    out.checks.resize(static_cast<size_t>(out.protocols));
    out.max_lhs = -std::numeric_limits<double>::infinity();
    out.min_margin = std::numeric_limits<double>::infinity();
    const ProtocolSpec pspec{1, 1, 2};

    for (int64_t g1 = 0; g1 < n1; ++g1) {
        std::vector<uint8_t> t1(static_cast<size_t>(a));
        for (int64_t x = 0; x < a; ++x) t1[x] = (g1 >> x) & 1;
        for (int64_t g2 = 0; g2 < n2; ++g2) {
            std::vector<uint8_t> t2(static_cast<size_t>(2 * a));
            for (int64_t s = 0; s < 2 * a; ++s) t2[s] = (g2 >> s) & 1;
            const int64_t id = g1 * n2 + g2;
            auto make = [&ref, &t1, &t2]() -> std::unique_ptr<Protocol> {
                return std::make_unique<TableProtocol>(
                    [&ref](const Instance& x) { return index_of_instance(ref, x); }, 1,
                    std::vector<std::vector<uint8_t>>{t1, t2});
            };
            KlBoundCheck c = transcript_kl_bound_check(make, pspec, family, rho);
            if (c.lhs_nats > out.max_lhs) out.max_lhs = c.lhs_nats;
            if (c.margin < out.min_margin) {
                out.min_margin = c.margin;
                out.worst_id = id;
            }
            out.all_hold = out.all_hold && c.holds;
            out.checks[static_cast<size_t>(id)] = std::move(c);
        }
    }
    return out;
}

}  // namespace

SweepOutcome sweep_onebit_tworound(const HideSeekV1Spec& family, double rho) {
    return sweep_core(family, rho);
}

SweepOutcome sweep_onebit_tworound(const HideSeekV2Spec& family, double rho) {
    return sweep_core(family, rho);
}

}  // namespace icsim

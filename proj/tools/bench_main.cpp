// Benchmark: the same experiment kernels run on the serial reference path
// (threads = 1) and the OpenMP path, timing both and insisting the results
// are identical — the slot-array design makes thread count an implementation
// detail, and this binary is the proof.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "icsim/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

template <typename Fn>
double seconds(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

struct BenchRow {
    std::string name;
    double serial_s = 0.0;
    double parallel_s = 0.0;
    bool identical = false;
};

int parallel_threads() {
#ifdef _OPENMP
    const int hw = omp_get_max_threads();
    return hw > 1 ? hw : 2;  // still exercise the OpenMP path on 1-core hosts
#else
    return 1;
#endif
}

}  // namespace

int main() {
    using namespace icsim;
    const uint64_t seed = 20240817;
    const int nt = parallel_threads();
    std::vector<BenchRow> rows;

    {
        BenchRow r;
        r.name = "hideseek d=64 m=2100 trials=400";
        DetectionFamily family = family_of(HideSeekV1Spec{64, 0.1, kNone});
        Detector det = full_info_detector(64);
        SuccessEstimate a, b;
        r.serial_s = seconds([&] { a = estimate_success_prob(family, det, 2100, 400, seed, 1); });
        r.parallel_s = seconds([&] { b = estimate_success_prob(family, det, 2100, 400, seed, nt); });
        r.identical = a.successes == b.successes && a.target_successes == b.target_successes;
        rows.push_back(r);
    }

    {
        BenchRow r;
        r.name = "regret d=16 T=5000 trials=16";
        RegretConfig cfg;
        cfg.spec = BanditLossSpec{16, 0.05, 1};
        cfg.T = 5000;
        cfg.trials = 16;
        cfg.seed = seed;
        RegretExperimentResult a, b;
        cfg.threads = 1;
        r.serial_s = seconds([&] { a = run_regret_experiment(cfg); });
        cfg.threads = nt;
        r.parallel_s = seconds([&] { b = run_regret_experiment(cfg); });
        r.identical = a.hedge_vs_best.mean == b.hedge_vs_best.mean &&
                      a.bandit_vs_best.mean == b.bandit_vs_best.mean &&
                      a.hedge_vs_biased.se == b.hedge_vs_biased.se &&
                      a.bandit_vs_biased.se == b.bandit_vs_biased.se;
        rows.push_back(r);
    }

    {
        BenchRow r;
        r.name = "pairscan d=24 trials=40";
        DetectionFamily family = family_of(SparsePcaSpec{24, 0.25, 1, 2});
        Detector det = pair_scan_detector_budget(24, 16, 0.25);
        const int64_t budget = 20000;
        SuccessEstimate a, b;
        r.serial_s = seconds([&] { a = estimate_success_prob(family, det, budget, 40, seed, 1); });
        r.parallel_s = seconds([&] { b = estimate_success_prob(family, det, budget, 40, seed, nt); });
        r.identical = a.successes == b.successes && a.target_successes == b.target_successes;
        rows.push_back(r);
    }

    std::printf("%-36s %10s %10s %8s %9s\n", "workload", "serial_s", "par_s", "speedup", "identical");
    bool all_ok = true;
    for (const BenchRow& r : rows) {
        std::printf("%-36s %10.3f %10.3f %8.2f %9s\n", r.name.c_str(), r.serial_s, r.parallel_s,
                    r.parallel_s > 0 ? r.serial_s / r.parallel_s : 0.0, r.identical ? "yes" : "NO");
        all_ok = all_ok && r.identical;
    }
    std::printf("threads on parallel path: %d\n", nt);
    if (!all_ok) {
        std::printf("MISMATCH: parallel results differ from the serial reference\n");
        return 1;
    }
    return 0;
}

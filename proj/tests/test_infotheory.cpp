#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "icsim/errors.hpp"
#include "icsim/infotheory.hpp"
#include "icsim/rng.hpp"

using namespace icsim;

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Pmf random_pmf(CounterRng& rng, int k, LogBase base) {
    std::vector<double> w(k);
    double total = 0.0;
    for (double& x : w) {
        x = 0.05 + rng.next_double();
        total += x;
    }
    for (double& x : w) x /= total;
    // Nudge the largest entry so the total is 1 up to the last ulp.
    double sum = 0.0;
    for (double x : w) sum += x;
    w[0] += 1.0 - sum;
    return Pmf(w, base);
}

}  // namespace

TEST_CASE("pmf construction rejects non-distributions") {
    CHECK_NOTHROW(Pmf({0.25, 0.75}, LogBase::bits));
    CHECK_THROWS_AS(Pmf({0.5, 0.6}, LogBase::bits), std::invalid_argument);
    CHECK_THROWS_AS(Pmf({-0.1, 1.1}, LogBase::bits), std::invalid_argument);
    CHECK_THROWS_AS(Pmf({}, LogBase::bits), std::invalid_argument);
}

TEST_CASE("entropy of a 1/4-3/4 coin is 0.811278 bits") {
    CHECK(close(entropy(Pmf({0.25, 0.75}, LogBase::bits)), 0.8112781244591328, 1e-12));
    CHECK(close(entropy(Pmf({0.25, 0.25, 0.25, 0.25}, LogBase::bits)), 2.0, 1e-12));
    CHECK(close(entropy(Pmf({0.25, 0.25, 0.25, 0.25}, LogBase::nats)), std::log(4.0), 1e-12));
    CHECK(entropy(Pmf({1.0, 0.0}, LogBase::bits)) == 0.0);
}

TEST_CASE("KL of a fair coin against a 3/4 coin is -0.5 ln(3/4) nats") {
    double v = kl(Pmf({0.5, 0.5}, LogBase::nats), Pmf({0.75, 0.25}, LogBase::nats));
    CHECK(close(v, 0.14384103622589042, 1e-12));
    // Same number as -(1/2) ln(1 - 4 rho^2) at rho = 1/4.
    CHECK(close(v, -0.5 * std::log(1.0 - 4.0 * 0.25 * 0.25), 1e-12));
    // Bits tag divides by ln 2.
    double vb = kl(Pmf({0.5, 0.5}, LogBase::bits), Pmf({0.75, 0.25}, LogBase::bits));
    CHECK(close(vb, v / std::log(2.0), 1e-12));
}

TEST_CASE("KL is +infinity exactly when p charges a q-null cell") {
    double v = kl(Pmf({0.5, 0.5}, LogBase::nats), Pmf({1.0, 0.0}, LogBase::nats));
    CHECK(std::isinf(v));
    // q-null cells with p = 0 contribute nothing.
    double w = kl(Pmf({1.0, 0.0}, LogBase::nats), Pmf({0.5, 0.5}, LogBase::nats));
    CHECK(close(w, std::log(2.0), 1e-12));
}

TEST_CASE("KL rejects mismatched sizes or base tags") {
    Pmf p({0.5, 0.5}, LogBase::nats);
    Pmf q3({0.2, 0.3, 0.5}, LogBase::nats);
    Pmf qb({0.5, 0.5}, LogBase::bits);
    CHECK_THROWS_AS(kl(p, q3), DimensionMismatch);
    CHECK_THROWS_AS(kl(p, qb), DimensionMismatch);
}

TEST_CASE("chi-square of a fair coin against a 3/4 coin is 1/3") {
    double v = chi2(Pmf({0.5, 0.5}, LogBase::nats), Pmf({0.75, 0.25}, LogBase::nats));
    CHECK(close(v, 1.0 / 3.0, 1e-12));
    CHECK_THROWS_AS(chi2(Pmf({0.5, 0.5}, LogBase::nats), Pmf({1.0, 0.0}, LogBase::nats)),
                    DivisionByZeroSupport);
}

TEST_CASE("two-point perturbation has chi-square 4 eps^2 against uniform") {
    const double eps = 0.1;
    double v = chi2(Pmf({0.5 + eps, 0.5 - eps}, LogBase::nats), Pmf({0.5, 0.5}, LogBase::nats));
    CHECK(close(v, 4.0 * eps * eps, 1e-12));
}

TEST_CASE("total variation uses the L1 convention") {
    double v = total_variation(Pmf({0.5, 0.5}, LogBase::nats), Pmf({0.75, 0.25}, LogBase::nats));
    CHECK(close(v, 0.5, 1e-12));
    double w = total_variation(Pmf({1.0, 0.0}, LogBase::nats), Pmf({0.0, 1.0}, LogBase::nats));
    CHECK(close(w, 2.0, 1e-12));
}

TEST_CASE("KL adds across independent products (chain rule)") {
    CounterRng rng(100, 0);
    for (int rep = 0; rep < 50; ++rep) {
        Pmf p1 = random_pmf(rng, 3, LogBase::nats), p2 = random_pmf(rng, 4, LogBase::nats);
        Pmf q1 = random_pmf(rng, 3, LogBase::nats), q2 = random_pmf(rng, 4, LogBase::nats);
        std::vector<double> pj, qj;
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 4; ++c) {
                pj.push_back(p1.p[a] * p2.p[c]);
                qj.push_back(q1.p[a] * q2.p[c]);
            }
        double joint = kl(Pmf(pj, LogBase::nats), Pmf(qj, LogBase::nats));
        CHECK(close(joint, kl(p1, q1) + kl(p2, q2), 1e-10));
    }
}

TEST_CASE("KL is jointly convex in its arguments") {
    CounterRng rng(101, 0);
    for (int rep = 0; rep < 10000; ++rep) {
        Pmf p1 = random_pmf(rng, 4, LogBase::nats), p2 = random_pmf(rng, 4, LogBase::nats);
        Pmf q1 = random_pmf(rng, 4, LogBase::nats), q2 = random_pmf(rng, 4, LogBase::nats);
        double lam = rng.next_double();
        std::vector<double> pm(4), qm(4);
        for (int a = 0; a < 4; ++a) {
            pm[a] = lam * p1.p[a] + (1.0 - lam) * p2.p[a];
            qm[a] = lam * q1.p[a] + (1.0 - lam) * q2.p[a];
        }
        double mixed = kl(Pmf(pm, LogBase::nats), Pmf(qm, LogBase::nats));
        double convex = lam * kl(p1, q1) + (1.0 - lam) * kl(p2, q2);
        CHECK(mixed <= convex + 1e-9);
    }
}

TEST_CASE("joint pmf marginals and mutual information behave") {
    // W uniform bit; Z1 = W (perfect copy); Z2 independent fair bit.
    // Row-major over (W, Z1, Z2).
    std::vector<double> table = {
        0.25, 0.25, 0.0, 0.0,  // W=0: (Z1=0,Z2=0), (0,1), (1,0), (1,1)
        0.0, 0.0, 0.25, 0.25,  // W=1
    };
    JointPmf joint({2, 2, 2}, table);
    CHECK(joint.axes() == 3);
    CHECK(joint.marginal(0) == std::vector<double>{0.5, 0.5});
    CHECK(joint.marginal(1) == std::vector<double>{0.5, 0.5});
    CHECK(joint.marginal(2) == std::vector<double>{0.5, 0.5});
    std::vector<double> pm = joint.pair_marginal(0, 1);
    CHECK(pm == std::vector<double>{0.5, 0.0, 0.0, 0.5});

    CHECK(close(mutual_information(joint, 0, 1), 1.0, 1e-12));             // perfect copy: 1 bit
    CHECK(close(mutual_information(joint, 0, 2), 0.0, 1e-12));             // independent: 0
    CHECK(close(mutual_information(joint, 0, 1, LogBase::nats), std::log(2.0), 1e-12));
}

TEST_CASE("mutual information is symmetric, nonnegative, and capped by marginal entropy") {
    CounterRng rng(102, 0);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> t(6);
        double total = 0.0;
        for (double& x : t) {
            x = 0.05 + rng.next_double();
            total += x;
        }
        for (double& x : t) x /= total;
        double sum = 0.0;
        for (double x : t) sum += x;
        t[0] += 1.0 - sum;
        JointPmf joint({2, 3}, t);
        double mi = mutual_information(joint, 0, 1);
        CHECK(mi >= 0.0);
        CHECK(close(mi, mutual_information(joint, 1, 0), 1e-12));
        CHECK(mi <= entropy(Pmf(joint.marginal(0), LogBase::bits)) + 1e-12);
        CHECK(mi <= entropy(Pmf(joint.marginal(1), LogBase::bits)) + 1e-12);
    }
}

TEST_CASE("information budget: a perfect b-bit copy of one source meets the cap with equality") {
    // W = Z1 exactly, Z2 and Z3 independent fair bits; b = 1, d = 3 sources.
    std::vector<double> table(16, 0.0);
    for (int z1 = 0; z1 < 2; ++z1)
        for (int z2 = 0; z2 < 2; ++z2)
            for (int z3 = 0; z3 < 2; ++z3) {
                int w = z1;
                table[((w * 2 + z1) * 2 + z2) * 2 + z3] = 0.125;
            }
    InfoBudgetResult r = avg_info_budget(JointPmf({2, 2, 2, 2}, table), 1);
    CHECK(close(r.value_bits, 1.0 / 3.0, 1e-12));
    CHECK(close(r.bound_bits, 1.0 / 3.0, 1e-12));
    CHECK(close(r.value_nats, std::log(2.0) / 3.0, 1e-12));
    CHECK(r.holds);
}

TEST_CASE("information budget rejects dependent sources and oversized alphabets") {
    // Z1 = Z2 (dependent): not a product of sources.
    std::vector<double> dep(8, 0.0);
    dep[((0 * 2 + 0) * 2 + 0)] = 0.5;  // W=0, Z1=0, Z2=0
    dep[((1 * 2 + 1) * 2 + 1)] = 0.5;  // W=1, Z1=1, Z2=1
    CHECK_THROWS_AS(avg_info_budget(JointPmf({2, 2, 2}, dep), 1), NotIndependent);

    // |W| = 4 > 2^1.
    std::vector<double> big(8, 0.125);
    CHECK_THROWS_AS(avg_info_budget(JointPmf({4, 2}, big), 1), AlphabetTooLarge);
}

TEST_CASE("ratio and sandwich inequalities: equal distributions sit at the trivial point") {
    Pmf p({0.3, 0.7}, LogBase::nats);
    DragomirResult r = dragomir_check(p, p);
    CHECK(close(r.c, 1.0, 1e-12));
    CHECK(r.kl_pq_nats == 0.0);
    CHECK(r.kl_qp_nats == 0.0);
    CHECK(r.chi2_pq == 0.0);
    CHECK(r.ratio_holds);
    CHECK(r.sandwich_holds);
}

TEST_CASE("ratio and sandwich inequalities hold strictly off the diagonal") {
    DragomirResult r = dragomir_check(Pmf({0.6, 0.4}, LogBase::nats), Pmf({0.4, 0.6}, LogBase::nats));
    CHECK(close(r.c, 1.5, 1e-12));
    CHECK(r.ratio_holds);
    CHECK(r.sandwich_holds);
    CHECK(r.ratio_margin >= 0.0);
    CHECK(r.sandwich_lower_margin >= 0.0);
    CHECK(r.sandwich_upper_margin >= 0.0);
    CHECK(r.kl_pq_nats > 0.0);
    CHECK_THROWS_AS(dragomir_check(Pmf({0.5, 0.5, 0.0}, LogBase::nats),
                                   Pmf({0.5, 0.0, 0.5}, LogBase::nats)),
                    UnboundedRatio);
}

TEST_CASE("ratio and sandwich inequalities survive a random sweep") {
    CounterRng rng(103, 0);
    for (int rep = 0; rep < 2000; ++rep) {
        int k = 2 + static_cast<int>(rng.uniform_int(5));
        Pmf p = random_pmf(rng, k, LogBase::nats);
        Pmf q = random_pmf(rng, k, LogBase::nats);
        DragomirResult r = dragomir_check(p, q);
        CHECK(r.ratio_holds);
        CHECK(r.sandwich_holds);
    }
}

TEST_CASE("max-load moment: degenerate corners are exact") {
    // One ball: max load is 1 whatever d is, so the moment is exp(eps) exactly.
    CounterRng rng(104, 0);
    MomentEstimate one = balls_bins_moment(1, 8, 1.0 / 6.0, 200, rng);
    CHECK(close(one.estimate, 1.1813604128656459, 1e-12));
    CHECK(one.std_error == 0.0);
    CHECK(one.trials == 200);
    // One bin: max load is n.
    MomentEstimate bin = balls_bins_moment(5, 1, 0.2, 100, rng);
    CHECK(close(bin.estimate, 2.718281828459045, 1e-12));
}

TEST_CASE("max-load moment stays under 13 in the balanced regime") {
    CounterRng rng(105, 0);
    MomentEstimate r = balls_bins_moment(12, 8, 1.0 / 6.0, 20000, rng);
    CHECK(r.estimate + 3.0 * r.std_error < 13.0);
    CHECK(r.estimate > 1.0);
}

TEST_CASE("detection probability bound: formula, clamp, and guards") {
    DetectionBound b = detection_prob_bound(std::vector<double>(10, 0.02));
    CHECK(close(b.B, 0.2, 1e-12));
    CHECK(close(b.bound, 0.7, 1e-12));
    DetectionBound zero = detection_prob_bound(std::vector<double>(10, 0.0));
    CHECK(close(zero.bound, 0.3, 1e-12));
    DetectionBound huge = detection_prob_bound(std::vector<double>(4, 50.0));
    CHECK(huge.bound == 1.0);
    CHECK_THROWS_AS(detection_prob_bound(std::vector<double>(1, 0.1)), std::invalid_argument);
    CHECK_THROWS_AS(detection_prob_bound({}), std::invalid_argument);
}

TEST_CASE("Pinsker: total variation is at most sqrt(2 KL) in nats") {
    CounterRng rng(106, 0);
    for (int rep = 0; rep < 2000; ++rep) {
        int k = 2 + static_cast<int>(rng.uniform_int(5));
        Pmf p = random_pmf(rng, k, LogBase::nats);
        Pmf q = random_pmf(rng, k, LogBase::nats);
        CHECK(total_variation(p, q) <= std::sqrt(2.0 * kl(p, q)) + 1e-9);
    }
}

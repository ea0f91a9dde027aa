#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "icsim/distributions.hpp"
#include "icsim/errors.hpp"
#include "icsim/rng.hpp"

using namespace icsim;

namespace {
bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("spec validation accepts legal specs and rejects the rest") {
    CHECK_NOTHROW(validate(HideSeekV1Spec{4, 0.2, 0}));
    CHECK_NOTHROW(validate(HideSeekV1Spec{4, 0.5, 4}));
    CHECK_THROWS_AS(validate(HideSeekV1Spec{0, 0.1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(HideSeekV1Spec{4, 0.6, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(HideSeekV1Spec{4, -0.1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(HideSeekV1Spec{4, 0.1, 5}), std::invalid_argument);

    CHECK_NOTHROW(validate(HideSeekV2Spec{3, 0.3, 2}));
    CHECK_THROWS_AS(validate(HideSeekV2Spec{3, 0.3, 4}), std::invalid_argument);

    CHECK_NOTHROW(validate(BanditLossSpec{3, 0.25, 1}));
    CHECK_THROWS_AS(validate(BanditLossSpec{3, 0.3, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(BanditLossSpec{3, 0.1, 0}), std::invalid_argument);

    CHECK_NOTHROW(validate(SparsePcaSpec{5, 0.25, 2, 4}));
    CHECK_THROWS_AS(validate(SparsePcaSpec{5, 0.25, 4, 2}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SparsePcaSpec{5, 0.25, 2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SparsePcaSpec{5, 0.5, 1, 2}), std::invalid_argument);

    CHECK_NOTHROW(validate(MatrixOptSpec{3, -1.0, 2, 2}));
    CHECK_THROWS_AS(validate(MatrixOptSpec{3, 1.5, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(MatrixOptSpec{3, 0.0, 0, 1}), std::invalid_argument);
}

TEST_CASE("sign-family samples have the right shape and the planted coordinate's bias") {
    HideSeekV1Spec s{4, 0.2, 3};
    CounterRng rng(11, 0);
    const int N = 40000;
    std::vector<double> sum(4, 0.0);
    Instance x;
    for (int t = 0; t < N; ++t) {
        sample_v1(s, rng, x);
        REQUIRE(x.kind == InstanceKind::dense_sign);
        REQUIRE(x.dense.size() == 4);
        for (int k = 0; k < 4; ++k) {
            REQUIRE((x.dense[k] == 1 || x.dense[k] == -1));
            sum[k] += x.dense[k];
        }
    }
    std::vector<double> mu = population_mean(s);
    CHECK(mu == std::vector<double>{0.0, 0.0, 0.4, 0.0});
    for (int k = 0; k < 4; ++k) CHECK(close(sum[k] / N, mu[k], 0.025));
}

TEST_CASE("basis-family samples are one-hot signed basis vectors with the planted tilt") {
    HideSeekV2Spec s{4, 0.2, 2};
    CounterRng rng(12, 0);
    const int N = 60000;
    std::vector<double> sum(4, 0.0);
    std::vector<int64_t> plus_j(1, 0);
    Instance x;
    for (int t = 0; t < N; ++t) {
        sample_v2(s, rng, x);
        REQUIRE(x.kind == InstanceKind::sparse_pair);
        REQUIRE(x.nsparse == 1);
        REQUIRE(x.sparse[0].index >= 1);
        REQUIRE(x.sparse[0].index <= 4);
        REQUIRE((x.sparse[0].value == 1.0 || x.sparse[0].value == -1.0));
        sum[x.sparse[0].index - 1] += x.sparse[0].value;
        if (x.sparse[0].index == 2 && x.sparse[0].value > 0) ++plus_j[0];
    }
    std::vector<double> mu = population_mean(s);
    CHECK(mu[1] == 0.1);  // 2 rho / d
    for (int k = 0; k < 4; ++k) CHECK(close(sum[k] / N, mu[k], 0.02));
    // Pr(+e_j) = 1/(2d) + rho/d = 0.175
    CHECK(close(static_cast<double>(plus_j[0]) / N, 0.175, 0.01));
}

TEST_CASE("loss samples are 0/1 with the planted coordinate lighter") {
    BanditLossSpec s{3, 0.2, 2};
    CounterRng rng(13, 0);
    const int N = 40000;
    std::vector<double> sum(3, 0.0);
    Instance x;
    for (int t = 0; t < N; ++t) {
        sample_bandit_loss(s, rng, x);
        REQUIRE(x.kind == InstanceKind::binary_loss);
        REQUIRE(x.dense.size() == 3);
        for (int k = 0; k < 3; ++k) {
            REQUIRE((x.dense[k] == 0 || x.dense[k] == 1));
            sum[k] += x.dense[k];
        }
    }
    std::vector<double> mu = population_mean(s);
    CHECK(mu == std::vector<double>{0.5, 0.3, 0.5});
    for (int k = 0; k < 3; ++k) CHECK(close(sum[k] / N, mu[k], 0.02));
}

TEST_CASE("two-spike samples reproduce the closed-form second moments") {
    SparsePcaSpec s{4, 0.3, 2, 4};
    CHECK(close(s.tau(), 0.2, 1e-15));
    CounterRng rng(14, 0);
    const int N = 60000;
    const double spike = std::sqrt(4.0 / 2.0);
    std::vector<double> prod_sum(16, 0.0);
    Instance x;
    for (int t = 0; t < N; ++t) {
        sample_sparse_pca(s, rng, x);
        REQUIRE(x.kind == InstanceKind::sparse_pair);
        REQUIRE(x.nsparse == 2);
        REQUIRE(x.sparse[0].index < x.sparse[1].index);
        REQUIRE(close(std::abs(x.sparse[0].value), spike, 1e-12));
        REQUIRE(close(std::abs(x.sparse[1].value), spike, 1e-12));
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c)
                prod_sum[(x.sparse[a].index - 1) * 4 + (x.sparse[c].index - 1)] +=
                    x.sparse[a].value * x.sparse[c].value;
    }
    std::vector<double> mom = population_mean(s);
    CHECK(mom[1 * 4 + 3] == s.tau());
    CHECK(mom[3 * 4 + 1] == s.tau());
    CHECK(mom[0] == 1.0);
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c)
            CHECK(close(prod_sum[a * 4 + c] / N, mom[a * 4 + c], 0.03));
}

TEST_CASE("matrix samples are ±1 with the planted entry's mean") {
    MatrixOptSpec s{3, -0.6, 1, 3};
    CounterRng rng(15, 0);
    const int N = 40000;
    std::vector<double> sum(9, 0.0);
    Instance x;
    for (int t = 0; t < N; ++t) {
        sample_opt_matrix(s, rng, x);
        REQUIRE(x.kind == InstanceKind::sign_matrix);
        REQUIRE(x.dense.size() == 9);
        for (int k = 0; k < 9; ++k) {
            REQUIRE((x.dense[k] == 1 || x.dense[k] == -1));
            sum[k] += x.dense[k];
        }
    }
    std::vector<double> mu = population_mean(s);
    CHECK(mu[0 * 3 + 2] == -0.6);
    for (int k = 0; k < 9; ++k) CHECK(close(sum[k] / N, mu[k], 0.025));
}

TEST_CASE("samplers replay exactly under the same stream") {
    HideSeekV1Spec s{10, 0.3, 7};
    CounterRng a(77, 5), b(77, 5);
    for (int t = 0; t < 50; ++t) {
        Instance xa = sample_v1(s, a), xb = sample_v1(s, b);
        CHECK(xa.dense == xb.dense);
    }
}

TEST_CASE("pair ranking is lexicographic and invertible") {
    CHECK(pair_count(2) == 1);
    CHECK(pair_count(4) == 6);
    CHECK(pair_count(24) == 276);
    CHECK(pair_rank(4, 1, 2) == 0);
    CHECK(pair_rank(4, 1, 3) == 1);
    CHECK(pair_rank(4, 3, 4) == 5);
    for (int64_t r = 0; r < pair_count(7); ++r) {
        auto [i, j] = pair_unrank(7, r);
        CHECK(i >= 1);
        CHECK(i < j);
        CHECK(j <= 7);
        CHECK(pair_rank(7, i, j) == r);
    }
}

TEST_CASE("finite-alphabet view: probabilities sum to one and invert correctly") {
    HideSeekV1Spec v1{3, 0.25, 2};
    CHECK(alphabet_size(v1) == 8);
    double total = 0.0;
    Instance x;
    for (int64_t idx = 0; idx < 8; ++idx) {
        total += prob_of_index(v1, idx);
        instance_from_index(v1, idx, x);
        CHECK(index_of_instance(v1, x) == idx);
    }
    CHECK(close(total, 1.0, 1e-12));

    HideSeekV2Spec v2{3, 0.3, 2};
    CHECK(alphabet_size(v2) == 6);
    total = 0.0;
    for (int64_t idx = 0; idx < 6; ++idx) {
        total += prob_of_index(v2, idx);
        instance_from_index(v2, idx, x);
        CHECK(index_of_instance(v2, x) == idx);
    }
    CHECK(close(total, 1.0, 1e-12));
}

TEST_CASE("index probabilities match hand-computed products") {
    HideSeekV1Spec s{2, 0.25, 1};
    // idx 1 = (+1, -1): 0.75 * 0.5; idx 0 = (-1, -1): 0.25 * 0.5.
    CHECK(close(prob_of_index(s, 1), 0.375, 1e-15));
    CHECK(close(prob_of_index(s, 0), 0.125, 1e-15));
    CHECK(close(prob_of_index(s, 3), 0.375, 1e-15));

    HideSeekV2Spec v{3, 0.3, 2};
    CHECK(close(prob_of_index(v, 2), 1.0 / 6.0 + 0.1, 1e-15));  // +e_2
    CHECK(close(prob_of_index(v, 3), 1.0 / 6.0 - 0.1, 1e-15));  // -e_2
    CHECK(close(prob_of_index(v, 0), 1.0 / 6.0, 1e-15));        // +e_1
}

TEST_CASE("index histogram matches the exact pmf") {
    HideSeekV1Spec s{3, 0.2, 1};
    CounterRng rng(21, 0);
    const int N = 60000;
    std::vector<int64_t> hist(8, 0);
    Instance x;
    for (int t = 0; t < N; ++t) {
        sample_v1(s, rng, x);
        ++hist[index_of_instance(s, x)];
    }
    for (int64_t idx = 0; idx < 8; ++idx) {
        double p = prob_of_index(s, idx);
        double se = std::sqrt(p * (1.0 - p) / N);
        CHECK(close(static_cast<double>(hist[idx]) / N, p, 5.0 * se + 1e-9));
    }
}

TEST_CASE("alphabet helpers reject what they cannot represent") {
    CHECK_THROWS_AS(alphabet_size(HideSeekV1Spec{63, 0.1, 0}), EnumerationTooLarge);
    HideSeekV1Spec s{3, 0.1, 0};
    Instance wrong;
    wrong.kind = InstanceKind::sparse_pair;
    wrong.nsparse = 1;
    wrong.sparse[0] = {1, 1.0};
    CHECK_THROWS_AS(index_of_instance(s, wrong), DimensionMismatch);
    HideSeekV2Spec v{3, 0.1, 0};
    Instance dense;
    dense.kind = InstanceKind::dense_sign;
    dense.dense = {1, -1, 1};
    CHECK_THROWS_AS(index_of_instance(v, dense), DimensionMismatch);
    Instance out_of_range;
    out_of_range.kind = InstanceKind::sparse_pair;
    out_of_range.nsparse = 1;
    out_of_range.sparse[0] = {9, 1.0};
    CHECK_THROWS_AS(index_of_instance(v, out_of_range), DimensionMismatch);
}

#include "icsim/distributions.hpp"

#include "icsim/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace icsim {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

// Fills out[0..d) with ±1 signs drawn 64 at a time.
void fill_signs(int d, CounterRng& rng, std::vector<int8_t>& out) {
    for (int base = 0; base < d; base += 64) {
        uint64_t bits = rng.next_u64();
        int hi = std::min(d, base + 64);
        for (int k = base; k < hi; ++k) out[k] = (bits >> (k - base)) & 1 ? 1 : -1;
    }
}

void fill_bits(int d, CounterRng& rng, std::vector<int8_t>& out) {
    for (int base = 0; base < d; base += 64) {
        uint64_t bits = rng.next_u64();
        int hi = std::min(d, base + 64);
        for (int k = base; k < hi; ++k) out[k] = (bits >> (k - base)) & 1;
    }
}

}  // namespace

void validate(const HideSeekV1Spec& s) {
    require(s.d >= 1, "v1: d must be >= 1");
    require(s.rho >= 0.0 && s.rho <= 0.5, "v1: rho must be in [0, 1/2]");
    require(s.j == kNone || (s.j >= 1 && s.j <= s.d), "v1: j must be NONE or in 1..d");
}

void validate(const HideSeekV2Spec& s) {
    require(s.d >= 1, "v2: d must be >= 1");
    require(s.rho >= 0.0 && s.rho <= 0.5, "v2: rho must be in [0, 1/2]");
    require(s.j == kNone || (s.j >= 1 && s.j <= s.d), "v2: j must be NONE or in 1..d");
}

void validate(const BanditLossSpec& s) {
    require(s.d >= 1, "bandit: d must be >= 1");
    require(s.rho >= 0.0 && s.rho <= 0.25, "bandit: rho must be in [0, 1/4]");
    require(s.j >= 1 && s.j <= s.d, "bandit: j must be in 1..d");
}

void validate(const SparsePcaSpec& s) {
    require(s.d >= 2, "sparsepca: d must be >= 2");
    require(s.rho > 0.0 && s.rho < 0.5, "sparsepca: rho must be in (0, 1/2)");
    require(s.pair_i >= 1 && s.pair_i < s.pair_j && s.pair_j <= s.d, "sparsepca: need 1 <= i* < j* <= d");
}

void validate(const MatrixOptSpec& s) {
    require(s.d >= 1, "matrixopt: d must be >= 1");
    require(s.beta >= -1.0 && s.beta <= 1.0, "matrixopt: beta must be in [-1, 1]");
    require(s.pair_i >= 1 && s.pair_i <= s.d && s.pair_j >= 1 && s.pair_j <= s.d,
            "matrixopt: pair must be in 1..d x 1..d");
}

void sample_v1(const HideSeekV1Spec& s, CounterRng& rng, Instance& out) {
    validate(s);
    out.kind = InstanceKind::dense_sign;
    out.dense.resize(s.d);
    out.nsparse = 0;
    fill_signs(s.d, rng, out.dense);
    if (s.j != kNone) out.dense[s.j - 1] = rng.bernoulli(0.5 + s.rho) ? 1 : -1;
}

void sample_v2(const HideSeekV2Spec& s, CounterRng& rng, Instance& out) {
    validate(s);
    out.kind = InstanceKind::sparse_pair;
    out.dense.clear();
    out.nsparse = 1;
    int i = static_cast<int>(rng.uniform_int(s.d)) + 1;
    int sign;
    if (i == s.j) {
        sign = rng.bernoulli(0.5 + s.rho) ? 1 : -1;
    } else {
        sign = rng.sign();
    }
    out.sparse[0] = {i, static_cast<double>(sign)};
}

void sample_bandit_loss(const BanditLossSpec& s, CounterRng& rng, Instance& out) {
    validate(s);
    out.kind = InstanceKind::binary_loss;
    out.dense.resize(s.d);
    out.nsparse = 0;
    fill_bits(s.d, rng, out.dense);
    // Pr(loss_j = 1) = 1/2 - rho.
    out.dense[s.j - 1] = rng.bernoulli(0.5 - s.rho) ? 1 : 0;
}

void sample_sparse_pca(const SparsePcaSpec& s, CounterRng& rng, Instance& out) {
    validate(s);
    out.kind = InstanceKind::sparse_pair;
    out.dense.clear();
    out.nsparse = 2;
    auto [i, j] = pair_unrank(s.d, rng.uniform_int(pair_count(s.d)));
    int s1 = rng.sign();
    int s2;
    if (i == s.pair_i && j == s.pair_j) {
        s2 = rng.bernoulli(0.5 + s.rho) ? s1 : -s1;
    } else {
        s2 = rng.sign();
    }
    double mag = std::sqrt(s.d / 2.0);
    out.sparse[0] = {i, s1 * mag};
    out.sparse[1] = {j, s2 * mag};
}

void sample_opt_matrix(const MatrixOptSpec& s, CounterRng& rng, Instance& out) {
    validate(s);
    out.kind = InstanceKind::sign_matrix;
    out.dense.resize(static_cast<size_t>(s.d) * s.d);
    out.nsparse = 0;
    fill_signs(s.d * s.d, rng, out.dense);
    out.dense[(s.pair_i - 1) * static_cast<size_t>(s.d) + (s.pair_j - 1)] =
        rng.bernoulli((1.0 + s.beta) / 2.0) ? 1 : -1;
}

Instance sample_v1(const HideSeekV1Spec& s, CounterRng& rng) {
    Instance x;
    sample_v1(s, rng, x);
    return x;
}
Instance sample_v2(const HideSeekV2Spec& s, CounterRng& rng) {
    Instance x;
    sample_v2(s, rng, x);
    return x;
}
Instance sample_bandit_loss(const BanditLossSpec& s, CounterRng& rng) {
    Instance x;
    sample_bandit_loss(s, rng, x);
    return x;
}
Instance sample_sparse_pca(const SparsePcaSpec& s, CounterRng& rng) {
    Instance x;
    sample_sparse_pca(s, rng, x);
    return x;
}
Instance sample_opt_matrix(const MatrixOptSpec& s, CounterRng& rng) {
    Instance x;
    sample_opt_matrix(s, rng, x);
    return x;
}

std::vector<double> population_mean(const HideSeekV1Spec& s) {
    validate(s);
    std::vector<double> mu(s.d, 0.0);
    if (s.j != kNone) mu[s.j - 1] = 2.0 * s.rho;
    return mu;
}

std::vector<double> population_mean(const HideSeekV2Spec& s) {
    validate(s);
    std::vector<double> mu(s.d, 0.0);
    if (s.j != kNone) mu[s.j - 1] = 2.0 * s.rho / s.d;
    return mu;
}

std::vector<double> population_mean(const BanditLossSpec& s) {
    validate(s);
    std::vector<double> mu(s.d, 0.5);
    mu[s.j - 1] = 0.5 - s.rho;
    return mu;
}

std::vector<double> population_mean(const SparsePcaSpec& s) {
    validate(s);
    std::vector<double> m(static_cast<size_t>(s.d) * s.d, 0.0);
    for (int i = 0; i < s.d; ++i) m[i * static_cast<size_t>(s.d) + i] = 1.0;
    m[(s.pair_i - 1) * static_cast<size_t>(s.d) + (s.pair_j - 1)] = s.tau();
    m[(s.pair_j - 1) * static_cast<size_t>(s.d) + (s.pair_i - 1)] = s.tau();
    return m;
}

std::vector<double> population_mean(const MatrixOptSpec& s) {
    validate(s);
    std::vector<double> m(static_cast<size_t>(s.d) * s.d, 0.0);
    m[(s.pair_i - 1) * static_cast<size_t>(s.d) + (s.pair_j - 1)] = s.beta;
    return m;
}

int64_t pair_count(int d) { return static_cast<int64_t>(d) * (d - 1) / 2; }

int64_t pair_rank(int d, int i, int j) {
    // Pairs with first element < i come first: sum_{a<i} (d-a) = (i-1)(2d-i)/2.
    return static_cast<int64_t>(i - 1) * (2 * d - i) / 2 + (j - i - 1);
}

std::pair<int, int> pair_unrank(int d, int64_t rank) {
    int i = 1;
    while (rank >= d - i) {
        rank -= d - i;
        ++i;
    }
    return {i, i + 1 + static_cast<int>(rank)};
}

int64_t alphabet_size(const HideSeekV1Spec& s) {
    if (s.d > 62) throw EnumerationTooLarge("v1 alphabet 2^d needs d <= 62");
    return int64_t(1) << s.d;
}

int64_t alphabet_size(const HideSeekV2Spec& s) { return 2 * static_cast<int64_t>(s.d); }

void instance_from_index(const HideSeekV1Spec& s, int64_t idx, Instance& out) {
    out.kind = InstanceKind::dense_sign;
    out.dense.resize(s.d);
    out.nsparse = 0;
    for (int k = 0; k < s.d; ++k) out.dense[k] = (idx >> k) & 1 ? 1 : -1;
}

void instance_from_index(const HideSeekV2Spec& s, int64_t idx, Instance& out) {
    out.kind = InstanceKind::sparse_pair;
    out.dense.clear();
    out.nsparse = 1;
    int coord = static_cast<int>(idx >> 1) + 1;
    (void)s;
    out.sparse[0] = {coord, (idx & 1) ? -1.0 : 1.0};
}

double prob_of_index(const HideSeekV1Spec& s, int64_t idx) {
    validate(s);
    double p = std::pow(0.5, s.d);
    if (s.j != kNone) {
        bool plus = (idx >> (s.j - 1)) & 1;
        p *= plus ? (1.0 + 2.0 * s.rho) : (1.0 - 2.0 * s.rho);
    }
    return p;
}

double prob_of_index(const HideSeekV2Spec& s, int64_t idx) {
    validate(s);
    int coord = static_cast<int>(idx >> 1) + 1;
    bool plus = !(idx & 1);
    if (coord == s.j) return 1.0 / (2.0 * s.d) + (plus ? s.rho / s.d : -s.rho / s.d);
    return 1.0 / (2.0 * s.d);
}

int64_t index_of_instance(const HideSeekV1Spec& s, const Instance& x) {
    if (x.kind != InstanceKind::dense_sign || static_cast<int>(x.dense.size()) != s.d)
        throw DimensionMismatch("index_of_instance: not a d-dimensional sign vector");
    if (s.d > 62) throw EnumerationTooLarge("v1 alphabet 2^d needs d <= 62");
    int64_t idx = 0;
    for (int k = 0; k < s.d; ++k)
        if (x.dense[k] > 0) idx |= int64_t(1) << k;
    return idx;
}

int64_t index_of_instance(const HideSeekV2Spec& s, const Instance& x) {
    if (x.kind != InstanceKind::sparse_pair || x.nsparse != 1)
        throw DimensionMismatch("index_of_instance: not a signed basis vector");
    int coord = x.sparse[0].index;
    if (coord < 1 || coord > s.d)
        throw DimensionMismatch("index_of_instance: coordinate out of range");
    return 2 * static_cast<int64_t>(coord - 1) + (x.sparse[0].value < 0 ? 1 : 0);
}

}  // namespace icsim

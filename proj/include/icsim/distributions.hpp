#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "icsim/rng.hpp"

namespace icsim {

// Hidden coordinate convention: coordinates are 1-based; j = 0 means NONE,
// i.e. the unbiased reference distribution.
constexpr int kNone = 0;

// Product distribution on {-1,+1}^d; coordinate j is +1 with probability 1/2+rho.
struct HideSeekV1Spec {
    int d = 1;
    double rho = 0.0;
    int j = kNone;
};

// Distribution on the signed basis vectors {±e_i}; Pr(+e_j) = 1/(2d)+rho/d,
// Pr(-e_j) = 1/(2d)-rho/d, every other ±e_i has probability 1/(2d).
struct HideSeekV2Spec {
    int d = 1;
    double rho = 0.0;
    int j = kNone;
};

// Loss vectors in {0,1}^d, independent fair bits except coordinate j,
// which is 0 with probability 1/2+rho.
struct BanditLossSpec {
    int d = 1;
    double rho = 0.0;
    int j = 1;
};

// x = sqrt(d/2) * (s1*e_i + s2*e_j) with (i,j) uniform over i<j, s1 uniform ±1,
// and s2 = s1 with probability 1/2+rho iff (i,j) is the planted pair.
struct SparsePcaSpec {
    int d = 2;
    double rho = 0.25;
    int pair_i = 1;
    int pair_j = 2;
    double tau() const { return 2.0 * rho / (d - 1); }
};

// d x d matrix of independent ±1 entries; entry (i*,j*) has mean beta.
// beta spans [-1,1]: a minimizer is only ever drawn to the planted entry
// when the bias is negative.
struct MatrixOptSpec {
    int d = 1;
    double beta = 0.0;
    int pair_i = 1;
    int pair_j = 1;
};

void validate(const HideSeekV1Spec& s);
void validate(const HideSeekV2Spec& s);
void validate(const BanditLossSpec& s);
void validate(const SparsePcaSpec& s);
void validate(const MatrixOptSpec& s);

enum class InstanceKind : uint8_t { dense_sign, sparse_pair, binary_loss, sign_matrix };

struct SparseEntry {
    int index = 0;  // 1-based coordinate
    double value = 0.0;
};

// One sampled data point. dense holds ±1 signs, 0/1 losses, or a row-major
// ±1 matrix depending on kind; sparse_pair instances live in `sparse` only.
struct Instance {
    InstanceKind kind = InstanceKind::dense_sign;
    std::vector<int8_t> dense;
    std::array<SparseEntry, 2> sparse{};
    int nsparse = 0;
};

// Samplers fill `out` in place (hot loops reuse the buffer); the value-returning
// overloads are conveniences. Draw counts per call are fixed for a given spec,
// so streams stay aligned no matter what the sampled values are.
void sample_v1(const HideSeekV1Spec& s, CounterRng& rng, Instance& out);
void sample_v2(const HideSeekV2Spec& s, CounterRng& rng, Instance& out);
void sample_bandit_loss(const BanditLossSpec& s, CounterRng& rng, Instance& out);
void sample_sparse_pca(const SparsePcaSpec& s, CounterRng& rng, Instance& out);
void sample_opt_matrix(const MatrixOptSpec& s, CounterRng& rng, Instance& out);

Instance sample_v1(const HideSeekV1Spec& s, CounterRng& rng);
Instance sample_v2(const HideSeekV2Spec& s, CounterRng& rng);
Instance sample_bandit_loss(const BanditLossSpec& s, CounterRng& rng);
Instance sample_sparse_pca(const SparsePcaSpec& s, CounterRng& rng);
Instance sample_opt_matrix(const MatrixOptSpec& s, CounterRng& rng);

// Closed-form means. V1/V2/bandit: per-coordinate mean vector. Sparse PCA:
// d x d matrix of second moments E[x_a x_b] (row-major; 1 on the diagonal,
// tau at the planted pair). Matrix opt: d x d matrix of entry means.
std::vector<double> population_mean(const HideSeekV1Spec& s);
std::vector<double> population_mean(const HideSeekV2Spec& s);
std::vector<double> population_mean(const BanditLossSpec& s);
std::vector<double> population_mean(const SparsePcaSpec& s);
std::vector<double> population_mean(const MatrixOptSpec& s);

// Lexicographic ranking of pairs (i,j), 1 <= i < j <= d: (1,2) -> 0, (1,3) -> 1, ...
int64_t pair_count(int d);
int64_t pair_rank(int d, int i, int j);
std::pair<int, int> pair_unrank(int d, int64_t rank);

// Exact finite-alphabet view of the V1/V2 instance distributions, for
// brute-force enumeration and histogram tests. V1 indexes {-1,+1}^d by bit
// k of the index (0 -> -1); V2 indexes ±e_i as 2(i-1) for +e_i, 2(i-1)+1 for -e_i.
int64_t alphabet_size(const HideSeekV1Spec& s);
int64_t alphabet_size(const HideSeekV2Spec& s);
void instance_from_index(const HideSeekV1Spec& s, int64_t idx, Instance& out);
void instance_from_index(const HideSeekV2Spec& s, int64_t idx, Instance& out);
double prob_of_index(const HideSeekV1Spec& s, int64_t idx);
double prob_of_index(const HideSeekV2Spec& s, int64_t idx);
// Inverse of instance_from_index (used by table-driven protocols).
int64_t index_of_instance(const HideSeekV1Spec& s, const Instance& x);
int64_t index_of_instance(const HideSeekV2Spec& s, const Instance& x);

}  // namespace icsim

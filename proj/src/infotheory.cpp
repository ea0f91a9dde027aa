#include "icsim/infotheory.hpp"

#include "icsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace icsim {

namespace {

constexpr double kSumTol = 1e-12;
constexpr double kIndepTol = 1e-9;
const double kInf = std::numeric_limits<double>::infinity();

double log_in(double x, LogBase base) { return base == LogBase::bits ? std::log2(x) : std::log(x); }

void check_distribution(const std::vector<double>& p, const char* who) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw std::invalid_argument(std::string(who) + ": negative or NaN probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTol)
        throw std::invalid_argument(std::string(who) + ": probabilities sum to " + std::to_string(sum) +
                                    ", not 1 within 1e-12");
}

double kl_nats_raw(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return kInf;
        s += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(s, 0.0);
}

}  // namespace

Pmf::Pmf(std::vector<double> probs, LogBase b) : p(std::move(probs)), base(b) {
    if (p.empty()) throw std::invalid_argument("Pmf: empty support");
    check_distribution(p, "Pmf");
}

JointPmf::JointPmf(std::vector<int> axis_sizes, std::vector<double> table)
    : sizes(std::move(axis_sizes)), p(std::move(table)) {
    if (sizes.empty()) throw std::invalid_argument("JointPmf: no axes");
    size_t cells = 1;
    for (int s : sizes) {
        if (s < 1) throw std::invalid_argument("JointPmf: axis size must be >= 1");
        cells *= static_cast<size_t>(s);
    }
    if (cells != p.size()) throw std::invalid_argument("JointPmf: table size does not match axis sizes");
    check_distribution(p, "JointPmf");
}

std::vector<double> JointPmf::marginal(int axis) const {
    if (axis < 0 || axis >= axes()) throw std::invalid_argument("JointPmf::marginal: bad axis");
    std::vector<double> m(sizes[axis], 0.0);
    size_t stride = 1;
    for (int a = axes() - 1; a > axis; --a) stride *= static_cast<size_t>(sizes[a]);
    for (size_t i = 0; i < p.size(); ++i) m[(i / stride) % sizes[axis]] += p[i];
    return m;
}

std::vector<double> JointPmf::pair_marginal(int a, int b) const {
    if (a < 0 || b < 0 || a >= axes() || b >= axes() || a == b)
        throw std::invalid_argument("JointPmf::pair_marginal: bad axes");
    size_t stride_a = 1, stride_b = 1;
    for (int ax = axes() - 1; ax > a; --ax) stride_a *= static_cast<size_t>(sizes[ax]);
    for (int ax = axes() - 1; ax > b; --ax) stride_b *= static_cast<size_t>(sizes[ax]);
    std::vector<double> m(static_cast<size_t>(sizes[a]) * sizes[b], 0.0);
    for (size_t i = 0; i < p.size(); ++i) {
        size_t ia = (i / stride_a) % sizes[a];
        size_t ib = (i / stride_b) % sizes[b];
        m[ia * sizes[b] + ib] += p[i];
    }
    return m;
}

double entropy(const Pmf& pmf) {
    double h = 0.0;
    for (double v : pmf.p)
        if (v > 0.0) h -= v * log_in(v, pmf.base);
    return std::max(h, 0.0);
}

double kl(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) throw DimensionMismatch("kl: supports differ in size");
    if (p.base != q.base) throw DimensionMismatch("kl: mixed log bases");
    double nats = kl_nats_raw(p.p, q.p);
    if (nats == kInf) return kInf;
    return p.base == LogBase::bits ? nats / std::log(2.0) : nats;
}

double chi2(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) throw DimensionMismatch("chi2: supports differ in size");
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (q.p[i] == 0.0) {
            if (p.p[i] > 0.0) throw DivisionByZeroSupport("chi2: q is zero where p has mass");
            continue;
        }
        double diff = p.p[i] - q.p[i];
        s += diff * diff / q.p[i];
    }
    return s;
}

double total_variation(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) throw DimensionMismatch("total_variation: supports differ in size");
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i) s += std::abs(p.p[i] - q.p[i]);
    return s;
}

double mutual_information(const JointPmf& joint, int axis_a, int axis_b, LogBase base) {
    std::vector<double> pab = joint.pair_marginal(axis_a, axis_b);
    std::vector<double> pa = joint.marginal(axis_a);
    std::vector<double> pb = joint.marginal(axis_b);
    double mi = 0.0;
    for (size_t ia = 0; ia < pa.size(); ++ia)
        for (size_t ib = 0; ib < pb.size(); ++ib) {
            double v = pab[ia * pb.size() + ib];
            if (v > 0.0) mi += v * log_in(v / (pa[ia] * pb[ib]), base);
        }
    // Rounding can leave a tiny negative on (near-)product joints.
    return mi < 0.0 && mi > -1e-9 ? 0.0 : mi;
}

InfoBudgetResult avg_info_budget(const JointPmf& joint, int b) {
    if (joint.axes() < 2) throw std::invalid_argument("avg_info_budget: need W plus at least one Z axis");
    if (b < 0 || b > 62) throw std::invalid_argument("avg_info_budget: b out of range");
    int d = joint.axes() - 1;
    if (static_cast<int64_t>(joint.sizes[0]) > (int64_t(1) << b))
        throw AlphabetTooLarge("avg_info_budget: |W| exceeds 2^b");

    // The Z's must be mutually independent under the joint's Z-marginal.
    std::vector<std::vector<double>> zm(d);
    for (int j = 0; j < d; ++j) zm[j] = joint.marginal(j + 1);
    size_t zcells = 1;
    for (int j = 0; j < d; ++j) zcells *= static_cast<size_t>(joint.sizes[j + 1]);
    std::vector<double> ztable(zcells, 0.0);
    size_t wstride = zcells;
    for (size_t i = 0; i < joint.p.size(); ++i) ztable[i % wstride] += joint.p[i];
    for (size_t zi = 0; zi < zcells; ++zi) {
        double prod = 1.0;
        size_t rest = zi;
        for (int j = d - 1; j >= 0; --j) {
            prod *= zm[j][rest % joint.sizes[j + 1]];
            rest /= joint.sizes[j + 1];
        }
        if (std::abs(ztable[zi] - prod) > kIndepTol)
            throw NotIndependent("avg_info_budget: Z marginal is not a product within 1e-9");
    }

    double sum_bits = 0.0;
    for (int j = 0; j < d; ++j) sum_bits += mutual_information(joint, 0, j + 1, LogBase::bits);
    InfoBudgetResult r;
    r.value_bits = sum_bits / d;
    r.bound_bits = static_cast<double>(b) / d;
    r.value_nats = r.value_bits * std::log(2.0);
    r.bound_nats = r.bound_bits * std::log(2.0);
    r.holds = r.value_bits <= r.bound_bits + kIndepTol;
    return r;
}

DragomirResult dragomir_check(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) throw DimensionMismatch("dragomir_check: supports differ in size");
    DragomirResult r;
    r.c = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if ((p.p[i] > 0.0) != (q.p[i] > 0.0))
            throw UnboundedRatio("dragomir_check: p and q must share support exactly");
        if (q.p[i] > 0.0) r.c = std::max(r.c, p.p[i] / q.p[i]);
    }
    r.kl_pq_nats = kl_nats_raw(p.p, q.p);
    r.kl_qp_nats = kl_nats_raw(q.p, p.p);
    r.chi2_pq = chi2(p, q);
    r.ratio_margin = r.c * r.kl_qp_nats - r.kl_pq_nats;
    r.sandwich_lower_margin = r.chi2_pq - r.kl_pq_nats;
    r.sandwich_upper_margin = 2.0 * r.c * r.kl_pq_nats - r.chi2_pq;
    r.ratio_holds = r.ratio_margin >= -kIndepTol;
    r.sandwich_holds = r.sandwich_lower_margin >= -kIndepTol && r.sandwich_upper_margin >= -kIndepTol;
    return r;
}

MomentEstimate balls_bins_moment(int n, int d, double epsilon, int64_t trials, CounterRng& rng) {
    if (n < 1 || d < 1 || trials < 1 || epsilon < 0.0)
        throw std::invalid_argument("balls_bins_moment: need n, d, trials >= 1 and epsilon >= 0");
    std::vector<int> counts(d);
    double mean = 0.0, m2 = 0.0;
    for (int64_t t = 0; t < trials; ++t) {
        std::fill(counts.begin(), counts.end(), 0);
        int maxc = 0;
        for (int ball = 0; ball < n; ++ball) {
            int bin = static_cast<int>(rng.uniform_int(d));
            maxc = std::max(maxc, ++counts[bin]);
        }
        double val = std::exp(epsilon * maxc);
        double delta = val - mean;
        mean += delta / static_cast<double>(t + 1);
        m2 += delta * (val - mean);
    }
    MomentEstimate e;
    e.estimate = mean;
    e.std_error = trials > 1 ? std::sqrt(m2 / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
    e.trials = trials;
    return e;
}

DetectionBound detection_prob_bound(const std::vector<double>& per_j_kls_nats) {
    int d = static_cast<int>(per_j_kls_nats.size());
    if (d <= 1) throw std::invalid_argument("detection_prob_bound: need d > 1");
    double sum = 0.0;
    for (double v : per_j_kls_nats) {
        if (!(v >= 0.0)) throw std::invalid_argument("detection_prob_bound: KL values must be >= 0");
        sum += v;
    }
    DetectionBound r;
    r.B = std::sqrt(2.0 * sum / d);
    r.bound = std::min(1.0, 3.0 / d + 2.0 * r.B);
    return r;
}

}  // namespace icsim

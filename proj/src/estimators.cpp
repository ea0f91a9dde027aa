#include "icsim/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "icsim/errors.hpp"

namespace icsim {

namespace {

void add_to_coordinate_sums(const Instance& x, std::vector<double>& sums) {
    if (x.kind == InstanceKind::dense_sign || x.kind == InstanceKind::binary_loss) {
        const int d = static_cast<int>(sums.size());
        if (static_cast<int>(x.dense.size()) != d)
            throw DimensionMismatch("instance dimension does not match detector dimension");
        for (int i = 0; i < d; ++i) sums[i] += x.dense[i];
    } else {
        for (int k = 0; k < x.nsparse; ++k) {
            const SparseEntry& e = x.sparse[k];
            if (e.index < 1 || e.index > static_cast<int>(sums.size()))
                throw DimensionMismatch("sparse index out of range for detector dimension");
            sums[e.index - 1] += e.value;
        }
    }
}

int argmax_low_tie(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

// Exact ±1 product sums per pair rank, plus the argmax rule shared by both
// pca_plugin overloads. Untouched pairs count as exact zeros.
Detection pca_argmax(const std::map<int64_t, int64_t>& units, int d) {
    const int64_t total = pair_count(d);
    int64_t best_rank = -1;
    int64_t best_units = std::numeric_limits<int64_t>::min();
    for (const auto& [rank, u] : units) {
        if (u > best_units) {
            best_units = u;
            best_rank = rank;
        }
    }
    // Smallest rank never touched by a sample, if any.
    int64_t untouched = -1;
    int64_t expect = 0;
    for (const auto& [rank, u] : units) {
        if (rank > expect) break;
        expect = rank + 1;
    }
    if (expect < total) untouched = expect;
    if (untouched >= 0 &&
        (best_rank < 0 || best_units < 0 || (best_units == 0 && untouched < best_rank))) {
        best_rank = untouched;
        best_units = 0;
    }
    auto [i, j] = pair_unrank(d, best_rank);
    return Detection{i, j};
}

void add_to_pair_units(const Instance& x, std::map<int64_t, int64_t>& units, int d) {
    if (x.kind != InstanceKind::sparse_pair || x.nsparse != 2)
        throw DimensionMismatch("pca_plugin expects two-sparse instances");
    int i = x.sparse[0].index, j = x.sparse[1].index;
    double vi = x.sparse[0].value, vj = x.sparse[1].value;
    if (i > j) std::swap(i, j);
    if (i < 1 || j > d || i == j)
        throw DimensionMismatch("sparse pair out of range for detector dimension");
    units[pair_rank(d, i, j)] += (vi * vj > 0) ? 1 : -1;
}

void append_f17(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

Detection full_info_argmax(std::span<const Instance> samples, int d) {
    if (d < 1) throw std::invalid_argument("full_info_argmax: d must be >= 1");
    if (samples.empty()) throw InsufficientData("full_info_argmax: no samples");
    std::vector<double> sums(d, 0.0);
    for (const Instance& x : samples) add_to_coordinate_sums(x, sums);
    return Detection{argmax_low_tie(sums) + 1, 0};
}

Detection full_info_argmax(InstanceSource& src, int64_t m, int d) {
    if (d < 1) throw std::invalid_argument("full_info_argmax: d must be >= 1");
    if (m < 1) throw InsufficientData("full_info_argmax: no samples");
    std::vector<double> sums(d, 0.0);
    Instance x;
    for (int64_t t = 0; t < m; ++t) {
        if (!src.next(x)) throw InsufficientData("full_info_argmax: source exhausted");
        add_to_coordinate_sums(x, sums);
    }
    return Detection{argmax_low_tie(sums) + 1, 0};
}

Detection most_common_action(std::span<const int> actions, int d) {
    if (d < 1) throw std::invalid_argument("most_common_action: d must be >= 1");
    if (actions.empty()) throw InsufficientData("most_common_action: no actions");
    std::vector<int64_t> counts(d, 0);
    for (int a : actions) {
        if (a < 1 || a > d) throw DimensionMismatch("action out of range");
        ++counts[a - 1];
    }
    int best = 0;
    for (int i = 1; i < d; ++i)
        if (counts[i] > counts[best]) best = i;
    return Detection{best + 1, 0};
}

Detection pca_plugin(std::span<const Instance> samples, int d) {
    if (d < 2) throw std::invalid_argument("pca_plugin: d must be >= 2");
    if (samples.empty()) throw InsufficientData("pca_plugin: no samples");
    std::map<int64_t, int64_t> units;
    for (const Instance& x : samples) add_to_pair_units(x, units, d);
    return pca_argmax(units, d);
}

Detection pca_plugin(InstanceSource& src, int64_t m, int d) {
    if (d < 2) throw std::invalid_argument("pca_plugin: d must be >= 2");
    if (m < 1) throw InsufficientData("pca_plugin: no samples");
    std::map<int64_t, int64_t> units;
    Instance x;
    for (int64_t t = 0; t < m; ++t) {
        if (!src.next(x)) throw InsufficientData("pca_plugin: source exhausted");
        add_to_pair_units(x, units, d);
    }
    return pca_argmax(units, d);
}

// ---- Scan detectors ----

namespace {

int width_of(uint64_t max_value) { return std::bit_width(max_value); }

void validate_params(const ScanParams& p) {
    if (p.ambient_d < 1) throw std::invalid_argument("scan: ambient_d must be >= 1");
    if (p.num_coords < 1) throw std::invalid_argument("scan: num_coords must be >= 1");
    if (p.segment_size < 1) throw std::invalid_argument("scan: segment_size must be >= 1");
    if (p.per_segment_n < 1) throw InsufficientData("scan: per-segment window is empty");
    if (!(p.unit > 0)) throw std::invalid_argument("scan: unit must be positive");
    if (p.pairs && p.num_coords != pair_count(p.ambient_d))
        throw DimensionMismatch("scan: pair coordinate count does not match ambient_d");
    if (!p.pairs && p.num_coords != p.ambient_d)
        throw DimensionMismatch("scan: coordinate count does not match ambient_d");
}

}  // namespace

int ScanParams::num_segments() const {
    return static_cast<int>((num_coords + segment_size - 1) / segment_size);
}

int64_t ScanParams::total_instances() const {
    return static_cast<int64_t>(num_segments()) * per_segment_n;
}

int ScanParams::required_bits() const {
    const int w_pos = width_of(static_cast<uint64_t>(per_segment_n - 1));
    const int w_seg = width_of(static_cast<uint64_t>(num_segments()));
    const int w_best = width_of(static_cast<uint64_t>(num_coords));
    const int w_units = width_of(static_cast<uint64_t>(2 * per_segment_n));
    return w_pos + w_seg + w_best + w_units + segment_size * w_units;
}

ScanParams dense_scan_params(int d, int b, double rho, double delta) {
    if (d < 1) throw std::invalid_argument("scan: d must be >= 1");
    if (b < 1) throw std::invalid_argument("scan: b must be >= 1");
    if (!(rho > 0.0) || rho > 0.5) throw RhoOutOfRange("scan: rho must lie in (0, 1/2]");
    if (!(delta > 0.0) || !(delta < 1.0)) throw std::invalid_argument("scan: delta must lie in (0,1)");
    const auto window = static_cast<int64_t>(std::ceil(2.0 * std::log(2.0 * d / delta) / (rho * rho)));
    ScanParams best{};
    bool found = false;
    for (int s = 1; s <= std::min(d, b); ++s) {
        ScanParams cand{d, false, d, s, window, rho, 1.0};
        if (cand.required_bits() <= b) {
            best = cand;
            found = true;
        }
    }
    if (!found) {
        ScanParams one{d, false, d, 1, window, rho, 1.0};
        throw BudgetTooSmall("scan: budget b=" + std::to_string(b) + " cannot hold one counter (needs " +
                             std::to_string(one.required_bits()) + " bits)");
    }
    return best;
}

ScanParams dense_scan_params_budget(int d, int segment_size, double rho, int64_t total_budget) {
    if (d < 1) throw std::invalid_argument("scan: d must be >= 1");
    if (segment_size < 1) throw std::invalid_argument("scan: segment_size must be >= 1");
    if (!(rho > 0.0) || rho > 0.5) throw RhoOutOfRange("scan: rho must lie in (0, 1/2]");
    ScanParams p{d, false, d, std::min(segment_size, d), 1, rho, 1.0};
    const int64_t window = total_budget / p.num_segments();
    if (window < 1)
        throw InsufficientData("scan: total budget smaller than one instance per segment");
    p.per_segment_n = window;
    validate_params(p);
    return p;
}

ScanParams pair_scan_params(int d, int b, double rho_pca, double delta) {
    if (d < 2) throw std::invalid_argument("pair scan: d must be >= 2");
    if (b < 1) throw std::invalid_argument("pair scan: b must be >= 1");
    if (!(rho_pca > 0.0) || rho_pca > 0.5) throw RhoOutOfRange("pair scan: rho must lie in (0, 1/2]");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("pair scan: delta must lie in (0,1)");
    const int64_t npairs = pair_count(d);
    const double tau = 2.0 * rho_pca / (d - 1);
    const double thr = tau / 2.0;
    // Observed products live in [-d/2, d/2], so the Hoeffding window scales
    // with (d/2)^2 relative to the sign scan.
    const auto window = static_cast<int64_t>(
        std::ceil(static_cast<double>(d) * d * std::log(2.0 * static_cast<double>(npairs) / delta) /
                  (2.0 * thr * thr)));
    ScanParams best{};
    bool found = false;
    const int max_s = static_cast<int>(std::min<int64_t>(npairs, b));
    for (int s = 1; s <= max_s; ++s) {
        ScanParams cand{d, true, static_cast<int>(npairs), s, window, thr, d / 2.0};
        if (cand.required_bits() <= b) {
            best = cand;
            found = true;
        }
    }
    if (!found) {
        ScanParams one{d, true, static_cast<int>(npairs), 1, window, thr, d / 2.0};
        throw BudgetTooSmall("pair scan: budget b=" + std::to_string(b) +
                             " cannot hold one counter (needs " +
                             std::to_string(one.required_bits()) + " bits)");
    }
    return best;
}

ScanParams pair_scan_params_budget(int d, int segment_size, double rho_pca, int64_t total_budget) {
    if (d < 2) throw std::invalid_argument("pair scan: d must be >= 2");
    if (segment_size < 1) throw std::invalid_argument("pair scan: segment_size must be >= 1");
    if (!(rho_pca > 0.0) || rho_pca > 0.5) throw RhoOutOfRange("pair scan: rho must lie in (0, 1/2]");
    const int64_t npairs = pair_count(d);
    const double thr = rho_pca / (d - 1);  // tau / 2
    ScanParams p{d, true, static_cast<int>(npairs),
                 static_cast<int>(std::min<int64_t>(segment_size, npairs)), 1, thr, d / 2.0};
    const int64_t window = total_budget / p.num_segments();
    if (window < 1)
        throw InsufficientData("pair scan: total budget smaller than one instance per segment");
    p.per_segment_n = window;
    validate_params(p);
    return p;
}

ScanProtocol::ScanProtocol(const ScanParams& prm) : prm_(prm) {
    validate_params(prm_);
    w_pos_ = width_of(static_cast<uint64_t>(prm_.per_segment_n - 1));
    w_seg_ = width_of(static_cast<uint64_t>(prm_.num_segments()));
    w_best_ = width_of(static_cast<uint64_t>(prm_.num_coords));
    w_units_ = width_of(static_cast<uint64_t>(2 * prm_.per_segment_n));
}

ProtocolSpec ScanProtocol::protocol_spec() const {
    const int64_t total = prm_.total_instances();
    if (total > std::numeric_limits<int>::max())
        throw std::invalid_argument("scan: more rounds than a protocol can run");
    return ProtocolSpec{prm_.required_bits(), 1, static_cast<int>(total)};
}

ScanProtocol::State ScanProtocol::decode(const Message& m) const {
    State s;
    BitCursor cur(m);
    const int64_t offset = prm_.per_segment_n;
    s.pos = static_cast<int64_t>(cur.take(w_pos_));
    s.seg = static_cast<int>(cur.take(w_seg_));
    s.best = static_cast<int>(cur.take(w_best_));
    s.best_units = static_cast<int64_t>(cur.take(w_units_)) - offset;
    s.counters.resize(prm_.segment_size);
    for (int i = 0; i < prm_.segment_size; ++i)
        s.counters[i] = static_cast<int64_t>(cur.take(w_units_)) - offset;
    return s;
}

Message ScanProtocol::encode(const State& s) const {
    const int64_t offset = prm_.per_segment_n;
    Message m;
    m.append_bits(static_cast<uint64_t>(s.pos), w_pos_);
    m.append_bits(static_cast<uint64_t>(s.seg), w_seg_);
    m.append_bits(static_cast<uint64_t>(s.best), w_best_);
    m.append_bits(static_cast<uint64_t>(s.best_units + offset), w_units_);
    for (int i = 0; i < prm_.segment_size; ++i)
        m.append_bits(static_cast<uint64_t>(s.counters[i] + offset), w_units_);
    return m;
}

void ScanProtocol::absorb(const Instance& x, State& s) const {
    const int base = s.seg * prm_.segment_size;
    const int actual = std::min(prm_.segment_size, prm_.num_coords - base);
    if (!prm_.pairs) {
        if (static_cast<int>(x.dense.size()) != prm_.ambient_d)
            throw DimensionMismatch("scan: instance dimension mismatch");
        for (int local = 0; local < actual; ++local) s.counters[local] += x.dense[base + local];
    } else {
        if (x.kind != InstanceKind::sparse_pair || x.nsparse != 2)
            throw DimensionMismatch("pair scan expects two-sparse instances");
        int i = x.sparse[0].index, j = x.sparse[1].index;
        double vi = x.sparse[0].value, vj = x.sparse[1].value;
        if (i > j) std::swap(i, j);
        const int64_t rank = pair_rank(prm_.ambient_d, i, j);
        if (rank >= base && rank < base + actual)
            s.counters[rank - base] += (vi * vj > 0) ? 1 : -1;
    }
    if (++s.pos == prm_.per_segment_n) {
        const double window = static_cast<double>(prm_.per_segment_n);
        for (int local = 0; local < actual; ++local) {
            const int64_t units = s.counters[local];
            if (static_cast<double>(units) * prm_.unit / window > prm_.threshold) {
                if (s.best == 0 || units > s.best_units) {
                    s.best = base + local + 1;
                    s.best_units = units;
                }
            }
        }
        s.pos = 0;
        ++s.seg;
        std::fill(s.counters.begin(), s.counters.end(), 0);
    }
}

Message ScanProtocol::step(std::span<const Instance> batch, const std::vector<Message>& prior,
                           CounterRng&) {
    State s;
    if (prior.empty()) {
        s.counters.assign(prm_.segment_size, 0);
    } else {
        s = decode(prior.back());
    }
    if (s.seg < prm_.num_segments()) absorb(batch[0], s);
    return encode(s);
}

Detection ScanProtocol::finish(const std::vector<Message>& messages) {
    int best = 1;
    if (!messages.empty()) {
        State s = decode(messages.back());
        if (s.best != 0) best = s.best;
    }
    if (!prm_.pairs) return Detection{best, 0};
    auto [i, j] = pair_unrank(prm_.ambient_d, best - 1);
    return Detection{i, j};
}

Detection run_scan(const ScanParams& prm, InstanceSource& src) {
    ScanProtocol proto(prm);
    CounterRng rng = CounterRng::poisoned();  // scans are deterministic; any draw is a bug
    return run_protocol(proto, proto.protocol_spec(), src, rng).final_output;
}

Detection segment_scan(InstanceSource& src, int d, int b, double rho, double delta) {
    ScanParams prm = dense_scan_params(d, b, rho, delta);
    ScanProtocol proto(prm);
    ProtocolSpec spec = proto.protocol_spec();
    spec.b = b;  // enforce the caller's budget, not just the packed size
    CounterRng rng = CounterRng::poisoned();
    return run_protocol(proto, spec, src, rng).final_output;
}

Detection pair_segment_scan(InstanceSource& src, int d, int b, double rho_pca, double delta) {
    ScanParams prm = pair_scan_params(d, b, rho_pca, delta);
    ScanProtocol proto(prm);
    ProtocolSpec spec = proto.protocol_spec();
    spec.b = b;
    CounterRng rng = CounterRng::poisoned();
    return run_protocol(proto, spec, src, rng).final_output;
}

// ---- Online learners ----

double hedge_default_eta(int d, int T) {
    if (d < 1 || T < 1) throw std::invalid_argument("hedge: d and T must be >= 1");
    return std::sqrt(8.0 * std::log(static_cast<double>(d)) / T);
}

double bandit_gamma(int d, int T) {
    if (d < 1 || T < 1) throw std::invalid_argument("bandit: d and T must be >= 1");
    return std::min(1.0, std::sqrt(static_cast<double>(d) * std::log(static_cast<double>(d)) / T));
}

double bandit_rho_recipe(int d, int b, int T) {
    if (d < 1 || b < 1 || T < 1) throw std::invalid_argument("bandit: d, b, T must be >= 1");
    return std::min(0.25, std::sqrt(static_cast<double>(d) / (static_cast<double>(b) * T)));
}

std::vector<double> softmax_distribution(std::span<const double> cum_losses, double eta) {
    if (cum_losses.empty()) throw std::invalid_argument("softmax: empty loss vector");
    const double lo = *std::min_element(cum_losses.begin(), cum_losses.end());
    std::vector<double> p(cum_losses.size());
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(-eta * (cum_losses[i] - lo));
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

namespace {

int sample_index(const std::vector<double>& p, CounterRng& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        cum += p[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
}

const Instance& checked_loss(const Instance& x, int d) {
    if (x.kind != InstanceKind::binary_loss || static_cast<int>(x.dense.size()) != d)
        throw DimensionMismatch("learner expects binary loss vectors of dimension d");
    return x;
}

// Fill the trace bookkeeping (sums, snapshots, optional loss copies) for one
// round; shared by hedge and the bandit.
struct TraceBuilder {
    RegretTrace trace;
    std::vector<double> loss_sums;
    size_t next_checkpoint = 0;
    const RegretOptions& opt;
    int d;

    TraceBuilder(int d_, int T, const RegretOptions& o) : opt(o), d(d_) {
        loss_sums.assign(d_, 0.0);
        trace.actions.reserve(T);
        trace.chosen_losses.reserve(T);
    }

    void round(int t, int action, const Instance& loss) {
        const double chosen = loss.dense[action - 1];
        trace.actions.push_back(action);
        trace.chosen_losses.push_back(chosen);
        trace.cum_chosen += chosen;
        for (int i = 0; i < d; ++i) loss_sums[i] += loss.dense[i];
        if (opt.keep_losses) {
            std::vector<double> row(d);
            for (int i = 0; i < d; ++i) row[i] = loss.dense[i];
            trace.per_round_losses.push_back(std::move(row));
        }
        while (next_checkpoint < opt.checkpoints.size() && opt.checkpoints[next_checkpoint] == t) {
            trace.snapshots.push_back(RegretSnapshot{t, trace.cum_chosen, loss_sums});
            ++next_checkpoint;
        }
    }

    RegretTrace take() {
        trace.final_loss_sums = loss_sums;
        return std::move(trace);
    }
};

}  // namespace

double RegretTrace::regret_vs_best() const {
    return cum_chosen - final_loss_sums[best_fixed_action() - 1];
}

int RegretTrace::best_fixed_action() const {
    int best = 0;
    for (int i = 1; i < static_cast<int>(final_loss_sums.size()); ++i)
        if (final_loss_sums[i] < final_loss_sums[best]) best = i;
    return best + 1;
}

RegretTrace run_hedge(std::span<const Instance> losses, int d, double eta, CounterRng& rng,
                      const RegretOptions& opt) {
    if (d < 1) throw std::invalid_argument("hedge: d must be >= 1");
    if (losses.empty()) throw InsufficientData("hedge: no rounds");
    const int T = static_cast<int>(losses.size());
    std::vector<double> cum(d, 0.0);
    TraceBuilder tb(d, T, opt);
    for (int t = 1; t <= T; ++t) {
        const Instance& loss = checked_loss(losses[t - 1], d);
        const std::vector<double> p = softmax_distribution(cum, eta);
        const int a = sample_index(p, rng) + 1;
        tb.round(t, a, loss);
        for (int i = 0; i < d; ++i) cum[i] += loss.dense[i];
    }
    return tb.take();
}

RegretTrace run_hedge(const BanditLossSpec& spec, int T, double eta, CounterRng& rng,
                      const RegretOptions& opt) {
    validate(spec);
    if (T < 1) throw InsufficientData("hedge: no rounds");
    std::vector<Instance> losses(T);
    for (int t = 0; t < T; ++t) sample_bandit_loss(spec, rng, losses[t]);
    return run_hedge(std::span<const Instance>(losses), spec.d, eta, rng, opt);
}

namespace {

// Exp3 with uniform exploration, expressed as a (1,1,T) protocol: the chosen
// coordinate's loss bit is the entire message, and the next round's state is
// rebuilt from the learner's own draws plus those bits.
class CoordinateBanditProtocol : public Protocol {
  public:
    CoordinateBanditProtocol(int d, int T)
        : d_(d), gamma_(bandit_gamma(d, T)), eta_(gamma_ / d), lhat_(d, 0.0) {
        actions_.reserve(T);
    }

    Message step(std::span<const Instance> batch, const std::vector<Message>&,
                 CounterRng& rng) override {
        const Instance& loss = checked_loss(batch[0], d_);
        std::vector<double> p = softmax_distribution(lhat_, eta_);
        for (double& v : p) v = (1.0 - gamma_) * v + gamma_ / d_;
        const int a = sample_index(p, rng) + 1;
        const uint64_t bit = loss.dense[a - 1] ? 1 : 0;
        lhat_[a - 1] += static_cast<double>(bit) / p[a - 1];
        actions_.push_back(a);
        Message m;
        m.append_bits(bit, 1);
        return m;
    }

    Detection finish(const std::vector<Message>&) override {
        return most_common_action(actions_, d_);
    }

    const std::vector<int>& actions() const { return actions_; }

  private:
    int d_;
    double gamma_, eta_;
    std::vector<double> lhat_;
    std::vector<int> actions_;
};

}  // namespace

RegretTrace run_coordinate_bandit(std::span<const Instance> losses, int d, CounterRng& rng,
                                  const RegretOptions& opt) {
    if (d < 1) throw std::invalid_argument("bandit: d must be >= 1");
    if (losses.empty()) throw InsufficientData("bandit: no rounds");
    const int T = static_cast<int>(losses.size());
    CoordinateBanditProtocol proto(d, T);
    VectorSource src(losses);
    run_protocol(proto, ProtocolSpec{1, 1, T}, src, rng);
    TraceBuilder tb(d, T, opt);
    for (int t = 1; t <= T; ++t) tb.round(t, proto.actions()[t - 1], losses[t - 1]);
    return tb.take();
}

RegretTrace run_coordinate_bandit(const BanditLossSpec& spec, int T, CounterRng& rng,
                                  const RegretOptions& opt) {
    validate(spec);
    if (T < 1) throw InsufficientData("bandit: no rounds");
    std::vector<Instance> losses(T);
    for (int t = 0; t < T; ++t) sample_bandit_loss(spec, rng, losses[t]);
    return run_coordinate_bandit(std::span<const Instance>(losses), spec.d, rng, opt);
}

std::string regret_trace_csv(const RegretTrace& trace) {
    if (trace.per_round_losses.size() != trace.actions.size())
        throw std::logic_error("regret_trace_csv needs a trace recorded with keep_losses");
    const int best = trace.best_fixed_action();
    std::string out = "t,action,loss,cum_regret_best\n";
    double cum_chosen = 0.0, cum_best = 0.0;
    for (size_t t = 0; t < trace.actions.size(); ++t) {
        cum_chosen += trace.chosen_losses[t];
        cum_best += trace.per_round_losses[t][best - 1];
        out += std::to_string(t + 1);
        out += ',';
        out += std::to_string(trace.actions[t]);
        out += ',';
        append_f17(out, trace.chosen_losses[t]);
        out += ',';
        append_f17(out, cum_chosen - cum_best);
        out += '\n';
    }
    return out;
}

// ---- Bilinear matrix game plug-in ----

namespace {

StochoptResult stochopt_from_sums(const std::vector<int64_t>& sums, int64_t m,
                                  const MatrixOptSpec& spec) {
    const int d = spec.d;
    int best = 0;
    for (int idx = 1; idx < d * d; ++idx)
        if (sums[idx] < sums[best]) best = idx;
    const std::vector<double> pop = population_mean(spec);
    StochoptResult r;
    r.entry = Detection{best / d + 1, best % d + 1};
    r.empirical_min = static_cast<double>(sums[best]) / static_cast<double>(m);
    r.population_value = pop[best];
    r.population_min = *std::min_element(pop.begin(), pop.end());
    r.gap = r.population_value - r.population_min;
    return r;
}

void add_matrix_sample(const Instance& x, std::vector<int64_t>& sums) {
    if (x.kind != InstanceKind::sign_matrix || x.dense.size() != sums.size())
        throw DimensionMismatch("stochopt_plugin expects d*d sign matrices");
    for (size_t i = 0; i < sums.size(); ++i) sums[i] += x.dense[i];
}

}  // namespace

StochoptResult stochopt_plugin(std::span<const Instance> samples, const MatrixOptSpec& spec) {
    validate(spec);
    if (samples.empty()) throw InsufficientData("stochopt_plugin: no samples");
    std::vector<int64_t> sums(static_cast<size_t>(spec.d) * spec.d, 0);
    for (const Instance& x : samples) add_matrix_sample(x, sums);
    return stochopt_from_sums(sums, static_cast<int64_t>(samples.size()), spec);
}

StochoptResult stochopt_plugin(InstanceSource& src, int64_t m, const MatrixOptSpec& spec) {
    validate(spec);
    if (m < 1) throw InsufficientData("stochopt_plugin: no samples");
    std::vector<int64_t> sums(static_cast<size_t>(spec.d) * spec.d, 0);
    Instance x;
    for (int64_t t = 0; t < m; ++t) {
        if (!src.next(x)) throw InsufficientData("stochopt_plugin: source exhausted");
        add_matrix_sample(x, sums);
    }
    return stochopt_from_sums(sums, m, spec);
}

std::string detection_to_json(const Detection& det) {
    nlohmann::json j;
    if (det.j == 0) {
        j["index"] = det.i;
    } else {
        j["pair"] = {det.i, det.j};
    }
    return j.dump();
}

}  // namespace icsim

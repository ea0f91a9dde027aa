#include "icsim/protocol.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace icsim {

namespace {

constexpr double kMarginTol = 1e-9;

// Enumeration core shared by the V1/V2 fronts. AlphaOps supplies the exact
// finite-alphabet view of one instance distribution.
struct AlphaOps {
    int64_t size;
    std::function<void(int64_t, Instance&)> instance_at;
    std::function<double(int64_t)> prob_at;
};

TranscriptPmf enumerate_core(const ProtocolFactory& make, const ProtocolSpec& spec, const AlphaOps& ops,
                             int64_t cap) {
    validate(spec);
    int steps = spec.n * spec.m;
    int64_t total = 1;
    for (int k = 0; k < steps; ++k) {
        if (total > cap / ops.size) throw EnumerationTooLarge("enumerate_transcripts: alphabet^(n*m) exceeds cap");
        total *= ops.size;
    }

    std::vector<int64_t> odo(steps, 0);
    std::vector<Instance> seq(steps);
    for (int k = 0; k < steps; ++k) ops.instance_at(0, seq[k]);

    TranscriptPmf pmf;
    for (int64_t it = 0; it < total; ++it) {
        double prob = 1.0;
        for (int k = 0; k < steps; ++k) prob *= ops.prob_at(odo[k]);
        if (prob > 0.0) {
            auto protocol = make();
            VectorSource src(seq);
            CounterRng poisoned = CounterRng::poisoned();
            Transcript t = run_protocol(*protocol, spec, src, poisoned);
            std::string key;
            for (const Message& msg : t.messages) key += msg.key();
            pmf[key] += prob;
        }
        // Advance the odometer (last position fastest).
        for (int k = steps - 1; k >= 0; --k) {
            if (++odo[k] < ops.size) {
                ops.instance_at(odo[k], seq[k]);
                break;
            }
            odo[k] = 0;
            ops.instance_at(0, seq[k]);
        }
    }
    return pmf;
}

template <class Spec>
AlphaOps ops_for(const Spec& dist) {
    return AlphaOps{alphabet_size(dist),
                    [dist](int64_t idx, Instance& out) { instance_from_index(dist, idx, out); },
                    [dist](int64_t idx) { return prob_of_index(dist, idx); }};
}

template <class Spec>
KlBoundCheck kl_check_core(const ProtocolFactory& make, const ProtocolSpec& ps, Spec family, double rho,
                           int64_t cap, const std::vector<KlBoundCheck::Rhs>& rhs) {
    family.rho = rho;
    family.j = kNone;
    TranscriptPmf p0 = enumerate_transcripts(make, ps, family, cap);

    KlBoundCheck r;
    r.per_j_kl_nats.resize(family.d);
    double sum = 0.0;
    for (int j = 1; j <= family.d; ++j) {
        Spec fj = family;
        fj.j = j;
        TranscriptPmf pj = enumerate_transcripts(make, ps, fj, cap);
        double v = transcript_kl_nats(p0, pj);
        r.per_j_kl_nats[j - 1] = v;
        sum += v;
    }
    r.lhs_nats = 2.0 * sum / family.d;
    r.rhs = rhs;
    r.tightest_rhs = rhs.front().value;
    for (const auto& b : rhs) r.tightest_rhs = std::min(r.tightest_rhs, b.value);
    r.margin = r.tightest_rhs - r.lhs_nats;
    r.holds = r.margin >= -kMarginTol;
    return r;
}

}  // namespace

void validate(const ProtocolSpec& s) {
    if (s.b < 1 || s.n < 1 || s.m < 1) throw std::invalid_argument("ProtocolSpec: b, n, m must all be >= 1");
}

SamplerSource make_source(const HideSeekV1Spec& s, CounterRng rng) {
    validate(s);
    return SamplerSource([s](CounterRng& r, Instance& out) { sample_v1(s, r, out); }, rng);
}
SamplerSource make_source(const HideSeekV2Spec& s, CounterRng rng) {
    validate(s);
    return SamplerSource([s](CounterRng& r, Instance& out) { sample_v2(s, r, out); }, rng);
}
SamplerSource make_source(const BanditLossSpec& s, CounterRng rng) {
    validate(s);
    return SamplerSource([s](CounterRng& r, Instance& out) { sample_bandit_loss(s, r, out); }, rng);
}
SamplerSource make_source(const SparsePcaSpec& s, CounterRng rng) {
    validate(s);
    return SamplerSource([s](CounterRng& r, Instance& out) { sample_sparse_pca(s, r, out); }, rng);
}
SamplerSource make_source(const MatrixOptSpec& s, CounterRng rng) {
    validate(s);
    return SamplerSource([s](CounterRng& r, Instance& out) { sample_opt_matrix(s, r, out); }, rng);
}

Transcript run_protocol(Protocol& protocol, const ProtocolSpec& spec, InstanceSource& source, CounterRng& rng) {
    validate(spec);
    Transcript t;
    t.messages.reserve(spec.m);
    std::vector<Instance> batch(spec.n);
    for (int round = 1; round <= spec.m; ++round) {
        for (int k = 0; k < spec.n; ++k) {
            if (!source.next(batch[k]))
                throw InsufficientData("run_protocol: stream exhausted at round " + std::to_string(round));
        }
        Message w = protocol.step(batch, t.messages, rng);
        if (w.length() > spec.b) throw BudgetExceeded(round, w.length(), spec.b);
        t.messages.push_back(std::move(w));
    }
    t.final_output = protocol.finish(t.messages);
    return t;
}

namespace {

class BatchedOnline : public Protocol {
  public:
    explicit BatchedOnline(Protocol& inner) : inner_(inner) {}

    Message step(std::span<const Instance> batch, const std::vector<Message>& prior, CounterRng& rng) override {
        std::vector<Message> chain;
        if (!prior.empty()) chain.push_back(prior.back());
        Message w;
        for (const Instance& x : batch) {
            w = inner_.step(std::span<const Instance>(&x, 1), chain, rng);
            chain.assign(1, w);
        }
        return w;
    }

    Detection finish(const std::vector<Message>& messages) override { return inner_.finish(messages); }

  private:
    Protocol& inner_;
};

}  // namespace

BatchedReduction batch_online(Protocol& online, int b, int kappa, int m_total) {
    if (kappa < 1 || m_total < 1) throw InvalidReduction("batch_online: kappa and m must be >= 1");
    if (kappa > m_total) throw InvalidReduction("batch_online: kappa exceeds the instance count");
    BatchedReduction r;
    r.protocol = std::make_unique<BatchedOnline>(online);
    r.spec = ProtocolSpec{b, kappa, m_total / kappa};
    return r;
}

TranscriptPmf enumerate_transcripts(const ProtocolFactory& make, const ProtocolSpec& spec,
                                    const HideSeekV1Spec& dist, int64_t cap) {
    validate(dist);
    return enumerate_core(make, spec, ops_for(dist), cap);
}

TranscriptPmf enumerate_transcripts(const ProtocolFactory& make, const ProtocolSpec& spec,
                                    const HideSeekV2Spec& dist, int64_t cap) {
    validate(dist);
    return enumerate_core(make, spec, ops_for(dist), cap);
}

std::vector<Message> messages_from_key(const std::string& key) {
    std::vector<Message> out;
    size_t pos = 0;
    while (pos < key.size()) {
        if (pos + 4 > key.size()) throw std::invalid_argument("messages_from_key: truncated key");
        int len = 0;
        for (int i = 0; i < 4; ++i) len |= (static_cast<unsigned char>(key[pos + i])) << (8 * i);
        pos += 4;
        Message m;
        int nbytes = (len + 7) / 8;
        if (pos + static_cast<size_t>(nbytes) > key.size())
            throw std::invalid_argument("messages_from_key: truncated payload");
        for (int i = 0; i < nbytes; ++i)
            m.append_bits(static_cast<unsigned char>(key[pos + i]), std::min(8, len - 8 * i));
        pos += nbytes;
        out.push_back(std::move(m));
    }
    return out;
}

double transcript_kl_nats(const TranscriptPmf& p, const TranscriptPmf& q) {
    double s = 0.0;
    for (const auto& [key, pv] : p) {
        if (pv == 0.0) continue;
        auto it = q.find(key);
        if (it == q.end() || it->second == 0.0) return std::numeric_limits<double>::infinity();
        s += pv * std::log(pv / it->second);
    }
    return std::max(s, 0.0);
}

KlBoundCheck transcript_kl_bound_check(const ProtocolFactory& make, const ProtocolSpec& spec,
                                       const HideSeekV1Spec& family, double rho, int64_t cap) {
    validate(spec);
    if (!(rho >= 0.0 && rho <= 0.25 / spec.n + 1e-15))
        throw RhoOutOfRange("transcript_kl_bound_check(v1): need rho <= 1/(4n)");
    double d = family.d;
    std::vector<KlBoundCheck::Rhs> rhs{
        {"51*mn*2^n*rho^2*b/d", 51.0 * spec.m * spec.n * std::pow(2.0, spec.n) * rho * rho * spec.b / d},
        {"min{60*mn*rho*b/d, 6*mn*rho^2}", std::min(60.0 * spec.m * spec.n * rho * spec.b / d, 6.0 * spec.m * spec.n * rho * rho)},
    };
    return kl_check_core(make, spec, family, rho, cap, rhs);
}

KlBoundCheck transcript_kl_bound_check(const ProtocolFactory& make, const ProtocolSpec& spec,
                                       const HideSeekV2Spec& family, double rho, int64_t cap) {
    validate(spec);
    double limit = std::min(1.0 / 27.0, static_cast<double>(family.d) / (14.0 * spec.n));
    if (family.d >= 2) limit = std::min(limit, 1.0 / (9.0 * std::log(static_cast<double>(family.d))));
    if (!(rho >= 0.0 && rho <= limit + 1e-15))
        throw RhoOutOfRange("transcript_kl_bound_check(v2): need rho <= min{1/27, 1/(9 ln d), d/(14n)}");
    std::vector<KlBoundCheck::Rhs> rhs{
        {"26*m*b/d", 26.0 * spec.m * spec.b / static_cast<double>(family.d)},
    };
    return kl_check_core(make, spec, family, rho, cap, rhs);
}

std::string transcript_to_json(const Transcript& t) {
    nlohmann::json j;
    j["messages"] = nlohmann::json::array();
    for (size_t i = 0; i < t.messages.size(); ++i) {
        j["messages"].push_back({{"round", i + 1}, {"length", t.messages[i].length()}, {"hex", t.messages[i].to_hex()}});
    }
    if (t.final_output.j == 0) {
        j["final"] = {{"index", t.final_output.i}};
    } else {
        j["final"] = {{"pair", {t.final_output.i, t.final_output.j}}};
    }
    return j.dump();
}

}  // namespace icsim

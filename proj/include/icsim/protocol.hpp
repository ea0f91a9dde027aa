#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "icsim/bits.hpp"
#include "icsim/distributions.hpp"
#include "icsim/errors.hpp"
#include "icsim/rng.hpp"

namespace icsim {

// b bits per message, batches of n instances, m rounds.
struct ProtocolSpec {
    int b = 1;
    int n = 1;
    int m = 1;
};

void validate(const ProtocolSpec& s);

using Message = BitString;

// Estimator output: a coordinate (j == 0), or a pair / matrix entry (i, j).
struct Detection {
    int i = 0;
    int j = 0;
    bool operator==(const Detection&) const = default;
};

struct Transcript {
    std::vector<Message> messages;
    Detection final_output;
};

// One round sees the fresh batch and every previous message;
// the final output may use all messages but is not budgeted. Implementations
// may cache values derived from their own randomness and already-emitted
// messages (that is memoization of f_t, not extra data access), but everything
// they learn about the data must flow through the returned messages.
class Protocol {
  public:
    virtual ~Protocol() = default;
    virtual Message step(std::span<const Instance> batch, const std::vector<Message>& prior, CounterRng& rng) = 0;
    virtual Detection finish(const std::vector<Message>& messages) = 0;
};

class InstanceSource {
  public:
    virtual ~InstanceSource() = default;
    // Fills `out`; false once exhausted.
    virtual bool next(Instance& out) = 0;
};

class VectorSource : public InstanceSource {
  public:
    explicit VectorSource(std::span<const Instance> data) : data_(data) {}
    bool next(Instance& out) override {
        if (pos_ >= data_.size()) return false;
        out = data_[pos_++];
        return true;
    }
    size_t consumed() const { return pos_; }

  private:
    std::span<const Instance> data_;
    size_t pos_ = 0;
};

class SamplerSource : public InstanceSource {
  public:
    using Fn = std::function<void(CounterRng&, Instance&)>;
    SamplerSource(Fn sampler, CounterRng rng) : fn_(std::move(sampler)), rng_(rng) {}
    bool next(Instance& out) override {
        fn_(rng_, out);
        ++count_;
        return true;
    }
    size_t consumed() const { return count_; }

  private:
    Fn fn_;
    CounterRng rng_;
    size_t count_ = 0;
};

SamplerSource make_source(const HideSeekV1Spec& s, CounterRng rng);
SamplerSource make_source(const HideSeekV2Spec& s, CounterRng rng);
SamplerSource make_source(const BanditLossSpec& s, CounterRng rng);
SamplerSource make_source(const SparsePcaSpec& s, CounterRng rng);
SamplerSource make_source(const MatrixOptSpec& s, CounterRng rng);

// Drives `protocol` for m rounds of n instances each, enforcing the b-bit cap
// on every message. Throws BudgetExceeded / InsufficientData.
Transcript run_protocol(Protocol& protocol, const ProtocolSpec& spec, InstanceSource& source, CounterRng& rng);

// Batching reduction: a b-memory online protocol consuming instances one
// at a time becomes a (b, kappa, floor(m/kappa)) batched protocol; trailing
// m mod kappa instances are never consumed. The inner protocol must be truly
// message-state-driven (reads only the previous message), which is what
// "b-memory online" means here.
struct BatchedReduction {
    std::unique_ptr<Protocol> protocol;
    ProtocolSpec spec;
};
BatchedReduction batch_online(Protocol& online, int b, int kappa, int m_total);

using ProtocolFactory = std::function<std::unique_ptr<Protocol>()>;

// Exact transcript distribution of a deterministic protocol: sums the product
// pmf over every input sequence. Key = concatenated Message::key() strings;
// decode with messages_from_key. Protocols that draw randomness trip the
// poisoned stream. Default cap bounds alphabet^(n*m).
constexpr int64_t kDefaultEnumerationCap = int64_t(1) << 24;

using TranscriptPmf = std::map<std::string, double>;

TranscriptPmf enumerate_transcripts(const ProtocolFactory& make, const ProtocolSpec& spec,
                                    const HideSeekV1Spec& dist, int64_t cap = kDefaultEnumerationCap);
TranscriptPmf enumerate_transcripts(const ProtocolFactory& make, const ProtocolSpec& spec,
                                    const HideSeekV2Spec& dist, int64_t cap = kDefaultEnumerationCap);

std::vector<Message> messages_from_key(const std::string& key);

// KL between two enumerated transcript distributions, in nats.
double transcript_kl_nats(const TranscriptPmf& p, const TranscriptPmf& q);

struct KlBoundCheck {
    double lhs_nats = 0.0;                 // (2/d) * sum_j KL(Pr0 || Prj)
    std::vector<double> per_j_kl_nats;     // KL(Pr0 || Prj), j = 1..d
    struct Rhs {
        std::string name;
        double value;
    };
    std::vector<Rhs> rhs;
    double tightest_rhs = 0.0;
    double margin = 0.0;  // tightest_rhs - lhs
    bool holds = false;
};

// Checks the transcript-KL upper bounds against the enumerated lhs. The V1
// family is checked against 51*m*n*2^n*rho^2*b/d and min{60*m*n*rho*b/d,
// 6*m*n*rho^2} (requires rho <= 1/(4n)); the V2 family against 26*m*b/d
// (requires rho <= min{1/27, 1/(9 ln d), d/(14n)}).
KlBoundCheck transcript_kl_bound_check(const ProtocolFactory& make, const ProtocolSpec& spec,
                                       const HideSeekV1Spec& family, double rho,
                                       int64_t cap = kDefaultEnumerationCap);
KlBoundCheck transcript_kl_bound_check(const ProtocolFactory& make, const ProtocolSpec& spec,
                                       const HideSeekV2Spec& family, double rho,
                                       int64_t cap = kDefaultEnumerationCap);

// Debug serialization: {"messages":[{"round","length","hex"}...],"final":{...}}.
std::string transcript_to_json(const Transcript& t);

}  // namespace icsim

#include "qkdwdm/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qkdwdm/errors.hpp"
#include "qkdwdm/rng.hpp"

namespace qkdwdm {

std::size_t CascadeConfig::initial_block(double qber, std::size_t n) const {
    std::size_t k;
    if (initial_block_fn) {
        k = initial_block_fn(qber);
    } else if (qber <= 0.0) {
        k = n;
    } else {
        k = static_cast<std::size_t>(std::ceil(0.73 / qber));
    }
    return std::clamp<std::size_t>(k, 2, std::max<std::size_t>(2, n / 2));
}

void CascadeConfig::validate() const {
    if (passes < 2) throw ConfigError("cascade needs at least two passes");
}

namespace {

struct Pass {
    std::vector<std::uint32_t> perm; // position -> key index
    std::vector<std::uint32_t> block_of_index;
    std::size_t block_size = 0;
    std::size_t n_blocks = 0;
    std::vector<std::uint8_t> mismatch; // alice parity xor bob parity, per block
};

class Session {
  public:
    Session(const BitBlock& alice, const BitBlock& bob, const CascadeConfig& cfg)
        : alice_(alice), bob_(bob), cfg_(cfg), n_(alice.size()) {}

    ReconcileResult run(double qber) {
        const int passes = cfg_.passes;
        std::size_t k = cfg_.initial_block(qber, n_);
        for (int p = 0; p < passes; ++p) {
            add_pass(p, k);
            if (p == 0 && odd_.empty()) break; // nothing to fix anywhere
            drain_odd_blocks();
            k = std::min(k * 2, std::max<std::size_t>(2, n_ / 2));
        }
        ReconcileResult out;
        out.corrected_bob = bob_;
        out.leakage_bits = transcript_.size();
        out.transcript = std::move(transcript_);
        return out;
    }

  private:
    std::pair<std::size_t, std::size_t> block_span(const Pass& pass, std::size_t b) const {
        const std::size_t lo = b * pass.block_size;
        return {lo, std::min(lo + pass.block_size, n_)};
    }

    bool parity(const BitBlock& bits, const Pass& pass, std::size_t lo, std::size_t hi) const {
        bool par = false;
        for (std::size_t i = lo; i < hi; ++i) par ^= bits.get(pass.perm[i]);
        return par;
    }

    // Alice reveals one parity over positions [lo, hi) of pass p's ordering.
    bool disclose(std::uint32_t p, std::uint32_t b, std::size_t lo, std::size_t hi) {
        if (transcript_.size() >= n_) {
            throw ProtocolError("cascade leakage reached the key length; aborting");
        }
        const bool par = parity(alice_, passes_[p], lo, hi);
        transcript_.push_back({p, b, static_cast<std::uint8_t>(par)});
        return par;
    }

    void add_pass(int index, std::size_t k) {
        Pass pass;
        pass.block_size = k;
        pass.n_blocks = (n_ + k - 1) / k;
        pass.perm = index == 0 ? identity() : seeded_permutation(static_cast<std::uint32_t>(n_),
                                                                 cfg_.shuffle_seed * 1000003ULL +
                                                                     static_cast<std::uint64_t>(index));
        pass.block_of_index.resize(n_);
        for (std::size_t pos = 0; pos < n_; ++pos) {
            pass.block_of_index[pass.perm[pos]] = static_cast<std::uint32_t>(pos / k);
        }
        pass.mismatch.assign(pass.n_blocks, 0);
        passes_.push_back(std::move(pass));
        const auto p = static_cast<std::uint32_t>(passes_.size() - 1);
        Pass& ref = passes_.back();
        for (std::size_t b = 0; b < ref.n_blocks; ++b) {
            const auto [lo, hi] = block_span(ref, b);
            const bool pa = disclose(p, static_cast<std::uint32_t>(b), lo, hi);
            const bool pb = parity(bob_, ref, lo, hi);
            if (pa != pb) {
                ref.mismatch[b] = 1;
                odd_.insert({p, static_cast<std::uint32_t>(b)});
            }
        }
    }

    // binary-search one error inside a mismatched block, flip it at Bob, and
    // toggle the mismatch state of every pass's block containing that bit
    void drain_odd_blocks() {
        while (!odd_.empty()) {
            const auto [p, b] = *odd_.begin();
            Pass& pass = passes_[p];
            auto [lo, hi] = block_span(pass, b);
            while (hi - lo > 1) {
                const std::size_t mid = lo + (hi - lo) / 2;
                const bool pa = disclose(p, b, lo, mid);
                const bool pb = parity(bob_, pass, lo, mid);
                if (pa != pb) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            const std::uint32_t bad = pass.perm[lo];
            bob_.flip(bad);
            for (std::uint32_t q = 0; q < passes_.size(); ++q) {
                Pass& other = passes_[q];
                const std::uint32_t c = other.block_of_index[bad];
                other.mismatch[c] ^= 1;
                if (other.mismatch[c]) {
                    odd_.insert({q, c});
                } else {
                    odd_.erase({q, c});
                }
            }
        }
    }

    std::vector<std::uint32_t> identity() const {
        std::vector<std::uint32_t> v(n_);
        for (std::size_t i = 0; i < n_; ++i) v[i] = static_cast<std::uint32_t>(i);
        return v;
    }

    BitBlock alice_;
    BitBlock bob_;
    const CascadeConfig& cfg_;
    std::size_t n_;
    std::vector<Pass> passes_;
    std::set<std::pair<std::uint32_t, std::uint32_t>> odd_;
    std::vector<TranscriptRecord> transcript_;
};

} // namespace

ReconcileResult cascade_reconcile(const BitBlock& alice, const BitBlock& bob,
                                  double qber_estimate, const CascadeConfig& cfg) {
    cfg.validate();
    if (alice.size() != bob.size()) throw ConfigError("cascade requires equal key lengths");
    if (alice.empty()) throw ConfigError("cascade requires a nonempty key");
    Session session(alice, bob, cfg);
    return session.run(qber_estimate);
}

} // namespace qkdwdm

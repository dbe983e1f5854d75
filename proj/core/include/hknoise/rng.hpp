#pragma once

#include <cstdint>

namespace hknoise {

// Counter-mode random stream built on the SplitMix64 finalizer.
//
// Output k of a stream with key K is mix64(K + (k+1) * GOLDEN), i.e. the
// plain SplitMix64 sequence started at state K, which makes every draw
// random-access: nothing depends on how many values were pulled before it.
//
// Stream derivation scheme (stable across versions; changing any constant
// below breaks replay of old manifests):
//
//   root(master_seed)        key = mix64(master_seed ^ GOLDEN)
//   stream.substream(i)      key' = mix64(key ^ mix64(i + SUBSTREAM_SALT))
//
// The simulation layers assign streams as
//
//   replicate r of a command       root.substream(r)
//   sweep row i, replicate r       root.substream(i).substream(r)
//   initial-condition draws        replicate_stream.substream(0)
//   noise draws                    replicate_stream.substream(1)
//
// and every noise model consumes exactly one counter per scalar draw, so the
// noise applied to agent i at destination step t (t >= 1) is draw number
// (t-1)*n + i of the replicate's noise substream, counting draws from 0.
// Together this means (master_seed, replicate, step, agent) pins each draw
// regardless of execution order or worker count.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t master_seed)
        : key_(mix64(master_seed ^ kGolden)) {}

    RandomStream substream(std::uint64_t index) const {
        return RandomStream(FromKey{}, mix64(key_ ^ mix64(index + kSubstreamSalt)));
    }

    std::uint64_t next_u64() {
        ++counter_;
        return mix64(key_ + counter_ * kGolden);
    }

    // Uniform in [0, 1), 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Advance without producing values (used by degenerate models to keep
    // the one-counter-per-draw discipline).
    void skip(std::uint64_t draws) { counter_ += draws; }

    std::uint64_t counter() const { return counter_; }
    std::uint64_t key() const { return key_; }

private:
    struct FromKey {};
    RandomStream(FromKey, std::uint64_t key) : key_(key) {}

    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kSubstreamSalt = 0xD1B54A32D192ED03ull;

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace hknoise

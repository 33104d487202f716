#pragma once

#include <cstdint>

namespace cmhrr {

// SplitMix64 (Steele, Lea & Flood; Vigna's reference implementation).
// Counter-based: output k of stream s is mix(s + (k+1) * GOLDEN), so any
// element is addressable without sequencing.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix(state_);
    }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// xoshiro256++ (Blackman & Vigna, 2019), state seeded with four SplitMix64
// outputs. Stream derivation for replicate i of base seed s uses the
// SplitMix64 stream s at counters 4i .. 4i+3, so replicate streams are
// disjoint and reproducible from (algorithm, s, i) alone.
class Xoshiro256PlusPlus {
public:
    explicit Xoshiro256PlusPlus(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    static Xoshiro256PlusPlus for_replicate(std::uint64_t base_seed, std::uint64_t replicate) {
        Xoshiro256PlusPlus rng(0);
        SplitMix64 sm(base_seed + 4 * replicate * SplitMix64::kGolden);
        for (auto& word : rng.state_) word = sm.next();
        return rng;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, k), k small; floor of a scaled uniform.
    int uniform_int(int k) {
        const int v = static_cast<int>(uniform() * static_cast<double>(k));
        return v < k ? v : k - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace cmhrr

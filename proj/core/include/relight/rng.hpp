#pragma once

#include <cstdint>

namespace relight {

// splitmix64 finalizer; statistically strong enough for stratification-free
// Monte Carlo sampling.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based sample stream: every random number is a pure function of
// (seed, pixel, sample, bounce, dimension), so renders are reproducible for
// any thread count or tile schedule. No sequential state is carried between
// pixels or samples.
class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::uint64_t pixel, std::uint64_t sample) {
        key_ = mix64(mix64(mix64(seed) ^ pixel) ^ sample);
    }

    void set_bounce(std::uint32_t bounce) {
        bounce_ = bounce;
        dim_ = 0;
    }

    // Uniform in [0, 1).
    float next() {
        const std::uint64_t h =
            mix64(key_ ^ (static_cast<std::uint64_t>(bounce_) << 32 | dim_++));
        return static_cast<float>(h >> 40) * 0x1p-24f;
    }

private:
    std::uint64_t key_;
    std::uint32_t bounce_ = 0;
    std::uint32_t dim_ = 0;
};

}  // namespace relight

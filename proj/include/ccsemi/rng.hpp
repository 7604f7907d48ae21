#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ccsemi {

/// Philox4x64-10 counter-based generator. The stream is fully determined by
/// the 128-bit key and the 256-bit starting counter; the counter is bumped
/// before each block of four outputs. Satisfies UniformRandomBitGenerator.
class Philox4x64 {
public:
    using result_type = std::uint64_t;
    using Key = std::array<std::uint64_t, 2>;
    using Counter = std::array<std::uint64_t, 4>;

    Philox4x64(Key key, Counter counter) : key_(key), counter_(counter) {}
    explicit Philox4x64(std::uint64_t seed) : Philox4x64({seed, 0}, {0, 0, 0, 0}) {}

    /// Independent stream for one replication: key (seed, 0), counter word 1
    /// set to the replication index.
    static Philox4x64 substream(std::uint64_t seed, std::uint64_t replication) {
        return Philox4x64({seed, 0}, {0, replication, 0, 0});
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// The ten-round bijection on one counter block.
    static Counter block(Key key, Counter counter);

private:
    Key key_;
    Counter counter_;
    Counter buffer_{};
    unsigned used_ = 4;
};

/// Uniform double on [0, 1) from the top 53 bits.
inline double uniform01(Philox4x64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace ccsemi

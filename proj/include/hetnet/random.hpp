#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hetnet {

/// Philox4x32 with 10 rounds: a keyed bijection on 128-bit counters.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key);
};

/// Uniform 32-bit generator over one substream, keyed by (seed, stream).
/// Draws depend only on those two values and the draw index, so each
/// realization can own a stream regardless of which thread runs it.
class RandomStream {
public:
    using result_type = std::uint32_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform double in [0, 1) from 53 random bits.
    double uniform();

private:
    void refill();

    Philox4x32::Key key_;
    Philox4x32::Counter counter_;
    Philox4x32::Counter buffer_{};
    int used_ = 4;
};

}  // namespace hetnet

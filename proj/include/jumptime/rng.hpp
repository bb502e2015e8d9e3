#pragma once
#include <array>
#include <cstdint>

namespace jumptime {

/**
 Philox4x64-10 counter-based generator (Salmon et al., SC'11).

 A stream is identified by (key, stream id); the 256-bit counter holds the
 block number in its low word and the stream id in its third word, so every
 (base_seed, trajectory index) pair owns an independent, reproducible sequence.
 */
class Philox4x64 {
public:
    static constexpr char const* algorithm = "philox4x64-10";

    using Block = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    Philox4x64(std::uint64_t base_seed, std::uint64_t stream);

    /// The raw bijection: ten rounds over `counter` with `key`.
    static Block encrypt(Block counter, Key key);

    std::uint64_t next_u64();
    /// Uniform double in the open interval (0, 1) from the top 53 bits.
    double uniform();

private:
    Key key;
    Block counter;
    Block buffer{};
    int used = 4;
};

/// SplitMix64 finalizer, used to spread user seeds over the key space.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace jumptime

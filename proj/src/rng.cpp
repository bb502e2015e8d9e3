#include "jumptime/rng.hpp"

namespace jumptime {

namespace {

constexpr std::uint64_t multiplier0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t multiplier1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t weyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t weyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    unsigned __int128 const p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Philox4x64::Philox4x64(std::uint64_t base_seed, std::uint64_t stream)
    : key{splitmix64(base_seed), splitmix64(base_seed ^ 0x5851F42D4C957F2DULL)},
      counter{0, 0, stream, 0} {}

Philox4x64::Block Philox4x64::encrypt(Block c, Key k) {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(multiplier0, c[0], hi0, lo0);
        mulhilo(multiplier1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += weyl0;
        k[1] += weyl1;
    }
    return c;
}

std::uint64_t Philox4x64::next_u64() {
    if (used == 4) {
        buffer = encrypt(counter, key);
        if (++counter[0] == 0)
            ++counter[1];
        used = 0;
    }
    return buffer[used++];
}

double Philox4x64::uniform() {
    // (m + 0.5) / 2^53 never hits 0 or 1.
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace jumptime

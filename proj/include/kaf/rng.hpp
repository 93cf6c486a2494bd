#pragma once
// Seed derivation for independent random streams.
//
// Every random quantity in an experiment comes from its own mt19937_64
// engine seeded by derive_seed(master, run, stream). Runs never share an
// engine, so results do not depend on how runs are scheduled.

#include <cstdint>
#include <random>

namespace kaf {

enum class Stream : std::uint64_t {
    input = 1,
    noise = 2,
    dictionary = 3,
    moments = 4,
    oracle = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, Stream stream) {
    return splitmix64(splitmix64(splitmix64(master) ^ run) ^ static_cast<std::uint64_t>(stream));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, std::uint64_t run, Stream stream) {
    return Engine(derive_seed(master, run, stream));
}

}  // namespace kaf

#pragma once

#include <cstdint>
#include <random>

namespace odma_ura {

using Rng = std::mt19937_64;

/// Independent sub-stream tags derived from one master seed.
enum class Stream : std::uint64_t {
    Patterns = 1,
    Preamble = 2,
    Trial = 3,
};

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0)
{
    return mix64(mix64(master ^ mix64(static_cast<std::uint64_t>(stream))) + index);
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t index = 0)
{
    return Rng(derive_seed(master, stream, index));
}

}  // namespace odma_ura

#ifndef PINN_RANDOM_HPP_
#define PINN_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pinn {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream ids keep generators for different purposes independent.
enum class Stream : std::uint64_t {
  kInit = 1,
  kInterior = 2,
  kInitial = 3,
  kBoundary = 4,
  kOracle = 5,
  kTest = 6,
};

// Seed for one stream: SplitMix64 folded over (seed, stream, tags...).
inline std::uint64_t stream_seed(std::uint64_t seed, Stream stream,
                                 std::initializer_list<std::uint64_t> tags = {}) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  for (auto t : tags) h = splitmix64(h ^ t);
  return h;
}

// Engine with a sequence fixed by the C++ standard.
using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, Stream stream,
                          std::initializer_list<std::uint64_t> tags = {}) {
  return Engine(stream_seed(seed, stream, tags));
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1): the midpoint of a 53-bit cell.
inline double uniform_open(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform integer in [0, n) by 128-bit multiply-high.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(eng()) * n) >> 64);
}

}  // namespace pinn

#endif  // PINN_RANDOM_HPP_

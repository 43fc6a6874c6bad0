#ifndef HDWN_RNG_HPP
#define HDWN_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace hdwn {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a; stable across platforms, used to turn a cell descriptor
/// into a stream identifier.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent stream for replication `index` of stream family `stream_id`.
/// A pure function of its three arguments.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint64_t index) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master_seed), hi(master_seed), lo(stream_id), hi(stream_id), lo(index), hi(index)};
  return Rng(seq);
}

inline Rng make_stream(std::uint64_t seed) { return make_stream(seed, 0, 0); }

}  // namespace hdwn

#endif  // HDWN_RNG_HPP

#include "samarl/harness/seeding.hpp"

namespace samarl::harness {

namespace {

// FNV-1a over the stream name.
std::uint64_t name_hash(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::mt19937_64 stream(std::uint64_t seed, std::string_view name) {
  const std::uint64_t tag = name_hash(name);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return std::mt19937_64(seq);
}

SeedStreams::SeedStreams(std::uint64_t seed)
    : env(stream(seed, "env")),
      buffer(stream(seed, "buffer")),
      exploration(stream(seed, "exploration")),
      target_noise(stream(seed, "target_noise")),
      init(stream(seed, "init")) {}

}  // namespace samarl::harness

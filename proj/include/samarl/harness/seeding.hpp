#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace samarl::harness {

/// Independent generator for a named component, derived from the run seed.
std::mt19937_64 stream(std::uint64_t seed, std::string_view name);

/// Per-component generators of one run.
struct SeedStreams {
  std::mt19937_64 env;
  std::mt19937_64 buffer;
  std::mt19937_64 exploration;
  std::mt19937_64 target_noise;
  std::mt19937_64 init;

  explicit SeedStreams(std::uint64_t seed);
};

}  // namespace samarl::harness

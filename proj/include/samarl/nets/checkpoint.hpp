#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "samarl/nets/module.hpp"

namespace samarl::nets {

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

struct CheckpointEntry {
  std::string name;
  nd::Shape shape;
  std::uint64_t offset = 0;  // bytes into tensors.bin
};

struct CheckpointManifest {
  int version = kCheckpointVersion;
  std::string algo;
  std::string scenario;
  std::size_t agents = 0;
  std::uint64_t episode = 0;
  std::vector<CheckpointEntry> entries;
};

struct Checkpoint {
  CheckpointManifest manifest;
  std::vector<NamedTensor<float>> tensors;

  /// nullptr when absent.
  const Tensor<float>* find(const std::string& name) const;
};

/// Writes <dir>/manifest.txt and <dir>/tensors.bin (little-endian float32).
/// Entries in `meta` are ignored and regenerated from `tensors`.
void save_checkpoint(const std::filesystem::path& dir, const CheckpointManifest& meta,
                     const std::vector<NamedTensor<float>>& tensors);

Checkpoint load_checkpoint(const std::filesystem::path& dir);

/// Copies every parameter of `module` (named with `prefix`) out of the checkpoint.
/// Missing names or shape differences raise LoadError.
void restore_module(Module<float>& module, const std::string& prefix, const Checkpoint& checkpoint);

}  // namespace samarl::nets

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiflow/networks.hpp"
#include "epiflow/priors.hpp"
#include "epiflow/training.hpp"

namespace epiflow {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Self-describing training snapshot: everything needed to rebuild the
// estimator and sample posteriors, plus optimizer state and the loss curve.
struct Checkpoint {
  struct Blob {
    std::string name;
    std::vector<int> shape;
    std::vector<float> data;
  };

  std::uint64_t config_hash = 0;
  NetworkConfig net;
  ParameterSpace space;
  SimulatorSpec sim;
  long long optimizer_step = 0;
  long long iterations = 0;
  std::vector<float> loss_history;
  std::vector<Blob> weights;
  std::vector<Blob> m_moments;
  std::vector<Blob> v_moments;
};

// FNV-1a over the canonical serialized configuration; identifies which
// (network, priors, simulator) triple a checkpoint belongs to.
std::uint64_t config_fingerprint(const NetworkConfig& net,
                                 const ParameterSpace& space,
                                 const SimulatorSpec& sim);

// FNV-1a over the raw weight bytes; used to assert inference is read-only.
std::uint64_t weight_fingerprint(const Estimator<float>& est);

Checkpoint make_checkpoint(const Estimator<float>& est,
                           const ParameterSpace& space, const SimulatorSpec& sim,
                           long long iterations,
                           const std::vector<float>& loss_history,
                           long long optimizer_step);

// Rebuilds the estimator from net config and loads weights and moments.
Estimator<float> build_estimator(const Checkpoint& ckpt);

// File format: magic, version, JSON header, little-endian f32 blobs, CRC32
// trailer. Writes are atomic (temp file + rename).
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);
// Refuses (naming both hashes) when the file belongs to another config.
Checkpoint load_checkpoint(const std::string& path, std::uint64_t expected_hash);

}  // namespace epiflow

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/adam.hpp"
#include "core/params.hpp"

namespace qagen::train {

struct CheckpointMeta {
  int64_t step = 0;
  std::string rng_state;
  std::string config_hash;
  std::string config_json;  // written to the sidecar
  std::vector<std::string> vocab_tokens;
};

// Versioned binary container of named tensors (parameters + optimizer
// moments) plus a JSON config sidecar at <path>.json. Round-trips
// bit-exactly.
void save_checkpoint(const std::string& path, const ParameterStore& store, const Adam& adam,
                     const CheckpointMeta& meta);

// The store must already hold identically-named parameters (from model
// init); values are overwritten in place.
CheckpointMeta load_checkpoint(const std::string& path, ParameterStore& store, Adam& adam);

// Reads only the sidecar-backed metadata (config + vocab) without touching
// parameter values.
CheckpointMeta peek_checkpoint(const std::string& path);

// FNV-1a over all parameter bytes; identifies the exact weights.
std::string param_hash(const ParameterStore& store);

}  // namespace qagen::train

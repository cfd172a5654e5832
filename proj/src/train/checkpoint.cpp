#include "train/checkpoint.hpp"

#include <fstream>

#include "core/serialize.hpp"

namespace qagen::train {

namespace {
constexpr char kMagic[] = "QGCK";
constexpr uint64_t kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const ParameterStore& store, const Adam& adam,
                     const CheckpointMeta& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
  os.write(kMagic, 4);
  ser::write_u64(os, kVersion);
  ser::write_u64(os, static_cast<uint64_t>(meta.step));
  ser::write_string(os, meta.rng_state);
  ser::write_string(os, meta.config_hash);

  ser::write_u64(os, meta.vocab_tokens.size());
  for (const auto& t : meta.vocab_tokens) ser::write_string(os, t);

  ser::write_u64(os, store.all().size());
  for (const auto& [name, p] : store.all()) {
    ser::write_string(os, name);
    ser::write_u64(os, p.trainable ? 1 : 0);
    ser::write_tensor(os, p.value);
  }

  const auto& state = const_cast<Adam&>(adam).state();
  ser::write_u64(os, static_cast<uint64_t>(adam.steps()));
  ser::write_u64(os, state.size());
  for (const auto& [name, mv] : state) {
    ser::write_string(os, name);
    ser::write_tensor(os, mv.first);
    ser::write_tensor(os, mv.second);
  }
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);

  std::ofstream sidecar(path + ".json");
  sidecar << meta.config_json;
}

namespace {
CheckpointMeta read_header(std::ifstream& is, const std::string& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != kMagic)
    throw std::runtime_error("not a checkpoint file: " + path);
  uint64_t version = ser::read_u64(is);
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                             " in " + path);
  CheckpointMeta meta;
  meta.step = static_cast<int64_t>(ser::read_u64(is));
  meta.rng_state = ser::read_string(is);
  meta.config_hash = ser::read_string(is);
  uint64_t n_vocab = ser::read_u64(is);
  meta.vocab_tokens.reserve(n_vocab);
  for (uint64_t i = 0; i < n_vocab; ++i) meta.vocab_tokens.push_back(ser::read_string(is));
  return meta;
}
}  // namespace

CheckpointMeta load_checkpoint(const std::string& path, ParameterStore& store, Adam& adam) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  CheckpointMeta meta = read_header(is, path);

  uint64_t n_params = ser::read_u64(is);
  if (n_params != store.all().size())
    throw std::runtime_error("checkpoint parameter count mismatch in " + path);
  for (uint64_t i = 0; i < n_params; ++i) {
    std::string name = ser::read_string(is);
    bool trainable = ser::read_u64(is) != 0;
    Tensor value = ser::read_tensor(is);
    Parameter& p = store.get(name);
    if (!p.value.same_shape(value))
      throw std::runtime_error("checkpoint shape mismatch for " + name);
    p.value = std::move(value);
    p.trainable = trainable;
  }

  adam.set_steps(static_cast<int64_t>(ser::read_u64(is)));
  adam.state().clear();
  uint64_t n_state = ser::read_u64(is);
  for (uint64_t i = 0; i < n_state; ++i) {
    std::string name = ser::read_string(is);
    Tensor m = ser::read_tensor(is);
    Tensor v = ser::read_tensor(is);
    adam.state().emplace(name, std::make_pair(std::move(m), std::move(v)));
  }

  std::ifstream sidecar(path + ".json");
  if (sidecar)
    meta.config_json.assign(std::istreambuf_iterator<char>(sidecar),
                            std::istreambuf_iterator<char>());
  return meta;
}

CheckpointMeta peek_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  CheckpointMeta meta = read_header(is, path);
  std::ifstream sidecar(path + ".json");
  if (sidecar)
    meta.config_json.assign(std::istreambuf_iterator<char>(sidecar),
                            std::istreambuf_iterator<char>());
  return meta;
}

std::string param_hash(const ParameterStore& store) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& [name, p] : store.all()) {
    mix(name.data(), name.size());
    mix(p.value.data.data(), p.value.data.size() * sizeof(double));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace qagen::train

#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace qagen {

struct Parameter {
  Tensor value;
  Tensor grad;
  bool trainable = true;
};

// Named parameters with deterministic (sorted) iteration order.
class ParameterStore {
 public:
  Parameter& add(const std::string& name, Tensor init, bool trainable = true) {
    auto [it, inserted] = params_.try_emplace(name);
    if (!inserted) throw std::runtime_error("duplicate parameter: " + name);
    it->second.value = std::move(init);
    it->second.grad = Tensor::zeros(it->second.value.rows, it->second.value.cols);
    it->second.trainable = trainable;
    return it->second;
  }

  Parameter& get(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw std::runtime_error("unknown parameter: " + name);
    return it->second;
  }
  const Parameter& get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw std::runtime_error("unknown parameter: " + name);
    return it->second;
  }
  bool contains(const std::string& name) const { return params_.count(name) != 0; }

  void zero_grads() {
    for (auto& [_, p] : params_) p.grad.set_zero();
  }

  std::map<std::string, Parameter>& all() { return params_; }
  const std::map<std::string, Parameter>& all() const { return params_; }

  // Glorot-uniform weight, used for every non-embedding matrix.
  Parameter& add_glorot(const std::string& name, int rows, int cols, Rng& rng,
                        bool trainable = true) {
    double s = std::sqrt(6.0 / (rows + cols));
    return add(name, rng.uniform_tensor(rows, cols, -s, s), trainable);
  }
  Parameter& add_zeros(const std::string& name, int rows, int cols, bool trainable = true) {
    return add(name, Tensor::zeros(rows, cols), trainable);
  }

 private:
  std::map<std::string, Parameter> params_;
};

}  // namespace qagen

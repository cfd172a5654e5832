#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "core/params.hpp"

namespace qagen {

// Adam with optional global-norm gradient clipping. Frozen parameters are
// skipped entirely; their moments are never allocated.
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  int64_t steps() const { return t_; }

  double grad_norm(const ParameterStore& store) const {
    double sq = 0.0;
    for (const auto& [name, p] : store.all()) {
      if (!p.trainable) continue;
      for (double g : p.grad.data) sq += g * g;
    }
    return std::sqrt(sq);
  }

  void step(ParameterStore& store, double clip_norm = 0.0) {
    double scale = 1.0;
    if (clip_norm > 0.0) {
      double n = grad_norm(store);
      if (n > clip_norm) scale = clip_norm / n;
    }
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (auto& [name, p] : store.all()) {
      if (!p.trainable) continue;
      auto& [m, v] = moments(name, p);
      for (size_t i = 0; i < p.value.data.size(); ++i) {
        double g = p.grad.data[i] * scale;
        m.data[i] = beta1_ * m.data[i] + (1.0 - beta1_) * g;
        v.data[i] = beta2_ * v.data[i] + (1.0 - beta2_) * g * g;
        double mhat = m.data[i] / bc1;
        double vhat = v.data[i] / bc2;
        p.value.data[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

  std::map<std::string, std::pair<Tensor, Tensor>>& state() { return state_; }
  void set_steps(int64_t t) { t_ = t; }

 private:
  std::pair<Tensor, Tensor>& moments(const std::string& name, const Parameter& p) {
    auto it = state_.find(name);
    if (it == state_.end()) {
      it = state_
               .emplace(name, std::make_pair(Tensor::zeros(p.value.rows, p.value.cols),
                                             Tensor::zeros(p.value.rows, p.value.cols)))
               .first;
    }
    return it->second;
  }

  double lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::map<std::string, std::pair<Tensor, Tensor>> state_;
};

}  // namespace qagen

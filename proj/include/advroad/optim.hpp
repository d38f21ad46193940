#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "advroad/tensor.hpp"

namespace advroad {

// Adam with the usual bias correction. Parameter updates happen on raw tensor
// storage, outside any tape.
template <typename S>
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::vector<Tensor<S>>& params, const GradMap<S>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (auto& p : params) {
      if (!grads.has(p)) continue;
      const Tensor<S>& g = grads.at(p);
      auto& m = moment1_[p.id()];
      auto& v = moment2_[p.id()];
      if (m.empty()) m.assign(static_cast<std::size_t>(p.size()), 0.0);
      if (v.empty()) v.assign(static_cast<std::size_t>(p.size()), 0.0);
      S* pd = p.data();
      const S* gd = g.data();
      for (long i = 0; i < p.size(); ++i) {
        const double gi = static_cast<double>(gd[i]);
        m[i] = beta1_ * m[i] + (1.0 - beta1_) * gi;
        v[i] = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
        const double mh = m[i] / bc1;
        const double vh = v[i] / bc2;
        pd[i] = static_cast<S>(static_cast<double>(pd[i]) - lr_ * mh / (std::sqrt(vh) + eps_));
      }
    }
  }

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::unordered_map<std::uint64_t, std::vector<double>> moment1_, moment2_;
};

}  // namespace advroad

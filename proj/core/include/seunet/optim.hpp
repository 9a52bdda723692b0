#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "seunet/tensor.hpp"

namespace seunet {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled (AdamW) when > 0
};

/// Per-parameter Adam moments plus the shared step counter.
template <class T>
struct OptimizerState {
  AdamConfig cfg;
  std::vector<Grid<T>> m;
  std::vector<Grid<T>> v;
  long t = 0;

  static OptimizerState init(const std::vector<Tensor<T>>& params, AdamConfig cfg) {
    OptimizerState s;
    s.cfg = cfg;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const auto& p : params) {
      s.m.emplace_back(p.shape());
      s.v.emplace_back(p.shape());
    }
    return s;
  }
};

/// One (decoupled-decay) Adam step over named parameters. The whole step is
/// rejected before any mutation if some gradient is non-finite.
template <class T>
void adam_step(std::vector<Tensor<T>>& params, OptimizerState<T>& state) {
  if (params.size() != state.m.size())
    throw std::invalid_argument("adam_step: state was initialized for a different parameter list");
  for (auto& p : params) {
    if (!p.has_grad()) continue;
    for (T g : p.grad().data)
      if (!std::isfinite(static_cast<double>(g)))
        throw std::runtime_error("adam_step: non-finite gradient in parameter '" +
                                 (p.name().empty() ? std::string("<unnamed>") : p.name()) + "'");
  }

  state.t += 1;
  const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  const double lr = state.cfg.lr, eps = state.cfg.eps, wd = state.cfg.weight_decay;

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& pv = params[i].value().data;
    auto& m = state.m[i].data;
    auto& v = state.v[i].data;
    const bool has_g = params[i].has_grad();
    const T* g = has_g ? params[i].grad().data.data() : nullptr;
    for (std::size_t j = 0; j < pv.size(); ++j) {
      const double gj = g ? static_cast<double>(g[j]) : 0.0;
      m[j] = static_cast<T>(b1 * m[j] + (1.0 - b1) * gj);
      v[j] = static_cast<T>(b2 * v[j] + (1.0 - b2) * gj * gj);
      double p = static_cast<double>(pv[j]);
      if (wd > 0) p -= lr * wd * p;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p -= lr * mhat / (std::sqrt(vhat) + eps);
      pv[j] = static_cast<T>(p);
    }
  }
}

template <class T>
void zero_grads(std::vector<Tensor<T>>& params) {
  for (auto& p : params) p.zero_grad();
}

}  // namespace seunet

#include "wabe/trainer/adam.hpp"

#include "wabe/core/error.hpp"

#include <cmath>

namespace wabe {

bool AdamState::all_finite() const {
  for (double x : m) {
    if (!std::isfinite(x)) return false;
  }
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               const AdamConfig& config) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ContractViolation("adam_step: parameter, gradient and moment sizes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

}  // namespace wabe

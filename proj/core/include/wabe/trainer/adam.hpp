#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wabe {

struct AdamConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moments for a flat parameter vector.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  AdamState() = default;
  explicit AdamState(std::size_t count) : m(count, 0.0), v(count, 0.0) {}

  bool all_finite() const;
};

/// One bias-corrected Adam update in place. Throws ContractViolation on a
/// size mismatch.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               const AdamConfig& config);

}  // namespace wabe

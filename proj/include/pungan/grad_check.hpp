#pragma once

#include <functional>
#include <vector>

#include "pungan/matrix.hpp"

namespace pungan {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::size_t worst_param = 0;
  std::size_t worst_coordinate = 0;
  double tolerance = 0.0;

  bool passed() const { return max_rel_error < tolerance; }
};

// Compares analytic gradients against central finite differences,
// coordinate by coordinate:
//
//   numeric_i = (loss(p_i + eps) - loss(p_i - eps)) / (2 eps)
//   rel_i     = |analytic_i - numeric_i| / max(|analytic_i|, |numeric_i|, 1e-6)
//
// `loss_fn` must be deterministic and must read the current contents of
// `params` on every call. `analytic_grad_fn` returns one gradient matrix per
// parameter, in the same order as `params`, evaluated at the current values.
GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           const std::function<std::vector<Matrix>()>& analytic_grad_fn,
                           const std::vector<Matrix*>& params, double epsilon, double tolerance);

}  // namespace pungan

#include "pungan/grad_check.hpp"

#include <cmath>
#include <string>

namespace pungan {

GradCheckReport grad_check(const std::function<double()>& loss_fn,
                           const std::function<std::vector<Matrix>()>& analytic_grad_fn,
                           const std::vector<Matrix*>& params, double epsilon, double tolerance) {
  std::vector<Matrix> analytic = analytic_grad_fn();
  if (analytic.size() != params.size()) {
    throw std::invalid_argument("grad_check: analytic gradient count does not match parameters");
  }
  GradCheckReport report;
  report.tolerance = tolerance;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Matrix& m = *params[p];
    if (!m.same_shape(analytic[p])) {
      throw ShapeError("grad_check: gradient shape mismatch at parameter " + std::to_string(p));
    }
    for (std::size_t i = 0; i < m.data.size(); ++i) {
      const double saved = m.data[i];
      m.data[i] = saved + epsilon;
      const double up = loss_fn();
      m.data[i] = saved - epsilon;
      const double down = loss_fn();
      m.data[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[p].data[i];
      const double abs_err = std::fabs(a - numeric);
      const double rel = abs_err / std::max({std::fabs(a), std::fabs(numeric), 1e-6});
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = p;
        report.worst_coordinate = i;
      }
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      ++report.coordinates_checked;
    }
  }
  return report;
}

}  // namespace pungan

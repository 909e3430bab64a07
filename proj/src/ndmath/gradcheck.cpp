#include "samarl/ndmath/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace samarl::nd {

GradCheckReport gradient_check(const std::function<Tensor<double>()>& loss,
                               const std::vector<NamedParameter>& params, double step) {
  GradCheckReport report;
  for (const auto& p : params) {
    Tensor<double> t = p.tensor;
    t.zero_grad();
  }
  {
    const auto value = loss();
    if (!std::isfinite(value.item())) {
      report.finite = false;
      report.diagnostic = "loss is non-finite at the base point";
      return report;
    }
    backward(value);
  }

  NoGradGuard no_grad;
  for (const auto& p : params) {
    Tensor<double> t = p.tensor;
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    auto values = t.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = loss().item();
      values[i] = saved - step;
      const double down = loss().item();
      values[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(analytic[i])) {
        std::ostringstream msg;
        msg << "non-finite value while perturbing " << p.name << "[" << i << "]: f(+h)=" << up
            << " f(-h)=" << down << " analytic=" << analytic[i];
        report.finite = false;
        report.diagnostic = msg.str();
        return report;
      }
      const double numeric = (up - down) / (2.0 * step);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic[i] - numeric) / denom;
      ++report.elements_checked;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_parameter = p.name;
        report.worst_index = i;
        report.worst_analytic = analytic[i];
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace samarl::nd

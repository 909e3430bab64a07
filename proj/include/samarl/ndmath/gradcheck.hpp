#pragma once

#include <functional>
#include <string>
#include <vector>

#include "samarl/ndmath/tensor.hpp"

namespace samarl::nd {

struct NamedParameter {
  std::string name;
  Tensor<double> tensor;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t elements_checked = 0;
  bool finite = true;
  std::string diagnostic;  // set when a non-finite value was met
};

/// Compares reverse-mode gradients of `loss` against central differences,
/// element by element:  |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
/// `loss` must rebuild its graph from the current parameter values on every
/// call. Parameters are restored exactly afterwards.
GradCheckReport gradient_check(const std::function<Tensor<double>()>& loss,
                               const std::vector<NamedParameter>& params, double step = 1e-5);

}  // namespace samarl::nd

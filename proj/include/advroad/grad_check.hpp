#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "advroad/error.hpp"
#include "advroad/ops.hpp"
#include "advroad/tensor.hpp"

namespace advroad {

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
  long checked = 0;
};

// Compares the taped gradient of a scalar-valued function against central
// finite differences, coordinate by coordinate. Coordinates flagged in
// `exclude` (e.g. sitting exactly on a relu kink) are skipped. Relative error
// uses an absolute floor of 1e-8 in the denominator.
template <typename S>
GradCheckReport grad_check(const std::function<Tensor<S>(const Tensor<S>&)>& fn,
                           const Tensor<S>& point, double eps, double tol,
                           const std::vector<bool>* exclude = nullptr) {
  if (eps <= 0) raise(Errc::InvalidConfig, "grad_check: eps must be positive");

  Tensor<S> x = point.detach();
  x.set_requires_grad(true);

  Tape<S> tape;
  Tensor<S> analytic;
  {
    typename Tape<S>::Scope scope(tape);
    Tensor<S> y = fn(x);
    if (y.size() != 1) raise(Errc::NonScalarLoss, "grad_check: fn must return a scalar");
    if (!std::isfinite(static_cast<double>(y.item())))
      raise(Errc::NonFinite, "grad_check: fn value is not finite");
    auto grads = backward(tape, y);
    analytic = grads.has(x) ? grads.at(x) : Tensor<S>::zeros(x.shape());
  }

  GradCheckReport report;
  Tensor<S> probe = point.detach();
  for (long i = 0; i < probe.size(); ++i) {
    if (exclude && (*exclude)[static_cast<std::size_t>(i)]) continue;
    const S saved = probe.data()[i];
    probe.data()[i] = saved + static_cast<S>(eps);
    const double up = static_cast<double>(fn(probe).item());
    probe.data()[i] = saved - static_cast<S>(eps);
    const double dn = static_cast<double>(fn(probe).item());
    probe.data()[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(dn))
      raise(Errc::NonFinite, "grad_check: fn value is not finite near coordinate " +
                                 std::to_string(i));
    const double fd = (up - dn) / (2.0 * eps);
    const double an = static_cast<double>(analytic.data()[i]);
    const double denom = std::max(std::max(std::abs(fd), std::abs(an)), 1e-8);
    report.max_rel_err = std::max(report.max_rel_err, std::abs(an - fd) / denom);
    ++report.checked;
  }
  report.pass = report.max_rel_err <= tol;
  return report;
}

}  // namespace advroad

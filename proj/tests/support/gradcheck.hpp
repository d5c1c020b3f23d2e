#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "macgrid/scorer.hpp"
#include "reference_model.hpp"

namespace macgrid::testing {

inline constexpr double kFiniteDifferenceStep = 1e-4;
inline constexpr double kGradientTolerance = 1e-4;

struct GradientReport {
  double max_error = 0.0;
  std::string worst_tensor;
  std::map<std::string, double> per_tensor;
};

// Central differences of the reference loss on every entry of every tensor,
// compared against backward(). Error is |a - fd| / max(1e-8, |fd|).
// The reference loss is evaluated in long double: with a 1e-4 step, double
// rounding in the loss alone puts ~1e-11 of noise on each difference,
// which swamps gradient entries near 1e-8.
inline GradientReport check_gradients(const Model& model, const Sentence& sentence,
                                      const GoldTargets& gold,
                                      double step = kFiniteDifferenceStep) {
  using T = long double;
  const ModelParams analytic = backward(model, forward(model, sentence), gold);
  RefParams<T> ref = to_reference<T>(model.params);

  GradientReport report;
  std::size_t index = 0;
  analytic.for_each([&](const std::string& name, const auto& g) {
    auto& tensor = ref.tensors[index++];
    double worst = 0.0;
    for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
      for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
        T& w = tensor(r, c);
        const T saved = w;
        w = saved + static_cast<T>(step);
        const T up = reference_loss(model, ref, sentence, gold);
        w = saved - static_cast<T>(step);
        const T down = reference_loss(model, ref, sentence, gold);
        w = saved;
        const double fd = static_cast<double>((up - down) / (2 * static_cast<T>(step)));
        const double a = g(r, c);
        worst = std::max(worst, std::abs(a - fd) / std::max(1e-8, std::abs(fd)));
      }
    }
    report.per_tensor[name] = worst;
    if (worst >= report.max_error) {
      report.max_error = worst;
      report.worst_tensor = name;
    }
  });
  return report;
}

}  // namespace macgrid::testing

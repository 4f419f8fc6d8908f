#pragma once

#include <cmath>
#include <string>

#include "macroml/common/linalg.hpp"

namespace macroml {

enum class KernelType { Linear, Rbf };

std::string to_string(KernelType k);

struct Kernel {
  KernelType type = KernelType::Rbf;
  double sigma = 1.0;  // RBF bandwidth

  /// exp(-||a-b||^2 / (2 sigma^2)) or a'b.
  template <class A, class B>
  double operator()(const A& a, const B& b) const {
    double acc = 0.0;
    if (type == KernelType::Linear) {
      for (Eigen::Index k = 0; k < a.size(); ++k) acc += a[k] * b[k];
      return acc;
    }
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      const double d = a[k] - b[k];
      acc += d * d;
    }
    return std::exp(-acc / (2.0 * sigma * sigma));
  }
};

/// K(a_i, b_j) for all row pairs. The parallel version splits rows across
/// OpenMP threads and is bit-identical to the serial one.
/// Throws DomainError on a non-finite entry or a non-positive RBF bandwidth.
Matrix gram(const Matrix& a, const Matrix& b, const Kernel& k);
Matrix gram_serial(const Matrix& a, const Matrix& b, const Kernel& k);

}  // namespace macroml

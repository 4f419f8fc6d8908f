#pragma once

#include "macroml/common/linalg.hpp"
#include "macroml/data/factors.hpp"

namespace macroml {

struct FitOptions {
  bool intercept = true;    // centre y and columns, restore the constant at prediction
  bool standardize = true;  // scale columns to unit sample variance
};

/// Column transform and target offset captured at fit time.
struct Preprocess {
  Standardization x;
  double y_offset = 0.0;

  static Preprocess fit(const Matrix& z, const Vector& y, const FitOptions& opts);
  Matrix transform(const Matrix& z) const { return x.apply(z); }
};

}  // namespace macroml

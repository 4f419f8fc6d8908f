#include "macroml/models/preprocess.hpp"

namespace macroml {

Preprocess Preprocess::fit(const Matrix& z, const Vector& y, const FitOptions& opts) {
  Preprocess p;
  p.x = Standardization::fit(z, opts.intercept, opts.standardize);
  p.y_offset = opts.intercept && y.size() > 0 ? y.mean() : 0.0;
  return p;
}

}  // namespace macroml

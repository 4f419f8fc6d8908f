#include "macroml/models/kernels.hpp"

#include "macroml/common/error.hpp"

namespace macroml {

std::string to_string(KernelType k) { return k == KernelType::Linear ? "Lin" : "RBF"; }

namespace {

void check_kernel(const Kernel& k) {
  if (k.type == KernelType::Rbf && !(k.sigma > 0.0 && std::isfinite(k.sigma)))
    throw DomainError("RBF bandwidth must be positive and finite, got " + std::to_string(k.sigma));
}

void check_finite(const Matrix& g) {
  if (!g.allFinite()) throw DomainError("non-finite kernel entry");
}

}  // namespace

Matrix gram_serial(const Matrix& a, const Matrix& b, const Kernel& k) {
  check_kernel(k);
  if (a.cols() != b.cols()) throw ArgumentError("kernel inputs differ in column count");
  Matrix g(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) g(i, j) = k(a.row(i), b.row(j));
  check_finite(g);
  return g;
}

Matrix gram(const Matrix& a, const Matrix& b, const Kernel& k) {
  check_kernel(k);
  if (a.cols() != b.cols()) throw ArgumentError("kernel inputs differ in column count");
  Matrix g(a.rows(), b.rows());
  const Eigen::Index rows = a.rows();
#pragma omp parallel for schedule(static) if (rows * b.rows() > 4096)
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) g(i, j) = k(a.row(i), b.row(j));
  check_finite(g);
  return g;
}

}  // namespace macroml

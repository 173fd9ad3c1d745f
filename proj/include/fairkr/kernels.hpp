#pragma once

#include <string>

#include "fairkr/numerics.hpp"

namespace fairkr::kernels {

enum class KernelFamily { Linear, Polynomial, Sigmoid, RBF };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

// Kernel family plus hyperparameters.
//   Linear:      k(x,z) = x.z
//   Polynomial:  k(x,z) = (x.z + coef)^degree          (degree >= 1)
//   Sigmoid:     k(x,z) = tanh(gain * x.z + coef)      (gain > 0)
//   RBF:         k(x,z) = exp(-gain * |x - z|^2)       (gain > 0)
// A nonpositive gain on Sigmoid/RBF may be left as 0 in configs to mean
// "1 / feature dimension"; resolve_gain() fills it in. validate() rejects
// specs that are still unresolved.
struct KernelSpec {
  KernelFamily family = KernelFamily::Linear;
  int degree = 4;
  double coef = 0.1;
  double gain = 1.0;

  void validate() const;

  static KernelSpec linear();
  static KernelSpec polynomial(int degree = 4, double coef = 0.1);
  static KernelSpec sigmoid(double gain = 0.0, double coef = 0.01);
  static KernelSpec rbf(double gain = 0.0);
};

// Replaces gain <= 0 with 1/d (the scikit-learn default) for Sigmoid/RBF.
KernelSpec resolve_gain(KernelSpec spec, Index feature_dim);

// Gram matrix over group-ordered training data: rows [0, n_u) are the
// unprotected block K_u, rows [n_u, n) the protected block K_p.
struct GramView {
  numerics::SymMatrix full;
  Index n_u;

  Index n() const { return full.dim(); }
  Index n_p() const { return full.dim() - n_u; }
  auto rows_u() const { return full.mat().topRows(n_u); }
  auto rows_p() const { return full.mat().bottomRows(n_p()); }
};

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& z);

// Assembles the full Gram matrix by evaluating the upper triangle and
// mirroring, so symmetry is exact and every entry equals kernel_eval on the
// corresponding row pair. An empty group block is tolerated here; the
// embedding objective rejects it.
GramView gram(const KernelSpec& spec, const Matrix& data, Index n_u);

// n_test x n_train matrix of k(test_t, train_i).
Matrix cross_gram(const KernelSpec& spec, const Matrix& train,
                  const Matrix& test);

}  // namespace fairkr::kernels

#include "fairkr/kernels.hpp"

#include <cmath>

namespace fairkr::kernels {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Linear: return "linear";
    case KernelFamily::Polynomial: return "polynomial";
    case KernelFamily::Sigmoid: return "sigmoid";
    case KernelFamily::RBF: return "rbf";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "linear") return KernelFamily::Linear;
  if (name == "polynomial" || name == "poly") return KernelFamily::Polynomial;
  if (name == "sigmoid") return KernelFamily::Sigmoid;
  if (name == "rbf") return KernelFamily::RBF;
  throw InvalidConfig("unknown kernel family '" + name + "'");
}

void KernelSpec::validate() const {
  if (family == KernelFamily::Polynomial && degree < 1)
    throw InvalidConfig("polynomial kernel requires degree >= 1, got " +
                        std::to_string(degree));
  if ((family == KernelFamily::Sigmoid || family == KernelFamily::RBF) &&
      !(gain > 0.0))
    throw InvalidConfig(to_string(family) +
                        " kernel requires gain > 0 (0 means unresolved "
                        "1/feature-dim default)");
}

KernelSpec KernelSpec::linear() {
  return {KernelFamily::Linear, 1, 0.0, 1.0};
}

KernelSpec KernelSpec::polynomial(int degree, double coef) {
  return {KernelFamily::Polynomial, degree, coef, 1.0};
}

KernelSpec KernelSpec::sigmoid(double gain, double coef) {
  return {KernelFamily::Sigmoid, 1, coef, gain};
}

KernelSpec KernelSpec::rbf(double gain) {
  return {KernelFamily::RBF, 1, 0.0, gain};
}

KernelSpec resolve_gain(KernelSpec spec, Index feature_dim) {
  if ((spec.family == KernelFamily::Sigmoid ||
       spec.family == KernelFamily::RBF) &&
      spec.gain <= 0.0) {
    if (feature_dim <= 0)
      throw InvalidConfig("resolve_gain: feature dimension must be positive");
    spec.gain = 1.0 / static_cast<double>(feature_dim);
  }
  return spec;
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& z) {
  if (x.size() != z.size())
    throw DimensionMismatch("kernel_eval: vector sizes " +
                            std::to_string(x.size()) + " vs " +
                            std::to_string(z.size()));
  spec.validate();
  switch (spec.family) {
    case KernelFamily::Linear:
      return x.dot(z);
    case KernelFamily::Polynomial:
      return std::pow(x.dot(z) + spec.coef, spec.degree);
    case KernelFamily::Sigmoid:
      return std::tanh(spec.gain * x.dot(z) + spec.coef);
    case KernelFamily::RBF:
      return std::exp(-spec.gain * (x - z).squaredNorm());
  }
  throw InvalidConfig("kernel_eval: unknown family");
}

GramView gram(const KernelSpec& spec, const Matrix& data, Index n_u) {
  const Index n = data.rows();
  if (n < 1) throw EmptyInput("gram: data has no rows");
  if (n_u < 0 || n_u > n)
    throw DegenerateGroup("gram: need 0 <= n_u <= n, got n_u=" +
                          std::to_string(n_u) + ", n=" + std::to_string(n));
  spec.validate();
  Matrix full(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double v =
          kernel_eval(spec, data.row(i).transpose(), data.row(j).transpose());
      full(i, j) = v;
      full(j, i) = v;
    }
  }
  if (!full.allFinite())
    throw NonFinite("gram: kernel produced NaN/Inf (family " +
                    to_string(spec.family) + ")");
  return GramView{numerics::SymMatrix(std::move(full)), n_u};
}

Matrix cross_gram(const KernelSpec& spec, const Matrix& train,
                  const Matrix& test) {
  if (train.cols() != test.cols())
    throw DimensionMismatch("cross_gram: feature dims " +
                            std::to_string(train.cols()) + " vs " +
                            std::to_string(test.cols()));
  spec.validate();
  Matrix out(test.rows(), train.rows());
  for (Index t = 0; t < test.rows(); ++t)
    for (Index i = 0; i < train.rows(); ++i)
      out(t, i) = kernel_eval(spec, test.row(t).transpose(),
                              train.row(i).transpose());
  if (!out.allFinite()) throw NonFinite("cross_gram: kernel produced NaN/Inf");
  return out;
}

}  // namespace fairkr::kernels

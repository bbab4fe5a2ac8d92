#include "phjb/hilbert.hpp"

#include <cmath>
#include <string>

#include "phjb/error.hpp"

namespace phjb {

SpectralSpace::SpectralSpace(std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) {
    throw PreconditionError("SpectralSpace: dim must be at least 1");
  }
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    if (!std::isfinite(eigenvalues[k]) || eigenvalues[k] > 0.0) {
      throw PreconditionError("SpectralSpace: eigenvalue " + std::to_string(k) +
                              " must be finite and <= 0 (contraction)");
    }
  }
  eigenvalues_ = Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(),
                                                   static_cast<Eigen::Index>(eigenvalues.size()));
}

void SpectralSpace::check_dim(const HVec& x) const {
  if (x.size() != dim()) {
    throw PreconditionError("dimension mismatch: expected " + std::to_string(dim()) + ", got " +
                            std::to_string(x.size()));
  }
}

HVec SpectralSpace::unit(int k) const {
  if (k < 0 || k >= dim()) throw PreconditionError("unit vector index out of range");
  HVec e = zero();
  e[k] = 1.0;
  return e;
}

HVec SpectralSpace::semigroup_apply(double t, const HVec& x) const {
  check_dim(x);
  if (!(t >= 0.0)) throw PreconditionError("semigroup_apply: t must be >= 0");
  if (t == 0.0) return x;
  return (eigenvalues_.array() * t).exp().matrix().cwiseProduct(x);
}

HVec SpectralSpace::yosida_apply(double mu, const HVec& x) const {
  check_dim(x);
  if (!(mu > 0.0)) throw PreconditionError("yosida_apply: mu must be > 0");
  HVec out(dim());
  for (int k = 0; k < dim(); ++k) {
    const double lam = eigenvalues_[k];
    out[k] = mu * lam / (mu - lam) * x[k];
  }
  return out;
}

HVec SpectralSpace::generator_apply(const HVec& x) const {
  check_dim(x);
  return eigenvalues_.cwiseProduct(x);
}

HVec SpectralSpace::adjoint_apply(const HVec& x) const { return generator_apply(x); }

}  // namespace phjb

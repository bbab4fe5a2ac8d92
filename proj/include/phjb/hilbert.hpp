#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace phjb {

/// Element of the truncated Hilbert space, in coordinates of the eigenbasis of A.
using HVec = Eigen::VectorXd;

/// Finite spectral truncation of H with a diagonal generator A = diag(lambda_k),
/// lambda_k <= 0, so that e^{tA} is a contraction semigroup and A* = A.
class SpectralSpace {
 public:
  explicit SpectralSpace(std::vector<double> eigenvalues);

  int dim() const { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  /// e^{tA} x. Throws PreconditionError for t < 0.
  HVec semigroup_apply(double t, const HVec& x) const;

  /// A_mu x = mu A (mu I - A)^{-1} x. Throws PreconditionError for mu <= 0.
  HVec yosida_apply(double mu, const HVec& x) const;

  /// A* x, which equals A x for the real diagonal generator.
  HVec adjoint_apply(const HVec& x) const;

  HVec generator_apply(const HVec& x) const;

  /// M1 = sup_s |e^{sA}|.
  double semigroup_bound() const { return 1.0; }

  HVec zero() const { return HVec::Zero(dim()); }
  HVec unit(int k) const;

  void check_dim(const HVec& x) const;

  bool operator==(const SpectralSpace& other) const {
    return eigenvalues_ == other.eigenvalues_;
  }

 private:
  Eigen::VectorXd eigenvalues_;
};

using SpacePtr = std::shared_ptr<const SpectralSpace>;

inline SpacePtr make_space(std::vector<double> eigenvalues) {
  return std::make_shared<const SpectralSpace>(std::move(eigenvalues));
}

}  // namespace phjb
